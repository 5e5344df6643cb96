"""Figures: RGB renderings of image tensors and stage-timing plots."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .types import CloudImage  # noqa: E402

# no entry is black, so empty pixels stay distinguishable
PALETTE = np.array([
    (0.894, 0.102, 0.110), (0.216, 0.494, 0.722), (0.302, 0.686, 0.290),
    (0.596, 0.306, 0.639), (1.000, 0.498, 0.000), (1.000, 1.000, 0.200),
    (0.651, 0.337, 0.157), (0.969, 0.506, 0.749), (0.600, 0.600, 0.600),
    (0.400, 0.761, 0.647), (0.988, 0.553, 0.384), (0.553, 0.627, 0.796),
    (0.906, 0.541, 0.765), (0.651, 0.847, 0.329), (1.000, 0.851, 0.184),
    (0.898, 0.769, 0.580),
])


def feature_rgb(image: CloudImage) -> np.ndarray:
    """Occupied pixels colored by position in the cloud's bounding box, empty ones black."""
    H, W = image.shape
    rgb = np.zeros((H, W, 3))
    occ = image.occupied()
    if not occ.any():
        return rgb
    vals = image.features[occ].astype(np.float64)
    lo, hi = vals.min(axis=0), vals.max(axis=0)
    span = hi - lo
    norm = np.where(span > 0, (vals - lo) / np.where(span > 0, span, 1.0), 0.5)
    rgb[occ] = 0.2 + 0.8 * norm
    return rgb


def mask_rgb(image: CloudImage, mask=None) -> np.ndarray:
    m = image.mask if mask is None else np.asarray(mask)
    H, W = image.shape
    rgb = np.zeros((H, W, 3))
    if m is None:
        return rgb
    occ = m >= 0
    rgb[occ] = PALETTE[m[occ] % len(PALETTE)]
    return rgb


def save_png(rgb: np.ndarray, path) -> None:
    plt.imsave(path, np.clip(rgb, 0.0, 1.0), format="png")


def plot_timing(rows, path, title: str = "Stage wall-clock time") -> None:
    """Log-log plot of mean stage time against cloud size, slope in the legend."""
    from .metrics import loglog_slope

    series = defaultdict(list)
    for n, stage, mean_ms, std_ms in rows:
        series[stage].append((n, mean_ms, std_ms))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for stage, pts in series.items():
        n, m, s = (np.array(v, dtype=float) for v in zip(*pts))
        label = stage
        if len(n) > 1 and np.all(m > 0):
            label = f"{stage} (slope {loglog_slope(n, m):.2f})"
        ax.errorbar(n, m, yerr=s, marker="o", capsize=3, label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("points")
    ax.set_ylabel("time (ms)")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
