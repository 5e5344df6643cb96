"""Command line entry point: ``gridembed {project,visualize,bench}``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .embed import PipelineConfig, run_pipeline
from .graph import GraphMode
from .io import CloudParseError, TensorFileError, read_cloud, read_image, write_image
from .types import BalanceError, CapacityError, GridEmbedError, InvalidArgumentError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAPACITY = 3
EXIT_BALANCE = 4
EXIT_USAGE = 64

log = logging.getLogger("gridembed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _extent(text: str) -> tuple:
    try:
        r, c = text.lower().split("x")
        r, c = int(r), int(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RxC, got {text!r}") from None
    if r < 1 or c < 1:
        raise argparse.ArgumentTypeError("grid dimensions must be positive")
    return r, c


def _switch(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _clusters(text: str):
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad cluster count {text!r}") from None
    if any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("cluster counts must be >= 0")
    return vals[0] if len(vals) == 1 else tuple(vals)


def _sizes(text: str) -> list:
    try:
        vals = [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridembed", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("project", help="project a point cloud file into an image tensor")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--graph", choices=("delaunay", "knn", "euclidean"), default="delaunay")
    p.add_argument("--knn-k", type=int, default=20)
    p.add_argument("--clusters", type=_clusters, default=32,
                   help="K for the top split, a comma list per level, or 0 for about n**(1/L)")
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--alpha", type=float, default=1.2)
    p.add_argument("--lower-grid", type=_extent, default=(16, 16))
    p.add_argument("--higher-grid", type=_extent, default=(16, 16))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normalize-features", type=_switch, default=False)
    p.add_argument("--repair-collisions", type=_switch, default=True)

    v = sub.add_parser("visualize", help="render an image tensor file as PNG")
    v.add_argument("--input", required=True, type=Path)
    v.add_argument("--output", required=True, type=Path)
    v.add_argument("--mask", action="store_true", help="color by label instead of xyz")

    b = sub.add_parser("bench", help="time each pipeline stage over cloud sizes")
    b.add_argument("--sizes", type=_sizes, default=[512, 1024, 2048])
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--out", type=Path, required=True)
    b.add_argument("--figure", type=Path, default=None,
                   help="log-log timing plot (default: next to --out, .png)")
    b.add_argument("--levels", type=int, default=2)
    b.add_argument("--clusters", type=_clusters, default=0)
    b.add_argument("--seed", type=int, default=0)
    return parser


def _config(args) -> PipelineConfig:
    return PipelineConfig(
        graph_mode=GraphMode(args.graph, args.knn_k), levels=args.levels,
        clusters=args.clusters, alpha=args.alpha, lower_grid=args.lower_grid,
        higher_grid=args.higher_grid, seed=args.seed,
        repair_collisions=args.repair_collisions,
        normalize_features=args.normalize_features)


def cmd_project(args) -> int:
    try:
        cloud = read_cloud(args.input)
    except CloudParseError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        config = _config(args)
    except InvalidArgumentError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        image, report = run_pipeline(cloud, config)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except BalanceError as exc:
        print(f"balance error: {exc}", file=sys.stderr)
        return EXIT_BALANCE
    except InvalidArgumentError as exc:
        # infeasible K for the cloud or one of its clusters
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    write_image(args.output, image)
    H, W = image.shape
    log.info("wrote %dx%dx3 tensor, %d occupied pixels, collision ratio %.3g",
             H, W, int(image.occupied().sum()), report.collision_ratio)
    return EXIT_OK


def cmd_visualize(args) -> int:
    from .plotting import feature_rgb, mask_rgb, save_png

    try:
        image = read_image(args.input)
    except (OSError, TensorFileError) as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.mask and image.mask is None:
        print(f"{args.input} has no label mask", file=sys.stderr)
        return EXIT_INPUT
    save_png(mask_rgb(image) if args.mask else feature_rgb(image), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .metrics import loglog_slope, timing_harness
    from .plotting import plot_timing

    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    config = PipelineConfig(levels=args.levels, clusters=args.clusters, seed=args.seed)
    rows = timing_harness(args.sizes, config, repeats=args.repeats, seed=args.seed)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["n", "stage", "mean_ms", "std_ms"])
        for n, stage, mean, std in rows:
            w.writerow([n, stage, f"{mean:.3f}", f"{std:.3f}"])
    figure = args.figure or args.out.with_suffix(".png")
    plot_timing(rows, figure)
    layout = [(n, m) for n, s, m, _ in rows if s == "layout"]
    if len(layout) > 1:
        print(f"layout stage log-log slope: {loglog_slope(*zip(*layout)):.3f}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"project": cmd_project, "visualize": cmd_visualize, "bench": cmd_bench}
    try:
        return handler[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except GridEmbedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
