"""Compiled inner loops for stress evaluation and layout optimization."""

import math

import numpy as np
from numba import njit

JITTER = 1e-9


@njit(cache=True)
def _pair_offset(i, j, dx, dy):
    # deterministic unit direction for a coincident pair, antisymmetric in (i, j)
    if dx != 0.0 or dy != 0.0:
        return dx, dy
    lo = min(i, j)
    hi = max(i, j)
    h = ((lo * 73856093) ^ (hi * 19349663)) % 1000003
    theta = 2.0 * math.pi * h / 1000003.0
    sgn = 1.0 if i < j else -1.0
    return sgn * JITTER * math.cos(theta), sgn * JITTER * math.sin(theta)


@njit(cache=True)
def stress(X, inv_s):
    n = X.shape[0]
    total = 0.0
    for i in range(n):
        xi = X[i, 0]
        yi = X[i, 1]
        for j in range(i + 1, n):
            dx = xi - X[j, 0]
            dy = yi - X[j, 1]
            r = math.sqrt(dx * dx + dy * dy) * inv_s[i, j] - 1.0
            total += r * r
    return total


@njit(cache=True)
def stress_and_grad(X, inv_s, G):
    n = X.shape[0]
    for i in range(n):
        G[i, 0] = 0.0
        G[i, 1] = 0.0
    total = 0.0
    for i in range(n):
        xi = X[i, 0]
        yi = X[i, 1]
        for j in range(i + 1, n):
            w = inv_s[i, j]
            dx = xi - X[j, 0]
            dy = yi - X[j, 1]
            d = math.sqrt(dx * dx + dy * dy)
            r = d * w - 1.0
            total += r * r
            if d == 0.0:
                dx, dy = _pair_offset(i, j, dx, dy)
                d = math.sqrt(dx * dx + dy * dy)
                r = d * w - 1.0
            c = 2.0 * w * r / d
            G[i, 0] += c * dx
            G[i, 1] += c * dy
            G[j, 0] -= c * dx
            G[j, 1] -= c * dy
    return total


@njit(cache=True)
def kk_descent(X, inv_s, precond, max_iters, tol, patience, history):
    """Preconditioned gradient descent with backtracking on the stress.

    ``X`` is updated in place. ``history`` receives the stress before the
    first step followed by the stress after every accepted step. Returns
    ``(entries written to history, converged)``.
    """
    n = X.shape[0]
    G = np.zeros((n, 2))
    Gt = np.zeros((n, 2))
    Xt = np.empty((n, 2))
    P = np.empty((n, 2))
    f = stress_and_grad(X, inv_s, G)
    history[0] = f
    count = 1
    step = 1.0
    quiet = 0
    for _ in range(max_iters):
        if f == 0.0:
            return count, True
        slope = 0.0
        for i in range(n):
            P[i, 0] = -G[i, 0] / precond[i]
            P[i, 1] = -G[i, 1] / precond[i]
            slope += G[i, 0] * P[i, 0] + G[i, 1] * P[i, 1]
        if slope >= 0.0:
            return count, True
        t = min(1.0, 2.0 * step)
        accepted = False
        ft = f
        for _ls in range(60):
            for i in range(n):
                Xt[i, 0] = X[i, 0] + t * P[i, 0]
                Xt[i, 1] = X[i, 1] + t * P[i, 1]
            ft = stress_and_grad(Xt, inv_s, Gt)
            if ft <= f + 1e-4 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            return count, True
        step = t
        rel = (f - ft) / f
        X[:, :] = Xt
        G[:, :] = Gt
        f = ft
        history[count] = f
        count += 1
        if rel < tol:
            quiet += 1
            if quiet >= patience:
                return count, True
        else:
            quiet = 0
    return count, False


@njit(cache=True)
def fr_spring(X, attract, iters, t0):
    """Fruchterman-Reingold with unit ideal length and linear cooling.

    ``attract[i, j]`` weights the spring between i and j (1 for graph edges).
    """
    n = X.shape[0]
    disp = np.zeros((n, 2))
    for it in range(iters):
        temp = t0 * (1.0 - it / iters)
        for i in range(n):
            disp[i, 0] = 0.0
            disp[i, 1] = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                dx = X[i, 0] - X[j, 0]
                dy = X[i, 1] - X[j, 1]
                d2 = dx * dx + dy * dy
                if d2 < 1e-18:
                    dx, dy = _pair_offset(i, j, 0.0, 0.0)
                    d2 = dx * dx + dy * dy
                d = math.sqrt(d2)
                # repulsion k^2/d minus attraction a*d^2/k, along the unit vector
                f = (1.0 - attract[i, j] * d2 * d) / d2
                disp[i, 0] += f * dx
                disp[i, 1] += f * dy
                disp[j, 0] -= f * dx
                disp[j, 1] -= f * dy
        for i in range(n):
            dl = math.sqrt(disp[i, 0] ** 2 + disp[i, 1] ** 2)
            if dl > 0.0:
                s = min(dl, temp) / dl
                X[i, 0] += disp[i, 0] * s
                X[i, 1] += disp[i, 1] * s
    return X


@njit(cache=True)
def spring_layout(X, D, eu, ev, fr_iters, fr_temp, max_iters, tol, patience, history):
    """FR warm start (skipped when ``fr_iters`` is 0) followed by :func:`kk_descent`.

    ``eu, ev`` list the graph edges; with no edges every pair gets a spring
    of weight ``1 / s_ij**2``.
    """
    n = X.shape[0]
    inv = np.zeros((n, n))
    precond = np.zeros(n)
    for i in range(n):
        for j in range(n):
            if i != j:
                w = 1.0 / D[i, j]
                inv[i, j] = w
                precond[i] += 2.0 * w * w
    if fr_iters > 0:
        attract = np.zeros((n, n))
        if eu.shape[0] > 0:
            for k in range(eu.shape[0]):
                attract[eu[k], ev[k]] = 1.0
                attract[ev[k], eu[k]] = 1.0
        else:
            for i in range(n):
                for j in range(n):
                    attract[i, j] = inv[i, j] * inv[i, j]
        fr_spring(X, attract, fr_iters, fr_temp)
    return kk_descent(X, inv, precond, max_iters, tol, patience, history)
