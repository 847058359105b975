"""Pure numpy versions of the compiled kernels.

The Jacobi solver here uses round-robin (tournament) ordering so that each
round applies ``n // 2`` disjoint rotations as one vectorised update. It is a
cyclic Jacobi method like the compiled one, only with a different pair order,
so eigenvalues agree to rounding but not bit-for-bit.
"""
from __future__ import annotations

import numpy as np


def _round_robin(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p = np.array(players[: m // 2])
        q = np.array(players[m // 2 :][::-1])
        lo, hi = np.minimum(p, q), np.maximum(p, q)
        rounds.append((lo, hi))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _offdiag_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(A, want_vectors=True, max_sweeps=100, tol=1e-14):
    a = np.array(A, dtype=np.float64, order="C", copy=True)
    n = a.shape[0]
    a = np.triu(a) + np.triu(a, 1).T
    frob = float(np.sqrt(np.sum(np.asarray(A, dtype=np.float64) ** 2)))
    v = np.eye(n) if want_vectors else None

    m = n + (n % 2)
    rounds = []
    for lo, hi in _round_robin(m) if n > 1 else []:
        keep = hi < n
        rounds.append((lo[keep], hi[keep]))

    sweep = 0
    while True:
        off = _offdiag_norm(a)
        if off <= tol * frob or sweep >= max_sweeps:
            break
        sweep += 1
        tresh = 0.2 * off / (n * n) if sweep < 4 else 0.0
        for p, q in rounds:
            apq = a[p, q]
            app = a[p, p]
            aqq = a[q, q]
            active = np.abs(apq) > tresh
            if not np.any(active):
                continue
            p, q, apq, app, aqq = p[active], q[active], apq[active], app[active], aqq[active]
            h = aqq - app
            with np.errstate(divide="ignore", invalid="ignore"):
                theta = 0.5 * h / apq
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(1.0 + theta * theta))
            t = np.where(theta == 0.0, 1.0, t)
            small = np.abs(h) + 100.0 * np.abs(apq) == np.abs(h)
            t = np.where(small, apq / np.where(h == 0.0, 1.0, h), t)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            rp = a[p, :].copy()
            rq = a[q, :]
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp = a[:, p].copy()
            cq = a[:, q]
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            if v is not None:
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = vp * c - vq * s
                v[:, q] = vp * s + vq * c

    return np.diagonal(a).copy(), v, sweep, off, frob


def first_order_recursion(coef, drift, y0, x):
    coef = np.asarray(coef, dtype=np.float64)
    drift = np.asarray(drift, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    prev = np.array(y0, dtype=np.float64)
    for t in range(x.shape[1]):
        prev = drift + coef * prev + x[:, t]
        out[:, t] = prev
    return out
