"""Self-checks behind ``panelroot verify``.

Each check returns a :class:`Check`; the eigensolver is compared with an
independent bisection on the inertia of ``T - x I``, with ``T`` a Householder
tridiagonal form of the input, which shares no code with the Jacobi iteration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .limitlaw import sample_limit
from .randomness import RngStream
from .spectra import (
    build_basis,
    correlation_T_form,
    cumulation_matrix,
    demeaning_matrix,
    sample_correlation,
    symmetric_eigen,
)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    limit: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<44s} {self.value:11.3e}  (limit {self.limit:.0e})"


def tridiagonalize(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction of symmetric ``A`` to (diagonal, off-diagonal)."""
    B = np.array(A, dtype=float)
    n = B.shape[0]
    for k in range(n - 2):
        x = B[k + 1 :, k].copy()
        alpha = -np.copysign(np.linalg.norm(x), x[0])
        v = x
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        B[k + 1 :, :] -= 2.0 * np.outer(v, v @ B[k + 1 :, :])
        B[:, k + 1 :] -= 2.0 * np.outer(B[:, k + 1 :] @ v, v)
    return np.diag(B).copy(), np.diag(B, 1).copy()


def count_below(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues of a symmetric tridiagonal matrix strictly below ``x``.

    The LDL' pivots of ``T - x I`` have as many negative entries as ``T`` has
    eigenvalues below ``x`` (Sylvester's law of inertia).
    """
    scale = max(1.0, float(np.max(np.abs(diag))), float(np.max(np.abs(off), initial=0.0)))
    tiny = np.finfo(float).eps * scale
    neg = 0
    q = diag[0] - x
    for k in range(len(diag)):
        if k > 0:
            q = diag[k] - x - off[k - 1] ** 2 / q
        if abs(q) < tiny:
            q = -tiny
        if q < 0:
            neg += 1
    return neg


def bisection_eigenvalues(A: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """All eigenvalues (descending) of a small symmetric matrix by bisection."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    radius = np.sum(np.abs(A), axis=1) - np.abs(np.diag(A))
    lo0 = float(np.min(np.diag(A) - radius)) - 1.0
    hi0 = float(np.max(np.diag(A) + radius)) + 1.0
    diag, off = tridiagonalize(A)
    out = []
    for k in range(n):  # k-th smallest
        lo, hi = lo0, hi0
        while hi - lo > tol * max(1.0, abs(lo) + abs(hi)):
            mid = 0.5 * (lo + hi)
            if count_below(diag, off, mid) > k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return np.array(out[::-1])


def check_basis(Ts=(4, 8, 16, 32)) -> list[Check]:
    svd_err = mu_err = orth_err = edge_err = 0.0
    for T in Ts:
        basis = build_basis(T, 1)
        MU = demeaning_matrix(T) @ cumulation_matrix(T).T
        svd_err = max(svd_err, float(np.linalg.norm(MU - basis.reconstruct_MU())))
        mu_err = max(mu_err, float(np.max(np.abs(basis.mu * basis.sigma[:-1] ** 2 - 1.0))))
        eye = np.eye(T)
        orth_err = max(
            orth_err,
            float(np.max(np.abs(basis.v.T @ basis.v - eye))),
            float(np.max(np.abs(basis.w.T @ basis.w - eye))),
        )
    return [
        Check("MU' = sum sigma_k w_k v_k' (Frobenius)", svd_err < 1e-10, svd_err, 1e-10),
        Check("mu_k sigma_k^2 = 1", mu_err < 1e-12, mu_err, 1e-12),
        Check("v, w orthonormal", orth_err < 1e-10, orth_err, 1e-10),
    ]


def check_eigensolver(seed: int = 0, count: int = 100) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_res = worst_orth = worst_oracle = 0.0
    for i in range(count):
        size = 2 + i % 19
        G = rng.standard_normal((size, size))
        A = G + G.T
        res = symmetric_eigen(A)
        frob = np.linalg.norm(A)
        r = np.linalg.norm(A @ res.vectors - res.vectors * res.values, axis=0) / frob
        worst_res = max(worst_res, float(r.max()))
        worst_orth = max(worst_orth, float(np.abs(res.vectors.T @ res.vectors - np.eye(size)).max()))
        if size <= 5:
            worst_oracle = max(worst_oracle, float(np.abs(res.values - bisection_eigenvalues(A)).max()))
    return [
        Check("Jacobi residual ||Av - lv|| / ||A||_F", worst_res <= 1e-9, worst_res, 1e-9),
        Check("Jacobi eigenvector orthonormality", worst_orth <= 1e-9, worst_orth, 1e-9),
        Check("Jacobi vs bisection oracle (size <= 5)", worst_oracle <= 1e-8, worst_oracle, 1e-8),
    ]


def check_spectrum_equality(seed: int = 1, count: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = worst_trace = 0.0
    for _ in range(count):
        n, T = (int(x) for x in rng.integers(3, 51, size=2))
        X = np.cumsum(rng.standard_normal((n, T)), axis=1)
        small = symmetric_eigen(sample_correlation(X), want_vectors=False).values
        big = symmetric_eigen(correlation_T_form(X), want_vectors=False).values
        r = min(n, T - 1)
        top = max(small[0], 1.0)
        worst = max(worst, float(np.max(np.abs(small[:r] - big[:r])) / top))
        worst_trace = max(worst_trace, abs(float(np.sum(small)) - n) / n)
    return [
        Check("n x n vs T x T nonzero spectrum (rel.)", worst <= 1e-8, worst, 1e-8),
        Check("trace of correlation = n (rel.)", worst_trace <= 1e-8, worst_trace, 1e-8),
    ]


def check_limit_identities(seed: int = 2, count: int = 200, K: int = 5, N: int = 10_000) -> list[Check]:
    sum_err = diag_viol = off_viol = 0.0
    for i in range(count):
        s = sample_limit(K, N, RngStream(seed, i))
        sum_err = max(sum_err, abs(float(np.sum(s.diagonal_full())) - 1.0))
        diag = np.diag(s.values)
        diag_viol = max(diag_viol, float(np.max(np.maximum(-diag, diag - 1.0))))
        off = s.values[~np.eye(K, dtype=bool)]
        off_viol = max(off_viol, float(np.max(np.abs(off))) - 0.5)
    return [
        Check("sum_k calM_kk = 1 (truncated)", sum_err <= 1e-12, sum_err, 1e-12),
        Check("calM_kk in [0, 1] (violation)", diag_viol <= 0.0, max(diag_viol, 0.0), 0.0),
        Check("|calM_kl| <= 1/2 (violation)", off_viol <= 0.0, max(off_viol, 0.0), 0.0),
    ]


def run_all() -> list[Check]:
    return check_basis() + check_eigensolver() + check_spectrum_equality() + check_limit_identities()
