"""Spectral machinery for sample correlation matrices of random-walk panels.

The demeaned cumulation operator ``M U'`` (``U`` upper-triangular ones,
``M = I - 1/T``) has the explicit singular system

    sigma_k = 1 / (2 sin(pi k / (2T))),
    v_{k,t} = sqrt(2/T) sin(pi k (t-1) / T),         t = 1..T,
    w_{k,j} = -sqrt(2/T) cos(pi k (2j+1) / (2T)),    j = 0..T-1,

for k = 1..T-1, completed by sigma_T = 0, v_T = e_1 and w_T = 1/sqrt(T).
Leading eigenvectors of the T x T correlation form align with
``d_{k,j} = sqrt(2/T) cos(pi k j / T)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConvergenceError, DegenerateRowError, NumericalError, ValidationError

__all__ = [
    "SpectralBasis",
    "EigenResult",
    "CorrelationSpectrum",
    "build_basis",
    "demeaning_matrix",
    "cumulation_matrix",
    "sample_correlation",
    "correlation_T_form",
    "symmetric_eigen",
    "correlation_eigenvalues",
    "top_eigen_T_form",
    "project_onto_w_basis",
]

MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-14
CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class SpectralBasis:
    T: int
    K: int
    sigma: np.ndarray  # length T, sigma[T-1] == 0
    mu: np.ndarray  # length T-1
    v: np.ndarray  # T x T, column k-1 is v_k
    w: np.ndarray  # T x T, column k-1 is w_k
    d: np.ndarray  # T x K, column k-1 is d_k

    def reconstruct_MU(self) -> np.ndarray:
        """``sum_k sigma_k w_k v_k'`` over k = 1..T-1."""
        k = self.T - 1
        return (self.w[:, :k] * self.sigma[:k]) @ self.v[:, :k].T


def demeaning_matrix(T: int) -> np.ndarray:
    return np.eye(T) - np.full((T, T), 1.0 / T)


def cumulation_matrix(T: int) -> np.ndarray:
    return np.triu(np.ones((T, T)))


def build_basis(T: int, K: int = 1) -> SpectralBasis:
    T, K = int(T), int(K)
    if T < 2:
        raise ValidationError(f"T must be at least 2, got {T}")
    if not 1 <= K < T:
        raise ValidationError(f"need 1 <= K < T, got K={K}, T={T}")
    k = np.arange(1, T)
    sigma = np.zeros(T)
    sigma[:-1] = 1.0 / (2.0 * np.sin(np.pi * k / (2.0 * T)))
    mu = 2.0 - 2.0 * np.cos(np.pi * k / T)
    scale = np.sqrt(2.0 / T)

    t = np.arange(1, T + 1)
    v = np.zeros((T, T))
    v[:, :-1] = scale * np.sin(np.pi * np.outer(t - 1, k) / T)
    v[0, -1] = 1.0

    j = np.arange(T)
    w = np.empty((T, T))
    w[:, :-1] = -scale * np.cos(np.pi * np.outer(2 * j + 1, k) / (2.0 * T))
    w[:, -1] = 1.0 / np.sqrt(T)

    kk = np.arange(1, K + 1)
    d = scale * np.cos(np.pi * np.outer(t, kk) / T)
    for arr in (sigma, mu, v, w, d):
        arr.setflags(write=False)
    return SpectralBasis(T=T, K=K, sigma=sigma, mu=mu, v=v, w=w, d=d)


def _standardized_rows(X) -> np.ndarray:
    """Demeaned rows scaled to unit sum of squares, ``D^{-1/2} X M``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValidationError(f"expected a 2-D panel, got shape {X.shape}")
    Xc = X - X.mean(axis=1, keepdims=True)
    ss = np.einsum("ij,ij->i", Xc, Xc)
    span = np.max(np.abs(X), axis=1)
    floor = (64.0 * np.finfo(float).eps * span) ** 2 * X.shape[1]
    bad = np.flatnonzero(ss <= floor)
    if bad.size:
        raise DegenerateRowError(bad.tolist())
    return Xc / np.sqrt(ss)[:, None]


def sample_correlation(X) -> np.ndarray:
    Y = _standardized_rows(X)
    R = Y @ Y.T
    R = 0.5 * (R + R.T)
    np.fill_diagonal(R, 1.0)
    return np.clip(R, -1.0, 1.0)


def correlation_T_form(X) -> np.ndarray:
    """The T x T matrix ``M X' D^{-1} X M``."""
    Y = _standardized_rows(X)
    R = Y.T @ Y
    return 0.5 * (R + R.T)


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray  # descending
    vectors: np.ndarray | None  # columns, matching values
    sweeps: int
    offdiag: float
    residual: float | None  # max_i ||A v_i - lambda_i v_i|| / ||A||_F


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def symmetric_eigen(A, want_vectors: bool = True) -> EigenResult:
    """Full eigendecomposition of a dense symmetric matrix by cyclic Jacobi.

    Eigenvalues come back in descending order; each eigenvector is flipped so
    that its largest-magnitude entry is positive.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("matrix has non-finite entries")
    scale = np.linalg.norm(A)
    if np.linalg.norm(A - A.T) > 1e-12 * scale:
        raise ValidationError("matrix is not symmetric to 1e-12 relative")
    A = np.ascontiguousarray(0.5 * (A + A.T))

    vals, vecs, sweeps, off, frob = _backend.jacobi_eigh(A, want_vectors, MAX_SWEEPS, OFFDIAG_TOL)
    if off > OFFDIAG_TOL * frob:
        raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps", off / frob)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    residual = None
    if want_vectors:
        vecs = _fix_signs(vecs[:, order])
        if frob > 0:
            residual = float(np.max(np.linalg.norm(A @ vecs - vecs * vals, axis=0)) / frob)
        else:
            residual = 0.0
    return EigenResult(vals, vecs, int(sweeps), float(off), residual)


def _clamp(values: np.ndarray) -> np.ndarray:
    if values.size and values.min() < -CLAMP_TOL:
        raise NumericalError(f"correlation form has eigenvalue {values.min():.3e} < 0")
    return np.maximum(values, 0.0)


def correlation_eigenvalues(X) -> np.ndarray:
    """Nonnegative spectrum (descending) of the smaller correlation form."""
    Y = _standardized_rows(X)
    n, T = Y.shape
    G = Y @ Y.T if n <= T else Y.T @ Y
    G = 0.5 * (G + G.T)
    return _clamp(symmetric_eigen(G, want_vectors=False).values)


@dataclass(frozen=True)
class CorrelationSpectrum:
    eigenvalues: np.ndarray  # descending, length min(n, T)
    top_vectors_T: np.ndarray  # T x K
    alpha: np.ndarray  # K x (T-1), alpha[i, k-1] = <w_k, F_i>
    trace: float  # trace of the T x T form, computed from that form

    @property
    def K(self) -> int:
        return self.top_vectors_T.shape[1]


def top_eigen_T_form(X, K: int = 1, basis: SpectralBasis | None = None) -> CorrelationSpectrum:
    """Leading eigenpairs of ``M X' D^{-1} X M``.

    The smaller of the n x n and T x T forms is diagonalised; when that is the
    n x n one, T-space vectors are recovered as ``Y' u / sqrt(lambda)``.
    """
    Y = _standardized_rows(X)
    n, T = Y.shape
    K = int(K)
    if not 1 <= K <= min(n, T - 1):
        raise ValidationError(f"need 1 <= K <= min(n, T-1), got K={K} with n={n}, T={T}")
    if n <= T:
        G = Y @ Y.T
        eig = symmetric_eigen(0.5 * (G + G.T), want_vectors=True)
        vals = _clamp(eig.values)
        lead = vals[:K]
        if np.any(lead <= 0.0):
            raise NumericalError("requested eigenvectors for a zero eigenvalue")
        F = (Y.T @ eig.vectors[:, :K]) / np.sqrt(lead)
        F /= np.linalg.norm(F, axis=0)
        F = _fix_signs(F)
    else:
        G = Y.T @ Y
        eig = symmetric_eigen(0.5 * (G + G.T), want_vectors=True)
        vals = _clamp(eig.values)[:n]
        F = eig.vectors[:, :K]
    trace = float(np.einsum("ij,ij->", Y, Y))
    if basis is None or basis.T != T:
        basis = build_basis(T, 1)
    alpha = np.stack([project_onto_w_basis(F[:, i], basis) for i in range(K)])
    return CorrelationSpectrum(eigenvalues=vals, top_vectors_T=F, alpha=alpha, trace=trace)


def project_onto_w_basis(F, basis: SpectralBasis) -> np.ndarray:
    """Coefficients ``alpha_k = <w_k, F>`` for k = 1..T-1."""
    F = np.asarray(F, dtype=float).ravel()
    if F.size != basis.T:
        raise ValidationError(f"vector has length {F.size}, basis has T={basis.T}")
    norm = np.linalg.norm(F)
    if abs(norm - 1.0) > 1e-8:
        raise ValidationError(f"vector must be unit-norm, got norm {norm:.12f}")
    const = float(basis.w[:, -1] @ F)
    if abs(const) > 1e-6:
        raise ValidationError(f"vector has component {const:.3e} along the constant direction")
    return basis.w[:, :-1].T @ F
