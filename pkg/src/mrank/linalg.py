"""Matrix kernels shared by the rank machinery and the solvers.

All routines work on complex128 matrices. Singular values are always
returned in nonincreasing order (LAPACK convention).
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag, sqrtm

__all__ = [
    "DEFAULT_RANK_TOL",
    "SvdResult",
    "TakagiResult",
    "svd",
    "numerical_rank",
    "nuclear_norm",
    "spectral_norm",
    "takagi",
    "svt",
    "complex_soft_threshold",
    "complex_l1",
]

# Relative threshold separating genuine from numerically-zero singular values
# on exactly generated data. Solver outputs carry their own looser tolerance
# (see ranks.RECOVERED_RANK_TOL): their error floor sits far above 1e-8.
DEFAULT_RANK_TOL = 1e-8


@dataclass
class SvdResult:
    """Thin SVD, m = u @ diag(s) @ v.conj().T."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.conj().T


@dataclass
class TakagiResult:
    """Symmetric factorization m = w @ diag(s) @ w.T with unitary w, s >= 0."""

    w: np.ndarray
    s: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.w * self.s) @ self.w.T


def svd(m) -> SvdResult:
    m = np.asarray(m, dtype=np.complex128)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return SvdResult(u, s, vh.conj().T)


def numerical_rank(m, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values above rel_tol * sigma_max; 0 for a zero matrix."""
    m = np.asarray(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def nuclear_norm(m) -> float:
    return float(np.linalg.svd(np.asarray(m), compute_uv=False).sum())


def spectral_norm(m) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def takagi(m, sym_tol: float = 1e-10, group_tol: float = 1e-8) -> TakagiResult:
    """Factor a complex symmetric matrix as m = w @ diag(s) @ w.T.

    Built from the SVD m = u @ diag(s) @ vh: for symmetric m the matrix
    z = u.T @ v is block-diagonal over groups of equal singular values,
    unitary and symmetric there, and w = u @ conj(sqrtm(z)) absorbs the
    phase mismatch block by block. Groups are found by relative gaps of
    size group_tol * sigma_max, which rides over the fp jitter of truly
    repeated singular values.

    Raises ValueError when m is not square or not symmetric within
    sym_tol * max(1, ||m||_F).
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"takagi needs a square matrix, got shape {m.shape}")
    if np.linalg.norm(m - m.T) > sym_tol * max(1.0, np.linalg.norm(m)):
        raise ValueError("takagi needs a (complex) symmetric matrix")
    if m.shape[0] == 0:
        return TakagiResult(np.zeros((0, 0), np.complex128), np.zeros(0))
    u, s, vh = np.linalg.svd(m)
    v = vh.conj().T
    scale = s[0] if s[0] > 0 else 1.0
    blocks = []
    start = 0
    for i in range(1, s.size + 1):
        if i == s.size or s[start] - s[i] > group_tol * scale:
            idx = slice(start, i)
            blocks.append(sqrtm(u[:, idx].T @ v[:, idx]))
            start = i
    q = block_diag(*blocks)
    return TakagiResult(u @ q.conj(), s)


def svt(m, tau: float) -> np.ndarray:
    """Singular value thresholding: shrink every singular value by tau,
    clipping at zero. The proximal map of tau * nuclear norm."""
    m = np.asarray(m, dtype=np.complex128)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    keep = s > tau
    if not keep.any():
        return np.zeros_like(m)
    return (u[:, keep] * (s[keep] - tau)) @ vh[keep]


def complex_soft_threshold(m, tau: float) -> np.ndarray:
    """Entrywise modulus shrinkage z * max(1 - tau/|z|, 0), the proximal map
    of tau * sum(|z_i|) with |.| the complex modulus."""
    m = np.asarray(m, dtype=np.complex128)
    mod = np.abs(m)
    return m * np.maximum(1.0 - tau / np.maximum(mod, np.finfo(float).tiny), 0.0)


def complex_l1(m) -> float:
    """Sum of complex moduli, sum(sqrt(re^2 + im^2))."""
    return float(np.abs(np.asarray(m)).sum())
