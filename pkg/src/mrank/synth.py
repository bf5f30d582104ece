"""Seeded synthetic instances: low-rank tensors, masks, sparse corruption.

Every generator takes a single master seed and draws from a labeled
sub-stream (factors=1, mask=2, noise=3), so an instance, its mask, and its
corruption can be varied independently while staying reproducible. Complex
entries are standard normal in each of the real and imaginary parts.
"""

from dataclasses import dataclass

import numpy as np

from .tensor import as_tensor, outer

__all__ = [
    "InstanceSpec",
    "Mask",
    "complex_normal",
    "gen_cp",
    "gen_kron",
    "gen_supersym",
    "gen_mask",
    "gen_sparse_noise",
]

_FACTORS, _MASK, _NOISE = 1, 2, 3


@dataclass(frozen=True)
class InstanceSpec:
    """Recipe for one synthetic instance."""

    dims: tuple
    r: int
    form: str  # "cp" | "kron" | "supersym"
    seed: int
    k: int = 0  # inner factor rank, kron form only

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        if self.form not in ("cp", "kron", "supersym"):
            raise ValueError(f"unknown form {self.form!r}")
        if any(n < 1 for n in self.dims) or not self.dims:
            raise ValueError(f"bad dims {self.dims}")
        if self.r < 0:
            raise ValueError(f"bad term count r={self.r}")
        if self.form == "kron" and (self.k < 1 or len(self.dims) % 2):
            raise ValueError("kron form needs k >= 1 and even order")
        if self.form == "supersym" and (len(set(self.dims)) > 1 or len(self.dims) % 2):
            raise ValueError("supersym form needs equal dims and even order")

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "r": self.r,
            "form": self.form,
            "seed": self.seed,
            "k": self.k,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InstanceSpec":
        return cls(
            dims=tuple(d["dims"]),
            r=int(d["r"]),
            form=str(d["form"]),
            seed=int(d["seed"]),
            k=int(d.get("k", 0)),
        )

    def generate(self) -> np.ndarray:
        if self.form == "cp":
            return gen_cp(self.dims, self.r, self.seed)
        if self.form == "kron":
            return gen_kron(self.dims, self.r, self.k, self.seed)
        return gen_supersym(self.dims[0], len(self.dims), self.r, self.seed)


def complex_normal(rng, shape) -> np.ndarray:
    """Independent standard normal real and imaginary parts."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def gen_cp(dims, r: int, seed: int) -> np.ndarray:
    """Sum of r outer products of independent complex normal vectors, one
    vector per mode per term. CP rank is r generically (for r within the
    maximal possible rank)."""
    dims = tuple(int(n) for n in dims)
    rng = np.random.default_rng([seed, _FACTORS])
    t = np.zeros(dims, dtype=np.complex128)
    for _ in range(r):
        term = complex_normal(rng, dims[0])
        for n in dims[1:]:
            term = outer(term, complex_normal(rng, n))
        t += term
    return t


def gen_kron(dims, r: int, k: int, seed: int) -> np.ndarray:
    """Sum of r outer products of rank-k matrices, one matrix per adjacent
    dim pair: t = sum_i A_i1 (x) ... (x) A_id with A_ij = G @ H,
    G complex normal n_{2j-1} x k and H complex normal k x n_{2j}.

    Generic ranks at order 4: min pairing rank r, max pairing rank r*k^2,
    mode ranks min(r*k, n_j)."""
    dims = tuple(int(n) for n in dims)
    if len(dims) % 2:
        raise ValueError("gen_kron needs even order")
    rng = np.random.default_rng([seed, _FACTORS])
    t = np.zeros(dims, dtype=np.complex128)
    for _ in range(r):
        mats = []
        for j in range(0, len(dims), 2):
            mats.append(
                complex_normal(rng, (dims[j], k)) @ complex_normal(rng, (k, dims[j + 1]))
            )
        term = mats[0]
        for m in mats[1:]:
            term = outer(term, m)
        t += term
    return t


def gen_supersym(n: int, order: int, r: int, seed: int) -> np.ndarray:
    """Sum of r outer powers v^{(x) order} of complex normal vectors;
    super-symmetric by construction, unfolding rank r generically."""
    if order % 2 or order < 2:
        raise ValueError("gen_supersym needs even order >= 2")
    rng = np.random.default_rng([seed, _FACTORS])
    t = np.zeros((n,) * order, dtype=np.complex128)
    for _ in range(r):
        v = complex_normal(rng, n)
        term = v
        for _ in range(order - 1):
            term = outer(term, v)
        t += term
    return t


@dataclass(frozen=True)
class Mask:
    """Observed entries of a tensor, stored as sorted Fortran-order flat
    indices (distinct by construction)."""

    dims: tuple
    flat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        flat = np.asarray(self.flat, dtype=np.int64)
        object.__setattr__(self, "flat", flat)
        total = int(np.prod(self.dims, dtype=np.int64))
        if flat.size and (flat.min() < 0 or flat.max() >= total):
            raise ValueError("mask indices out of range")
        if np.unique(flat).size != flat.size:
            raise ValueError("mask indices must be distinct")

    @property
    def count(self) -> int:
        return int(self.flat.size)

    def multi_indices(self) -> tuple:
        """Per-axis index arrays of the observed entries."""
        return np.unravel_index(self.flat, self.dims, order="F")

    def observe(self, t) -> np.ndarray:
        """Values of t at the observed entries."""
        t = as_tensor(t)
        if t.shape != self.dims:
            raise ValueError(f"tensor dims {t.shape} != mask dims {self.dims}")
        return t.reshape(-1, order="F")[self.flat]

    def fill(self, values) -> np.ndarray:
        """Tensor with the observed values in place and zeros elsewhere."""
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (self.count,):
            raise ValueError(f"expected {self.count} values, got shape {values.shape}")
        out = np.zeros(int(np.prod(self.dims, dtype=np.int64)), dtype=np.complex128)
        out[self.flat] = values
        return out.reshape(self.dims, order="F")


def gen_mask(dims, ratio: float, seed: int) -> Mask:
    """Uniform mask without replacement observing round(ratio * prod(dims))
    entries."""
    dims = tuple(int(n) for n in dims)
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"ratio must be in [0, 1], got {ratio}")
    total = int(np.prod(dims, dtype=np.int64))
    count = int(round(ratio * total))
    rng = np.random.default_rng([seed, _MASK])
    flat = np.sort(rng.choice(total, size=count, replace=False))
    return Mask(dims=dims, flat=flat)


def gen_sparse_noise(dims, density: float, seed: int) -> np.ndarray:
    """Tensor with exactly round(density * prod(dims)) complex normal
    entries at uniform positions, zero elsewhere."""
    dims = tuple(int(n) for n in dims)
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    total = int(np.prod(dims, dtype=np.int64))
    count = int(round(density * total))
    rng = np.random.default_rng([seed, _NOISE])
    pos = rng.choice(total, size=count, replace=False)
    out = np.zeros(total, dtype=np.complex128)
    out[pos] = complex_normal(rng, count)
    return out.reshape(dims, order="F")
