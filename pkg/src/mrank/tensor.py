"""Dense complex tensors and their matricizations.

Tensors are plain complex128 ndarrays. All flattening in this package is
first-index-fastest (Fortran order), so ``vec(t) == t.reshape(-1, order="F")``
and the entry at multi-index (i_1, ..., i_D) sits at flat position
``i_1 + i_2*n_1 + i_3*n_1*n_2 + ...`` (0-based).

Contents:
    Pairing             -- a balanced split of the 2d axes into a row group
                           and a column group
    canonical_pairings  -- the C(2d,d)/2 splits with axis 0 pinned to rows
    vec / unvec         -- Fortran-order flattening and its inverse
    permute             -- axis permutation (numpy transpose semantics)
    outer               -- tensor (outer) product
    square_unfold/fold  -- balanced matricization for a pairing, and inverse
    mode_unfold/fold    -- single-mode matricization (mode as column index)
    symmetrize          -- average over all axis permutations
    is_super_symmetric  -- invariance under every axis permutation
"""

from dataclasses import dataclass
from itertools import combinations, permutations
from math import factorial

import numpy as np

__all__ = [
    "Pairing",
    "as_tensor",
    "canonical_pairings",
    "vec",
    "unvec",
    "permute",
    "outer",
    "square_unfold",
    "square_fold",
    "mode_unfold",
    "mode_fold",
    "symmetrize",
    "is_super_symmetric",
]


def as_tensor(t) -> np.ndarray:
    """Coerce input to a complex128 ndarray."""
    return np.asarray(t, dtype=np.complex128)


@dataclass(frozen=True)
class Pairing:
    """A balanced split of 2d tensor axes into row and column groups.

    Axes are 0-based internally; the text form ("1,2|3,4") is 1-based to
    match the usual table notation. A pairing is canonical when both groups
    are ascending and axis 0 is in the row group; `canonicalize` maps any
    valid split there (transposing the unfolding, which preserves rank).
    """

    row: tuple
    col: tuple

    def __post_init__(self):
        row, col = tuple(self.row), tuple(self.col)
        object.__setattr__(self, "row", row)
        object.__setattr__(self, "col", col)
        order = len(row) + len(col)
        if len(row) != len(col):
            raise ValueError(f"row/col groups must have equal size, got {row}|{col}")
        if sorted(row + col) != list(range(order)):
            raise ValueError(f"groups must partition 0..{order - 1}, got {row}|{col}")

    @property
    def order(self) -> int:
        return len(self.row) + len(self.col)

    @classmethod
    def default(cls, order: int) -> "Pairing":
        """First half of the axes as rows, second half as columns."""
        if order % 2:
            raise ValueError(f"order must be even, got {order}")
        d = order // 2
        return cls(tuple(range(d)), tuple(range(d, order)))

    @classmethod
    def parse(cls, text: str, order: int | None = None) -> "Pairing":
        """Parse the 1-based text form, e.g. "1,3|2,4"."""
        try:
            row_s, col_s = text.split("|")
            row = tuple(int(x) - 1 for x in row_s.replace("{", "").split(","))
            col = tuple(int(x) - 1 for x in col_s.replace("}", "").split(","))
        except Exception as exc:
            raise ValueError(f"cannot parse pairing {text!r}") from exc
        pr = cls(row, col)
        if order is not None and pr.order != order:
            raise ValueError(f"pairing {text!r} has order {pr.order}, expected {order}")
        return pr

    def __str__(self) -> str:
        return ",".join(str(a + 1) for a in self.row) + "|" + ",".join(
            str(a + 1) for a in self.col
        )

    def canonicalize(self) -> "Pairing":
        row, col = tuple(sorted(self.row)), tuple(sorted(self.col))
        if 0 in col:
            row, col = col, row
        return Pairing(row, col)

    def matrix_shape(self, dims) -> tuple:
        dims = tuple(dims)
        return (
            int(np.prod([dims[a] for a in self.row], dtype=np.int64)),
            int(np.prod([dims[a] for a in self.col], dtype=np.int64)),
        )


def canonical_pairings(order: int) -> list:
    """All canonical balanced pairings of `order` axes.

    Swapping the two groups transposes the unfolding and reordering within a
    group permutes rows or columns, so only splits with axis 0 in the row
    group are distinct for rank purposes: C(2d, d)/2 of them.
    """
    if order % 2 or order < 2:
        raise ValueError(f"order must be even and >= 2, got {order}")
    d = order // 2
    out = []
    for rest in combinations(range(1, order), d - 1):
        row = (0,) + rest
        col = tuple(a for a in range(order) if a not in row)
        out.append(Pairing(row, col))
    return out


def vec(t) -> np.ndarray:
    """Flatten first-index-fastest."""
    return as_tensor(t).reshape(-1, order="F")


def unvec(v, dims) -> np.ndarray:
    v = as_tensor(v)
    dims = tuple(int(n) for n in dims)
    if v.size != int(np.prod(dims, dtype=np.int64)):
        raise ValueError(f"cannot reshape {v.size} entries to dims {dims}")
    return v.reshape(dims, order="F")


def permute(t, axes) -> np.ndarray:
    """Permute axes: result[i_1..i_D] = t[i_{axes[1]}..i_{axes[D]}] (0-based)."""
    t = as_tensor(t)
    axes = tuple(int(a) for a in axes)
    if sorted(axes) != list(range(t.ndim)):
        raise ValueError(f"axes {axes} is not a permutation of 0..{t.ndim - 1}")
    return np.transpose(t, axes)


def outer(a, b) -> np.ndarray:
    """Tensor product: dims concatenate, entries multiply."""
    return np.multiply.outer(as_tensor(a), as_tensor(b))


def square_unfold(t, pairing: Pairing | None = None) -> np.ndarray:
    """Balanced matricization of an even-order tensor.

    Row index merges the pairing's row-group indices first-index-fastest,
    column index likewise for the column group. With the default pairing
    (first half | second half) the matrix reuses the tensor's own Fortran
    layout, so unfold followed by fold is a bitwise round trip.
    """
    t = as_tensor(t)
    if t.ndim % 2:
        raise ValueError(f"square unfolding needs even order, got {t.ndim}")
    pr = Pairing.default(t.ndim) if pairing is None else pairing
    if pr.order != t.ndim:
        raise ValueError(f"pairing order {pr.order} != tensor order {t.ndim}")
    nrow, ncol = pr.matrix_shape(t.shape)
    return np.transpose(t, pr.row + pr.col).reshape(nrow, ncol, order="F")


def square_fold(m, dims, pairing: Pairing | None = None) -> np.ndarray:
    """Inverse of `square_unfold` for the given dims and pairing."""
    m = as_tensor(m)
    dims = tuple(int(n) for n in dims)
    pr = Pairing.default(len(dims)) if pairing is None else pairing
    if m.shape != pr.matrix_shape(dims):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims} under {pr}")
    perm_dims = tuple(dims[a] for a in pr.row + pr.col)
    t = m.reshape(perm_dims, order="F")
    return np.transpose(t, np.argsort(pr.row + pr.col))


def mode_unfold(t, mode: int) -> np.ndarray:
    """Single-mode matricization with the mode index as the column index.

    Rows merge the remaining indices in their original relative order,
    first-index-fastest. For an order-2 tensor, mode 0 gives the transpose
    and mode 1 the matrix itself.
    """
    t = as_tensor(t)
    if not 0 <= mode < t.ndim:
        raise ValueError(f"mode {mode} out of range for order {t.ndim}")
    return np.moveaxis(t, mode, -1).reshape(-1, t.shape[mode], order="F")


def mode_fold(m, dims, mode: int) -> np.ndarray:
    """Inverse of `mode_unfold` for the given dims."""
    m = as_tensor(m)
    dims = tuple(int(n) for n in dims)
    if not 0 <= mode < len(dims):
        raise ValueError(f"mode {mode} out of range for dims {dims}")
    rest = tuple(n for i, n in enumerate(dims) if i != mode)
    if m.shape != (int(np.prod(rest, dtype=np.int64)) if rest else 1, dims[mode]):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims} at mode {mode}")
    return np.moveaxis(m.reshape(rest + (dims[mode],), order="F"), -1, mode)


def symmetrize(t) -> np.ndarray:
    """Average over all axis permutations (orthogonal projection onto the
    super-symmetric subspace). Requires equal dims."""
    t = as_tensor(t)
    if len(set(t.shape)) > 1:
        raise ValueError(f"symmetrize needs equal dims, got {t.shape}")
    out = np.zeros_like(t)
    for p in permutations(range(t.ndim)):
        out += np.transpose(t, p)
    return out / factorial(t.ndim)


def is_super_symmetric(t, tol: float = 1e-8) -> bool:
    """True iff every adjacent-transposition image of t differs by at most
    tol * max(1, ||t||_F). Adjacent transpositions generate the full
    permutation group, so this checks invariance under all of it."""
    t = as_tensor(t)
    if len(set(t.shape)) > 1:
        return False
    bound = tol * max(1.0, float(np.linalg.norm(t)))
    for j in range(t.ndim - 1):
        if np.linalg.norm(t - np.swapaxes(t, j, j + 1)) > bound:
            return False
    return True
