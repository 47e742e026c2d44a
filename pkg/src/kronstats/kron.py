"""Flat-vector Kronecker tensor algebra.

An order-``k`` tensor over dimension ``d`` is stored as a single array of
length ``d**k`` in row-major multi-index layout: position
``p = sum_j i_j * d**(k-j)``, so the *left* factor of a Kronecker product
varies slowest.  This layout is the wire format used throughout the package
(JSON files, CSV evaluation tables) and matches ``numpy.kron`` on 1-D inputs.

Commutation matrices never appear explicitly; reordering the factors of a
Kronecker product is done by permuting tensor modes in place, and the
symmetrizer averages over all mode permutations.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from itertools import permutations as _iter_permutations
from functools import lru_cache

import numpy as np

from .errors import BudgetError, ShapeError

DEFAULT_ENTRY_BUDGET = 10_000_000
MAX_SYMMETRIZE_ORDER = 10

__all__ = [
    "KronVector",
    "MultiIndex",
    "ModePermutation",
    "entry_budget",
    "check_entry_budget",
    "multi_index_to_position",
    "position_to_multi_index",
    "kron_product",
    "kron_power",
    "symmetrize",
    "permute_modes",
    "apply_matrix_modewise",
]


def entry_budget() -> int:
    """Maximum number of tensor entries an operation may allocate.

    Defaults to 10**7 and can be overridden through the ``KRON_BUDGET``
    environment variable.
    """
    raw = os.environ.get("KRON_BUDGET")
    if raw is None:
        return DEFAULT_ENTRY_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise BudgetError(f"KRON_BUDGET must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise BudgetError(f"KRON_BUDGET must be positive, got {value}")
    return value


def check_entry_budget(dim: int, order: int) -> int:
    """Return ``dim**order`` after checking it against the entry budget."""
    size = dim**order
    budget = entry_budget()
    if size > budget:
        raise BudgetError(
            f"order-{order} tensor over dimension {dim} needs {size} entries, "
            f"budget is {budget} (override with KRON_BUDGET)"
        )
    return size


@dataclass(frozen=True)
class KronVector:
    """Order-``order`` tensor over dimension ``dim`` as a flat length ``dim**order`` array."""

    dim: int
    order: int
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ShapeError(f"dim must be positive, got {self.dim}")
        if self.order < 0:
            raise ShapeError(f"order must be non-negative, got {self.order}")
        data = np.asarray(self.data, dtype=float).ravel()
        expected = check_entry_budget(self.dim, self.order)
        if data.size != expected:
            raise ShapeError(
                f"data length {data.size} does not match dim**order = "
                f"{self.dim}**{self.order} = {expected}"
            )
        if not np.all(np.isfinite(data)):
            raise ShapeError("KronVector entries must be finite")
        data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def size(self) -> int:
        return self.data.size

    def as_tensor(self) -> np.ndarray:
        """Read-only view of shape ``(dim,) * order``."""
        return self.data.reshape((self.dim,) * self.order)

    def as_matrix(self) -> np.ndarray:
        """Reshape an order-2 vector to its ``dim x dim`` matrix."""
        if self.order != 2:
            raise ShapeError(f"as_matrix requires order 2, got {self.order}")
        return self.data.reshape(self.dim, self.dim)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "order": self.order, "data": self.data.tolist()}

    @classmethod
    def from_dict(cls, obj: dict) -> "KronVector":
        try:
            return cls(int(obj["dim"]), int(obj["order"]), np.asarray(obj["data"], dtype=float))
        except KeyError as exc:
            raise ShapeError(f"KronVector JSON missing field {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "KronVector":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "KronVector":
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {m.shape}")
        return cls(m.shape[0], 2, m.ravel())

    @classmethod
    def unit(cls, dim: int) -> "KronVector":
        """The order-0 tensor [1]."""
        return cls(dim, 0, np.ones(1))

    @classmethod
    def zeros(cls, dim: int, order: int) -> "KronVector":
        return cls(dim, order, np.zeros(check_entry_budget(dim, order)))


@dataclass(frozen=True)
class MultiIndex:
    """Coordinate address ``(i_1, ..., i_k)`` of one entry, each index in ``[0, dim)``."""

    dim: int
    order: int
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = tuple(int(i) for i in self.indices)
        if len(idx) != self.order:
            raise ShapeError(f"expected {self.order} indices, got {len(idx)}")
        for i in idx:
            if not 0 <= i < self.dim:
                raise ShapeError(f"index {i} out of range [0, {self.dim})")
        object.__setattr__(self, "indices", idx)


def multi_index_to_position(m: MultiIndex) -> int:
    """Flat position of a multi-index; the leftmost index varies slowest."""
    pos = 0
    for i in m.indices:
        pos = pos * m.dim + i
    return pos


def position_to_multi_index(dim: int, order: int, position: int) -> MultiIndex:
    """Inverse of :func:`multi_index_to_position`."""
    size = dim**order
    if not 0 <= position < size:
        raise ShapeError(f"position {position} out of range [0, {size})")
    idx = []
    for _ in range(order):
        position, r = divmod(position, dim)
        idx.append(r)
    return MultiIndex(dim, order, tuple(reversed(idx)))


@dataclass(frozen=True)
class ModePermutation:
    """Permutation of tensor modes; ``perm`` is 1-based, a bijection on {1..order}."""

    order: int
    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(1, self.order + 1)):
            raise ShapeError(f"perm {perm} is not a bijection on 1..{self.order}")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, order: int) -> "ModePermutation":
        return cls(order, tuple(range(1, order + 1)))

    @classmethod
    def swap(cls, order: int, a: int, b: int) -> "ModePermutation":
        perm = list(range(1, order + 1))
        perm[a - 1], perm[b - 1] = perm[b - 1], perm[a - 1]
        return cls(order, tuple(perm))

    def compose(self, other: "ModePermutation") -> "ModePermutation":
        """Composition (self after other): apply ``other`` first, then ``self``."""
        if self.order != other.order:
            raise ShapeError("cannot compose permutations of different order")
        return ModePermutation(self.order, tuple(self.perm[q - 1] for q in other.perm))


def _require_same_dim(a: KronVector, b: KronVector) -> None:
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch: {a.dim} vs {b.dim}")


def kron_product(a: KronVector, b: KronVector) -> KronVector:
    """Kronecker product; the result has order ``a.order + b.order``.

    Bilinear and associative; entry at multi-index ``(I, J)`` is
    ``a[I] * b[J]``.
    """
    _require_same_dim(a, b)
    check_entry_budget(a.dim, a.order + b.order)
    return KronVector(a.dim, a.order + b.order, np.kron(a.data, b.data))


def kron_power(x: np.ndarray, k: int) -> KronVector:
    """k-fold Kronecker power of a vector with itself; ``k = 0`` gives [1]."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 1:
        raise ShapeError("kron_power needs a non-empty vector")
    if k < 0:
        raise ShapeError(f"order must be non-negative, got {k}")
    d = x.size
    check_entry_budget(d, k)
    out = np.ones(1)
    for _ in range(k):
        out = np.kron(out, x)
    return KronVector(d, k, out)


def symmetrize(v: KronVector) -> KronVector:
    """Average over all mode permutations; projects onto symmetric tensors.

    Each permutation class of multi-indices is hit by the same number of the
    ``order!`` mode permutations, so the average is computed once per class
    and broadcast; the output is exactly symmetric and exactly-symmetric
    inputs are returned unchanged, making the projection an exact idempotent.
    """
    k = v.order
    if k > MAX_SYMMETRIZE_ORDER:
        raise BudgetError(
            f"symmetrize order {k} exceeds the cap of {MAX_SYMMETRIZE_ORDER}"
        )
    if k < 2:
        return v
    arr = v.as_tensor()
    if all(np.array_equal(arr, arr.swapaxes(i, i + 1)) for i in range(k - 1)):
        return v
    d = v.dim
    idx = np.stack(np.unravel_index(np.arange(v.size), (d,) * k))
    key = np.sort(idx, axis=0)
    enc = np.zeros(v.size, dtype=np.int64)
    for row in key:
        enc = enc * d + row
    _, inverse = np.unique(enc, return_inverse=True)
    sums = np.bincount(inverse, weights=v.data)
    counts = np.bincount(inverse)
    return KronVector(v.dim, k, (sums / counts)[inverse])


def permute_modes(v: KronVector, p: ModePermutation) -> KronVector:
    """Reorder tensor modes: ``out[(i_1..i_k)] = v[(i_p(1), ..., i_p(k))]``.

    This is the in-place action of a commutation matrix on the flat layout;
    e.g. applying ``perm=(1, 3, 2)`` to ``a (x) b (x) c`` yields ``a (x) c (x) b``.
    """
    if p.order != v.order:
        raise ShapeError(f"permutation order {p.order} != tensor order {v.order}")
    if v.order < 2:
        return v
    q = [i - 1 for i in p.perm]
    axes = np.argsort(q)
    return KronVector(v.dim, v.order, v.as_tensor().transpose(axes).ravel())


def apply_matrix_modewise(v: KronVector, m: np.ndarray) -> KronVector:
    """Apply a ``dim x dim`` matrix to every tensor mode (the k-fold Kronecker action of M).

    Computed as ``order`` successive mode contractions (cost ``order * dim**(order+1)``)
    instead of materializing the ``dim**order`` square matrix.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (v.dim, v.dim):
        raise ShapeError(f"matrix shape {m.shape} does not match dim {v.dim}")
    k = v.order
    if k == 0:
        return v
    d = v.dim
    arr = v.data
    for mode in range(k):
        arr = arr.reshape(d**mode, d, d ** (k - mode - 1))
        arr = np.einsum("ij,ajb->aib", m, arr)
    return KronVector(v.dim, k, arr.ravel())
