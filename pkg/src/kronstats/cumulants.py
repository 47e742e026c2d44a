"""Moment/cumulant vector sets and their mutual conversions.

Moment and cumulant vectors of order ``k`` live in the flat Kronecker layout
of :mod:`kronstats.kron`.  The two directions of conversion use the classic
binomial recursion on generating functions,

    m(k) = sum_{p=0}^{k-1} C(k-1, p) * Sym(c(k-p) (x) m(p)),
    c(k) = m(k) - sum_{p=1}^{k-1} C(k-1, p) * Sym(c(k-p) (x) m(p)),

with every product term fully symmetrized.  Symmetrization is the flat-layout
substitute for factor-reordering commutation matrices: moment and cumulant
tensors are symmetric, and averaging over mode permutations reproduces the
integer coefficients of the explicit set-partition (Bell polynomial) tables.

The same recursion converts the cumulant-difference vectors of a series
expansion into its coefficient vectors (see :func:`alpha_from_delta`), since
both pairs satisfy the same exp/log generating-function identity.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from math import comb
from pathlib import Path

import numpy as np

from .errors import ShapeError
from .kron import KronVector, apply_matrix_modewise, kron_product, kron_power, symmetrize

DEFAULT_MAX_ORDER = 6
ORDER_CAP = 10

SYMMETRY_WARN_RTOL = 1e-8

__all__ = [
    "MomentSet",
    "CumulantSet",
    "CumulantDelta",
    "ExpansionCoefficients",
    "moments_from_cumulants",
    "cumulants_from_moments",
    "cumulant_delta",
    "alpha_from_delta",
    "delta_from_alpha",
    "transform_cumulants",
    "gaussian_cumulants",
    "load_moment_table",
    "evaluate_moment_table",
]


def _symmetrized_ingest(name: str, order: int, v: KronVector) -> KronVector:
    """Symmetrize an input vector, warning if it was materially asymmetric."""
    sym = symmetrize(v)
    scale = float(np.max(np.abs(v.data)))
    if scale > 0.0:
        residual = float(np.max(np.abs(v.data - sym.data))) / scale
        if residual > SYMMETRY_WARN_RTOL:
            warnings.warn(
                f"{name} vector of order {order} has symmetrization residual "
                f"{residual:.3e}; using its symmetric part",
                stacklevel=4,
            )
    return sym


@dataclass(frozen=True)
class _VectorSet:
    """Common behavior for per-order collections of KronVectors."""

    dim: int
    max_order: int
    vectors: dict[int, KronVector] = field(repr=False)

    _min_order = 1
    _name = "vector"
    _zero_is_unit = False  # moment-like sets expose the constant [1] at order 0

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ShapeError(f"dim must be positive, got {self.dim}")
        if not self._min_order <= self.max_order <= ORDER_CAP:
            raise ShapeError(
                f"max_order must be in [{self._min_order}, {ORDER_CAP}], got {self.max_order}"
            )
        vecs = {}
        for k in range(self._min_order, self.max_order + 1):
            if k not in self.vectors:
                raise ShapeError(f"missing order-{k} {self._name} vector")
            v = self.vectors[k]
            if not isinstance(v, KronVector):
                v = KronVector(self.dim, k, np.asarray(v, dtype=float))
            if v.dim != self.dim or v.order != k:
                raise ShapeError(
                    f"order-{k} {self._name} vector has (dim, order) = "
                    f"({v.dim}, {v.order}), expected ({self.dim}, {k})"
                )
            vecs[k] = _symmetrized_ingest(self._name, k, v)
        object.__setattr__(self, "vectors", vecs)

    def __getitem__(self, order: int) -> KronVector:
        if order == 0 and self._zero_is_unit:
            return KronVector.unit(self.dim)
        try:
            return self.vectors[order]
        except KeyError as exc:
            raise ShapeError(f"order {order} not present (max_order={self.max_order})") from exc

    def orders(self) -> range:
        return range(self._min_order, self.max_order + 1)

    def to_dict(self) -> dict:
        return {
            "kind": self._name,
            "dim": self.dim,
            "max_order": self.max_order,
            "vectors": {str(k): self.vectors[k].data.tolist() for k in self.orders()},
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "_VectorSet":
        try:
            dim = int(obj["dim"])
            max_order = int(obj["max_order"])
            raw = obj["vectors"]
        except KeyError as exc:
            raise ShapeError(f"vector-set JSON missing field {exc}") from exc
        kind = obj.get("kind")
        if kind is not None and kind != cls._name:
            raise ShapeError(f"expected kind {cls._name!r}, file says {kind!r}")
        vectors = {}
        for key, data in raw.items():
            k = int(key)
            if k == 0:
                continue  # the constant [1] is implied
            vectors[k] = KronVector(dim, k, np.asarray(data, dtype=float))
        return cls(dim, max_order, vectors)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "_VectorSet":
        return cls.from_dict(json.loads(text))


class MomentSet(_VectorSet):
    """Raw moment vectors m(k) for k = 0..max_order, with m(0) = [1] implied."""

    _name = "moments"
    _zero_is_unit = True


class CumulantSet(_VectorSet):
    """Cumulant vectors c(k) for k = 1..max_order."""

    _name = "cumulants"

    def mean(self) -> np.ndarray:
        return self[1].data.copy()

    def covariance(self) -> np.ndarray:
        return self[2].as_matrix().copy()


class CumulantDelta(_VectorSet):
    """Orderwise differences between target and reference cumulant vectors."""

    _name = "cumulant-delta"


class ExpansionCoefficients(_VectorSet):
    """Series coefficient vectors alpha(k) for k = 0..max_order, alpha(0) = [1] implied."""

    _name = "coefficients"
    _zero_is_unit = True


def _binomial_recursion(lower: _VectorSet) -> dict[int, KronVector]:
    """Shared forward recursion: from cumulant-like input to moment-like output."""
    out: dict[int, KronVector] = {0: KronVector.unit(lower.dim)}
    for k in range(1, lower.max_order + 1):
        acc = np.zeros(lower.dim**k)
        for p in range(k):
            term = symmetrize(kron_product(lower[k - p], out[p]))
            acc += comb(k - 1, p) * term.data
        out[k] = KronVector(lower.dim, k, acc)
    return out


def moments_from_cumulants(c: CumulantSet) -> MomentSet:
    """Moment vectors of the distribution whose cumulant vectors are ``c``."""
    out = _binomial_recursion(c)
    del out[0]
    return MomentSet(c.dim, c.max_order, out)


def cumulants_from_moments(m: MomentSet) -> CumulantSet:
    """Cumulant vectors from moment vectors; exact inverse of :func:`moments_from_cumulants`."""
    cvecs: dict[int, KronVector] = {}
    for k in range(1, m.max_order + 1):
        acc = m[k].data.copy()
        for p in range(1, k):
            term = symmetrize(kron_product(cvecs[k - p], m[p]))
            acc -= comb(k - 1, p) * term.data
        cvecs[k] = KronVector(m.dim, k, acc)
    return CumulantSet(m.dim, m.max_order, cvecs)


def cumulant_delta(c: CumulantSet, c_ref: CumulantSet) -> CumulantDelta:
    """Orderwise difference ``c - c_ref`` between two cumulant sets."""
    if c.dim != c_ref.dim or c.max_order != c_ref.max_order:
        raise ShapeError(
            f"cumulant sets disagree: (dim, K) = ({c.dim}, {c.max_order}) vs "
            f"({c_ref.dim}, {c_ref.max_order})"
        )
    vecs = {
        k: KronVector(c.dim, k, c[k].data - c_ref[k].data) for k in c.orders()
    }
    return CumulantDelta(c.dim, c.max_order, vecs)


def alpha_from_delta(delta: CumulantDelta) -> ExpansionCoefficients:
    """Expansion coefficient vectors from cumulant differences.

    alpha relates to delta exactly as moments relate to cumulants:
    ``sum_k alpha(k)' t^(x)k / k! = exp(sum_k delta(k)' t^(x)k / k!)``.
    In particular alpha(0) = 1, and with delta(1) = delta(2) = 0 the order-6
    coefficient is ``delta(6) + 10 * Sym(delta(3) (x) delta(3))``.
    """
    out = _binomial_recursion(delta)
    del out[0]
    return ExpansionCoefficients(delta.dim, delta.max_order, out)


def delta_from_alpha(alpha: ExpansionCoefficients) -> CumulantDelta:
    """Inverse of :func:`alpha_from_delta` (the log direction of the recursion)."""
    as_moments = MomentSet(alpha.dim, alpha.max_order, dict(alpha.vectors))
    c = cumulants_from_moments(as_moments)
    return CumulantDelta(alpha.dim, alpha.max_order, dict(c.vectors))


def transform_cumulants(c: CumulantSet, a: np.ndarray, b: np.ndarray) -> CumulantSet:
    """Cumulants of ``z = A x + b`` given the cumulants of ``x``.

    The shift moves only the first order; higher orders transform by the
    modewise action of ``A``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != (c.dim, c.dim) or b.size != c.dim:
        raise ShapeError(f"affine map shapes {a.shape}, {b.shape} do not match dim {c.dim}")
    vecs = {}
    for k in c.orders():
        v = apply_matrix_modewise(c[k], a)
        if k == 1:
            v = KronVector(c.dim, 1, v.data + b)
        vecs[k] = v
    return CumulantSet(c.dim, c.max_order, vecs)


def gaussian_cumulants(mean: np.ndarray, cov: np.ndarray, max_order: int) -> CumulantSet:
    """Cumulant set of a Gaussian: mean, flattened covariance, zeros above order 2."""
    mean = np.asarray(mean, dtype=float).ravel()
    cov = np.asarray(cov, dtype=float)
    d = mean.size
    if cov.shape != (d, d):
        raise ShapeError(f"covariance shape {cov.shape} does not match dim {d}")
    vecs: dict[int, KronVector] = {1: KronVector(d, 1, mean)}
    if max_order >= 2:
        vecs[2] = KronVector.from_matrix(cov)
    for k in range(3, max_order + 1):
        vecs[k] = KronVector.zeros(d, k)
    return CumulantSet(d, max_order, vecs)


# ---------------------------------------------------------------------------
# Explicit moment-from-cumulant table (golden data file)
# ---------------------------------------------------------------------------
#
# data/moment_table.json lists, for each order k, the set-partition terms
# (integer coefficient, multiset of cumulant orders) of the explicit expansion
#   m(k) = sum_terms  coeff * Sym( c(j_1) (x) c(j_2) (x) ... )
# The file was generated once by brute-force enumeration of set partitions
# and is used by the validation suite as an independent cross-check of the
# binomial recursion.  The order-6 line contains the term 20 * c(3) (x) c(1)^(x)3,
# whose coefficient and powers were settled against the same enumeration.

def load_moment_table(path: str | Path | None = None) -> dict[int, list[tuple[int, list[int]]]]:
    """Load the explicit set-partition table mapping order -> list of (coeff, orders)."""
    if path is None:
        text = resources.files("kronstats").joinpath("data/moment_table.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    table: dict[int, list[tuple[int, list[int]]]] = {}
    for key, terms in raw.items():
        table[int(key)] = [(int(coeff), [int(j) for j in orders]) for coeff, orders in terms]
    return table


def evaluate_moment_table(
    c: CumulantSet, table: dict[int, list[tuple[int, list[int]]]] | None = None
) -> MomentSet:
    """Evaluate the explicit table on a cumulant set (alternative to the recursion)."""
    if table is None:
        table = load_moment_table()
    if c.max_order > max(table):
        raise ShapeError(
            f"table covers orders up to {max(table)}, set has max_order {c.max_order}"
        )
    vecs = {}
    for k in c.orders():
        acc = np.zeros(c.dim**k)
        for coeff, orders in table[k]:
            prod = c[orders[0]]
            for j in orders[1:]:
                prod = kron_product(prod, c[j])
            acc += coeff * symmetrize(prod).data
        vecs[k] = KronVector(c.dim, k, acc)
    return MomentSet(c.dim, c.max_order, vecs)
