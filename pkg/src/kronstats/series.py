"""Truncated Gram-Charlier density expansions and characteristic functions.

A truncated expansion around a reference density ``psi`` evaluates

    f(x) = sum_{k=0}^{K} (-1)^k / k! * < alpha(k), psi^(k)(x) >

where the coefficient vectors ``alpha(k)`` are built from the orderwise
cumulant differences between the target and the reference
(:func:`kronstats.cumulants.alpha_from_delta`).  With a Gaussian reference
matched in mean and covariance this is the classical Gram-Charlier A series;
with an arbitrary Gaussian-mixture reference it is the generalized form.

Models carry an affine map into *working coordinates* (zero mean, identity
covariance for fitted data); densities are reported in raw coordinates via
the Jacobian factor.  Truncated series values may be negative; nothing is
clipped, and :func:`negative_mass_fraction` quantifies the effect.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import factorial
from typing import Callable

import numpy as np
from scipy.linalg import solve_triangular

from .cumulants import (
    CumulantDelta,
    CumulantSet,
    ExpansionCoefficients,
    MomentSet,
    alpha_from_delta,
    cumulant_delta,
    cumulants_from_moments,
    gaussian_cumulants,
    moments_from_cumulants,
    transform_cumulants,
)
from .errors import InputError, NumericalError, ShapeError
from .gauss import GaussianParams, gaussian_derivative, gaussian_pdf, hermite_identity
from .kron import KronVector, apply_matrix_modewise, kron_power

WEIGHT_SUM_TOL = 1e-12

__all__ = [
    "AffineMap",
    "ReferenceDensity",
    "ExpansionModel",
    "reference_derivative",
    "ggc_density",
    "gca_model",
    "gca_density",
    "char_fn_series",
    "char_fn_ggc",
    "model_char_fn",
    "negative_mass_fraction",
]


@dataclass(frozen=True)
class AffineMap:
    """Invertible affine map ``z = A x + b`` with its log |det A| cached."""

    a: np.ndarray
    b: np.ndarray
    log_abs_det_a: float

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float).ravel()
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] != b.size:
            raise ShapeError(f"inconsistent affine map shapes {a.shape}, {b.shape}")
        a = a.copy()
        b = b.copy()
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "log_abs_det_a", float(self.log_abs_det_a))

    @property
    def dim(self) -> int:
        return self.b.size

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        return cls(np.eye(dim), np.zeros(dim), 0.0)

    @classmethod
    def from_matrix(cls, a: np.ndarray, b: np.ndarray) -> "AffineMap":
        sign, logdet = np.linalg.slogdet(np.asarray(a, dtype=float))
        if sign == 0:
            raise NumericalError("affine map matrix is singular")
        return cls(a, b, float(logdet))

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        return self.a @ x + self.b

    def invert(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float).ravel()
        return np.linalg.solve(self.a, z - self.b)

    def jacobian(self) -> float:
        return float(np.exp(self.log_abs_det_a))

    def to_dict(self) -> dict:
        return {
            "A": self.a.tolist(),
            "b": self.b.tolist(),
            "log_abs_det_A": self.log_abs_det_a,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "AffineMap":
        return cls(
            np.asarray(obj["A"], dtype=float),
            np.asarray(obj["b"], dtype=float),
            float(obj["log_abs_det_A"]),
        )


@dataclass(frozen=True)
class ReferenceDensity:
    """Gaussian or Gaussian-mixture reference with analytic derivative vectors."""

    kind: str
    components: tuple[GaussianParams, ...]
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.kind not in ("gaussian", "gaussian_mixture"):
            raise InputError(f"unsupported reference kind {self.kind!r}")
        if not self.components:
            raise ShapeError("reference needs at least one component")
        d = self.components[0].dim
        for g in self.components:
            if g.dim != d:
                raise ShapeError("mixture components disagree on dimension")
        w = np.asarray(self.weights, dtype=float).ravel()
        if self.kind == "gaussian" and (len(self.components) != 1 or w.size != 1):
            raise ShapeError("kind 'gaussian' must have exactly one component")
        if w.size != len(self.components):
            raise ShapeError("one weight per component required")
        if np.any(w <= 0.0):
            raise InputError("mixture weights must be positive")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise InputError(f"mixture weights sum to {w.sum()!r}, expected 1")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @classmethod
    def gaussian(cls, g: GaussianParams) -> "ReferenceDensity":
        return cls("gaussian", (g,), np.ones(1))

    @classmethod
    def standard_gaussian(cls, dim: int) -> "ReferenceDensity":
        return cls.gaussian(GaussianParams.standard(dim))

    @classmethod
    def mixture(cls, weights, components) -> "ReferenceDensity":
        return cls("gaussian_mixture", tuple(components), np.asarray(weights, dtype=float))

    def pdf(self, x: np.ndarray) -> float:
        return float(
            sum(w * gaussian_pdf(x, g) for w, g in zip(self.weights, self.components))
        )

    def derivative(self, x: np.ndarray, k: int) -> KronVector:
        acc = None
        for w, g in zip(self.weights, self.components):
            term = gaussian_derivative(x, k, g)
            acc = w * term.data if acc is None else acc + w * term.data
        return KronVector(self.dim, k, acc)

    def cumulants(self, max_order: int) -> CumulantSet:
        """Cumulant vectors of the reference law up to ``max_order``.

        A single Gaussian has closed-form cumulants; a mixture mixes the
        component moment vectors and converts back.
        """
        if len(self.components) == 1:
            g = self.components[0]
            return gaussian_cumulants(g.mean, g.cov, max_order)
        mixed: dict[int, np.ndarray] = {}
        for w, g in zip(self.weights, self.components):
            mk = moments_from_cumulants(gaussian_cumulants(g.mean, g.cov, max_order))
            for k in mk.orders():
                mixed[k] = mixed.get(k, 0.0) + w * mk[k].data
        moments = MomentSet(
            self.dim,
            max_order,
            {k: KronVector(self.dim, k, v) for k, v in mixed.items()},
        )
        return cumulants_from_moments(moments)

    def char_fn(self, lam: np.ndarray) -> complex:
        """Characteristic function: mixture of exp(i mu'lam - lam'C lam / 2)."""
        lam = np.asarray(lam, dtype=float).ravel()
        out = 0.0 + 0.0j
        for w, g in zip(self.weights, self.components):
            out += w * np.exp(1j * float(g.mean @ lam) - 0.5 * float(lam @ g.cov @ lam))
        return complex(out)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "weights": self.weights.tolist(),
            "components": [
                {"mean": g.mean.tolist(), "cov": g.cov.tolist()} for g in self.components
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ReferenceDensity":
        comps = tuple(
            GaussianParams(np.asarray(c["mean"], dtype=float), np.asarray(c["cov"], dtype=float))
            for c in obj["components"]
        )
        return cls(obj["kind"], comps, np.asarray(obj["weights"], dtype=float))


def reference_derivative(ref: ReferenceDensity, x: np.ndarray, k: int) -> KronVector:
    """Order-``k`` derivative vector of the reference density at ``x``."""
    return ref.derivative(x, k)


@dataclass(frozen=True)
class ExpansionModel:
    """A truncated expansion: coefficients, reference, and the standardizing map.

    ``transform`` maps raw coordinates to the working coordinates in which the
    reference and the coefficient vectors live; evaluation multiplies by
    |det A| to report a raw-coordinate density.
    """

    dim: int
    max_order: int
    coefficients: ExpansionCoefficients
    reference: ReferenceDensity
    transform: AffineMap | None = None

    def __post_init__(self) -> None:
        transform = self.transform if self.transform is not None else AffineMap.identity(self.dim)
        if self.coefficients.dim != self.dim or self.reference.dim != self.dim:
            raise ShapeError("model pieces disagree on dimension")
        if transform.dim != self.dim:
            raise ShapeError("transform dimension does not match model")
        if self.coefficients.max_order != self.max_order:
            raise ShapeError(
                f"coefficients go to order {self.coefficients.max_order}, "
                f"model declares {self.max_order}"
            )
        object.__setattr__(self, "transform", transform)

    def density(self, x: np.ndarray) -> float:
        return ggc_density(self, x)

    def char_fn(self, lam: np.ndarray) -> complex:
        return model_char_fn(self, lam)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "max_order": self.max_order,
            "coefficients": {
                str(k): self.coefficients[k].data.tolist()
                for k in range(self.max_order + 1)
            },
            "reference": self.reference.to_dict(),
            "transform": self.transform.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ExpansionModel":
        try:
            dim = int(obj["dim"])
            kmax = int(obj["max_order"])
            coef_raw = obj["coefficients"]
            ref = ReferenceDensity.from_dict(obj["reference"])
            transform = AffineMap.from_dict(obj["transform"])
        except KeyError as exc:
            raise InputError(f"model JSON missing field {exc}") from exc
        alpha0 = np.asarray(coef_raw.get("0", [1.0]), dtype=float)
        if abs(float(alpha0[0]) - 1.0) > 1e-12:
            raise InputError("coefficient of order 0 must be 1")
        vectors = {
            k: KronVector(dim, k, np.asarray(coef_raw[str(k)], dtype=float))
            for k in range(1, kmax + 1)
        }
        coefficients = ExpansionCoefficients(dim, kmax, vectors)
        return cls(dim, kmax, coefficients, ref, transform)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExpansionModel":
        return cls.from_dict(json.loads(text))


def ggc_density(model: ExpansionModel, x: np.ndarray) -> float:
    """Truncated expansion density at raw-coordinate ``x``.

    May be negative; truncation artifacts are reported as-is.
    """
    z = model.transform.apply(x)
    total = 0.0
    sign = 1.0
    for k in range(model.max_order + 1):
        psi_k = model.reference.derivative(z, k)
        total += sign / factorial(k) * float(model.coefficients[k].data @ psi_k.data)
        sign = -sign
    return total * model.transform.jacobian()


def _gca_hermite_density(model: ExpansionModel, x: np.ndarray) -> float:
    """Hermite-form evaluation, valid for a single-Gaussian reference.

    Uses G(z) * sum_k < alpha(k), (L^-T)^(x)k H_k(L^-1 (z - mu); 0, I) > / k!,
    the Rodrigues rewrite of :func:`ggc_density`; kept as an independent code
    path for cross-checking.
    """
    if len(model.reference.components) != 1:
        raise ShapeError("Hermite-form evaluation requires a single Gaussian reference")
    g = model.reference.components[0]
    z = model.transform.apply(x)
    u = g.whiten(z)
    linv_t = solve_triangular(g.chol, np.eye(g.dim), lower=True).T
    total = 0.0
    for k in range(model.max_order + 1):
        h = hermite_identity(u, k)
        transported = apply_matrix_modewise(h, linv_t)
        total += float(model.coefficients[k].data @ transported.data) / factorial(k)
    return total * gaussian_pdf(z, g) * model.transform.jacobian()


def gca_model(cumulants: CumulantSet, max_order: int | None = None) -> ExpansionModel:
    """Gram-Charlier A model for a target with the given cumulant vectors.

    Standardizes through the Cholesky factor of c(2), uses the standard
    normal as the working-coordinate reference, and sets the cumulant
    differences to the target's standardized cumulants of order >= 3.
    """
    if max_order is None:
        max_order = cumulants.max_order
    if max_order > cumulants.max_order:
        raise ShapeError(
            f"requested order {max_order} exceeds available cumulants ({cumulants.max_order})"
        )
    d = cumulants.dim
    cov = cumulants.covariance()
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("second-order cumulant matrix is not positive definite") from exc
    a = np.linalg.inv(chol)
    b = -a @ cumulants.mean()
    transform = AffineMap(a, b, -float(np.sum(np.log(np.diag(chol)))))
    working = transform_cumulants(
        CumulantSet(d, max_order, {k: cumulants[k] for k in range(1, max_order + 1)}),
        a,
        b,
    )
    reference = ReferenceDensity.standard_gaussian(d)
    delta = cumulant_delta(working, reference.cumulants(max_order))
    alpha = alpha_from_delta(delta)
    return ExpansionModel(d, max_order, alpha, reference, transform)


def gca_density(
    cumulants: CumulantSet,
    x: np.ndarray,
    max_order: int | None = None,
    method: str = "derivative",
) -> float:
    """Gram-Charlier A density at ``x`` for a target with the given cumulants.

    ``method="derivative"`` evaluates the reference-derivative sum;
    ``method="hermite"`` evaluates the Hermite-polynomial form.  The two are
    algebraically identical and cross-checked in the test suite.
    """
    model = gca_model(cumulants, max_order)
    if method == "derivative":
        return ggc_density(model, x)
    if method == "hermite":
        return _gca_hermite_density(model, x)
    raise InputError(f"unknown method {method!r}")


def char_fn_series(m: MomentSet, lam: np.ndarray) -> complex:
    """Truncated characteristic function sum_k < m(k), (i lam)^(x)k > / k!."""
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size != m.dim:
        raise ShapeError(f"lambda has {lam.size} coordinates, expected {m.dim}")
    total = 0.0 + 0.0j
    for k in range(m.max_order + 1):
        powers = kron_power(lam, k)
        total += (1j**k) * float(m[k].data @ powers.data) / factorial(k)
    return complex(total)


def char_fn_ggc(
    delta: CumulantDelta,
    ref_cf: Callable[[np.ndarray], complex],
    lam: np.ndarray,
) -> complex:
    """Characteristic function of the expansion target given the reference's.

    Multiplies the reference characteristic function by
    ``exp(sum_k < delta(k), (i lam)^(x)k > / k!)`` over the available orders.
    """
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size != delta.dim:
        raise ShapeError(f"lambda has {lam.size} coordinates, expected {delta.dim}")
    exponent = 0.0 + 0.0j
    for k in delta.orders():
        powers = kron_power(lam, k)
        exponent += (1j**k) * float(delta[k].data @ powers.data) / factorial(k)
    return complex(np.exp(exponent) * ref_cf(lam))


def model_char_fn(model: ExpansionModel, lam: np.ndarray) -> complex:
    """Characteristic function of the truncated model, in raw coordinates.

    Exactly dual to :func:`ggc_density`: the coefficient-series form
    ``[sum_k < alpha(k), (i eta)^(x)k > / k!] * cf_ref(eta)`` evaluated at the
    working-coordinate frequency ``eta = A^-T lam``, with the phase of the
    shift ``b`` restored.
    """
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size != model.dim:
        raise ShapeError(f"lambda has {lam.size} coordinates, expected {model.dim}")
    a_inv = np.linalg.inv(model.transform.a)
    eta = a_inv.T @ lam
    series = 0.0 + 0.0j
    for k in range(model.max_order + 1):
        powers = kron_power(eta, k)
        series += (1j**k) * float(model.coefficients[k].data @ powers.data) / factorial(k)
    phase = np.exp(-1j * float((a_inv @ model.transform.b) @ lam))
    return complex(phase * series * model.reference.char_fn(eta))


def negative_mass_fraction(
    model: ExpansionModel,
    half_width: float = 6.0,
    points_per_axis: int = 101,
) -> float:
    """Fraction of absolute grid mass carried by negative density values.

    Evaluates the working-coordinate density on a uniform grid over
    ``[-half_width, half_width]^dim`` and returns
    ``sum |min(f, 0)| / sum |f|``; a diagnostic for truncation artifacts.
    """
    if model.dim > 3:
        raise ShapeError("grid diagnostic supports dim <= 3")
    axes = [np.linspace(-half_width, half_width, points_per_axis)] * model.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    a_inv = np.linalg.inv(model.transform.a)
    vals = np.array(
        [ggc_density(model, a_inv @ (p - model.transform.b)) for p in pts]
    )
    total = float(np.sum(np.abs(vals)))
    if total == 0.0:
        return 0.0
    return float(np.sum(np.abs(np.minimum(vals, 0.0)))) / total
