"""Quadrature evaluation of the integral forms behind the expansion machinery.

These operations reconstruct, by direct numerical integration over a
truncated frequency domain, quantities the rest of the package computes in
closed form:

* the density of a law with only first- and second-order cumulants (a
  Gaussian) from its oscillatory integral representation;
* the order-``k`` derivative vectors of a Gaussian density, whose integrand
  picks up a phase shift of ``k pi / 2``;
* the identity-covariance Hermite vectors from their integral form
  ``2^(k/2) pi^(-d/2) exp(x'x/2) Int u^(x)k exp(-u'u) cos(sqrt(2) x'u - k pi/2) du``.

Every operation re-evaluates itself on a grid with doubled resolution and
raises :class:`AccuracyError` when the two disagree, rather than returning a
silently under-resolved value.  Supported for dimensions 1 and 2, where a
tensor-product rule is adequate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cumulants import CumulantSet
from .errors import AccuracyError, InputError, ShapeError
from .gauss import GaussianParams
from .kron import KronVector, check_entry_budget

MIN_POINTS_PER_AXIS = 32

PDF_TOL = 1e-6
DERIVATIVE_TOL = 1e-5
HERMITE_TOL = 1e-5
RICHARDSON_FACTOR = 10.0

__all__ = [
    "QuadratureGrid",
    "pdf_from_cumulants_quadrature",
    "gaussian_derivative_quadrature",
    "hermite_integral_quadrature",
    "inverse_fourier_1d",
]


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor-product rule on ``[-half_width, half_width]^dim`` (dim <= 2)."""

    dim: int
    half_width: float
    points_per_axis: int
    rule: str = "gauss_legendre"

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ShapeError(f"quadrature grids support dim 1 or 2, got {self.dim}")
        if self.half_width <= 0:
            raise ShapeError("half_width must be positive")
        if self.points_per_axis < MIN_POINTS_PER_AXIS:
            raise ShapeError(
                f"points_per_axis must be >= {MIN_POINTS_PER_AXIS}, got {self.points_per_axis}"
            )
        if self.rule not in ("gauss_legendre", "trapezoid"):
            raise InputError(f"unknown quadrature rule {self.rule!r}")
        check_entry_budget(self.points_per_axis, self.dim)

    def axis_nodes_weights(self, lo: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        lo = -self.half_width if lo is None else lo
        hi = self.half_width
        if self.rule == "gauss_legendre":
            t, w = np.polynomial.legendre.leggauss(self.points_per_axis)
            nodes = 0.5 * (t + 1.0) * (hi - lo) + lo
            weights = 0.5 * (hi - lo) * w
        else:
            nodes = np.linspace(lo, hi, self.points_per_axis)
            h = nodes[1] - nodes[0]
            weights = np.full(self.points_per_axis, h)
            weights[0] = weights[-1] = 0.5 * h
        return nodes, weights

    def nodes_weights(self, lo: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Flattened nodes of shape (N, dim) and weights of shape (N,)."""
        nodes, weights = self.axis_nodes_weights(lo)
        if self.dim == 1:
            return nodes[:, None], weights
        n1, n2 = np.meshgrid(nodes, nodes, indexing="ij")
        pts = np.stack([n1.ravel(), n2.ravel()], axis=1)
        return pts, np.outer(weights, weights).ravel()

    def refined(self) -> "QuadratureGrid":
        return QuadratureGrid(self.dim, self.half_width, 2 * self.points_per_axis, self.rule)

    @classmethod
    def default_for_cov(cls, cov: np.ndarray) -> "QuadratureGrid":
        """Frequency-domain grid for integrands damped by exp(-lam' C lam / 2).

        The damping scale along axis i is 1 / sqrt(C_ii), so the half-width
        is 8 over the smallest marginal standard deviation.
        """
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        d = cov.shape[0]
        half_width = 8.0 / float(np.min(np.sqrt(np.diag(cov))))
        return cls(d, half_width, 256 if d == 1 else 128)

    @classmethod
    def default_unit(cls, dim: int) -> "QuadratureGrid":
        """Grid for integrands damped by exp(-u'u)."""
        return cls(dim, 6.0, 256 if dim == 1 else 128)


def _node_kron_powers(pts: np.ndarray, k: int) -> np.ndarray:
    """Row-wise Kronecker powers: shape (N, dim**k)."""
    n, d = pts.shape
    check_entry_budget(d, k)
    out = np.ones((n, 1))
    for _ in range(k):
        out = np.einsum("na,nj->naj", out, pts).reshape(n, -1)
    return out


def _richardson(coarse: np.ndarray, fine: np.ndarray, guard: float, label: str) -> np.ndarray:
    drift = float(np.max(np.abs(fine - coarse)))
    scale = max(float(np.max(np.abs(fine))), 1.0)
    if drift > guard * scale:
        raise AccuracyError(
            f"{label}: doubling the grid moved the result by {drift:.3e} "
            f"(guard {guard * scale:.3e}); refine the grid"
        )
    return fine


def _pdf_integral(c: CumulantSet, x: np.ndarray, grid: QuadratureGrid, half_domain: bool) -> float:
    mean = c.mean()
    cov = c.covariance()
    if half_domain:
        pts, w = grid.nodes_weights(lo=0.0)
        factor = 2.0
    else:
        pts, w = grid.nodes_weights()
        factor = 1.0
    damp = np.exp(-0.5 * np.einsum("ni,ij,nj->n", pts, cov, pts))
    phase = np.cos(pts @ (x - mean))
    return factor * float(np.sum(w * damp * phase)) / (2.0 * np.pi) ** c.dim


def pdf_from_cumulants_quadrature(
    c: CumulantSet,
    x: np.ndarray,
    grid: QuadratureGrid | None = None,
    half_domain: bool = False,
    self_check: bool = True,
) -> float:
    """Density value reconstructed from the cumulant integral representation.

    Only cumulant sets with c(k) = 0 for all k >= 3 are supported: with
    nonzero higher cumulants the truncated integrand is undamped and the
    integral may diverge.  ``half_domain`` integrates over non-negative
    frequencies with the evenness factor 2 (dimension 1 only).
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size != c.dim:
        raise ShapeError(f"point has {x.size} coordinates, expected {c.dim}")
    for k in c.orders():
        if k >= 3 and np.any(c[k].data != 0.0):
            raise InputError(
                f"cumulants of order {k} are nonzero; the integral form is only "
                "evaluated for laws with vanishing cumulants above order 2"
            )
    # PD check up front so failures are not blamed on the grid
    GaussianParams(c.mean(), c.covariance())
    if half_domain and c.dim != 1:
        raise ShapeError(
            "half-domain evaluation relies on per-axis evenness, which holds "
            "only in dimension 1 for general means"
        )
    if grid is None:
        grid = QuadratureGrid.default_for_cov(c.covariance())
    coarse = _pdf_integral(c, x, grid, half_domain)
    if not self_check:
        return coarse
    fine = _pdf_integral(c, x, grid.refined(), half_domain)
    return float(
        _richardson(
            np.array([coarse]), np.array([fine]), RICHARDSON_FACTOR * PDF_TOL, "pdf quadrature"
        )[0]
    )


def _derivative_integral(
    x: np.ndarray, k: int, g: GaussianParams, grid: QuadratureGrid
) -> np.ndarray:
    pts, w = grid.nodes_weights()
    damp = np.exp(-0.5 * np.einsum("ni,ij,nj->n", pts, g.cov, pts))
    phase = np.cos(pts @ (x - g.mean) + 0.5 * k * np.pi)
    powers = _node_kron_powers(pts, k)
    return (w * damp * phase) @ powers / (2.0 * np.pi) ** g.dim


def gaussian_derivative_quadrature(
    x: np.ndarray,
    k: int,
    g: GaussianParams,
    grid: QuadratureGrid | None = None,
    self_check: bool = True,
) -> KronVector:
    """Order-``k`` Gaussian derivative vector via the phase-shifted integral form."""
    if not 0 <= k <= 4:
        raise ShapeError(f"integral validation covers orders 0..4, got {k}")
    x = np.asarray(x, dtype=float).ravel()
    if x.size != g.dim:
        raise ShapeError(f"point has {x.size} coordinates, expected {g.dim}")
    if grid is None:
        grid = QuadratureGrid.default_for_cov(g.cov)
    coarse = _derivative_integral(x, k, g, grid)
    if self_check:
        fine = _derivative_integral(x, k, g, grid.refined())
        values = _richardson(
            coarse, fine, RICHARDSON_FACTOR * DERIVATIVE_TOL, "derivative quadrature"
        )
    else:
        values = coarse
    return KronVector(g.dim, k, values)


def _hermite_integral(x: np.ndarray, k: int, grid: QuadratureGrid) -> np.ndarray:
    pts, w = grid.nodes_weights()
    damp = np.exp(-np.einsum("ni,ni->n", pts, pts))
    phase = np.cos(np.sqrt(2.0) * (pts @ x) - 0.5 * k * np.pi)
    powers = _node_kron_powers(pts, k)
    const = 2.0 ** (0.5 * k) * np.pi ** (-0.5 * x.size) * np.exp(0.5 * float(x @ x))
    return const * ((w * damp * phase) @ powers)


def hermite_integral_quadrature(
    x: np.ndarray,
    k: int,
    grid: QuadratureGrid | None = None,
    self_check: bool = True,
) -> KronVector:
    """Identity-covariance Hermite vector from its oscillatory integral form.

    The normalization is ``2^(k/2) pi^(-d/2)`` for integration over the full
    frequency domain; it is fixed by requiring order 0 to integrate to 1 and
    is cross-checked against the closed-form Hermite vectors in the tests.
    """
    if not 0 <= k <= 4:
        raise ShapeError(f"integral validation covers orders 0..4, got {k}")
    x = np.asarray(x, dtype=float).ravel()
    d = x.size
    if d not in (1, 2):
        raise ShapeError("hermite integral form is validated for dim 1 and 2")
    if grid is None:
        grid = QuadratureGrid.default_unit(d)
    elif grid.dim != d:
        raise ShapeError(f"grid dim {grid.dim} does not match point dim {d}")
    coarse = _hermite_integral(x, k, grid)
    if self_check:
        fine = _hermite_integral(x, k, grid.refined())
        values = _richardson(coarse, fine, RICHARDSON_FACTOR * HERMITE_TOL, "hermite quadrature")
    else:
        values = coarse
    return KronVector(d, k, values)


def inverse_fourier_1d(
    cf,
    xs: np.ndarray,
    half_width: float = 12.0,
    points: int = 800,
) -> np.ndarray:
    """Real part of the inverse Fourier transform of a characteristic function.

    Evaluates ``(1/2 pi) Int cf(lam) exp(-i lam x) dlam`` over
    ``[-half_width, half_width]`` with Gauss-Legendre nodes, for each ``x``
    in ``xs``; adequate for Gaussian-damped characteristic functions.
    """
    t, w = np.polynomial.legendre.leggauss(points)
    lam = t * half_width
    wl = w * half_width
    values = np.asarray([cf(np.array([l])) for l in lam], dtype=complex)
    xs = np.asarray(xs, dtype=float).ravel()
    kernel = np.exp(-1j * np.outer(xs, lam))
    return np.real(kernel @ (wl * values)) / (2.0 * np.pi)
