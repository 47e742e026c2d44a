"""Named validation checks: identity, oracle, and quadrature cross-checks.

Each check returns records of the form
``{"check", "expected", "got", "tolerance", "pass"}``; the CLI ``validate``
subcommand serializes them to JSON and the acceptance test suite asserts on
them.  Vector comparisons are reported as a single record whose ``got`` is
the max deviation scaled by the expected vector's magnitude.

Oracles used here are deliberately independent of the code paths they check:
moment tables are re-derived by brute-force set-partition enumeration, and
Hermite/derivative vectors are compared against tensor-product
finite-difference stencils applied to the plain density function.
"""

from __future__ import annotations

import time
from math import factorial
from typing import Callable, Iterable

import numpy as np

from .cumulants import (
    CumulantDelta,
    CumulantSet,
    alpha_from_delta,
    cumulants_from_moments,
    evaluate_moment_table,
    gaussian_cumulants,
    load_moment_table,
    moments_from_cumulants,
)
from .errors import InputError
from .gauss import (
    GaussianParams,
    gaussian_pdf,
    hermite_general,
    hermite_identity,
)
from .kron import KronVector, apply_matrix_modewise, kron_product, symmetrize
from .quadcheck import (
    hermite_integral_quadrature,
    inverse_fourier_1d,
    pdf_from_cumulants_quadrature,
)
from .series import (
    ExpansionModel,
    ReferenceDensity,
    char_fn_ggc,
    gca_density,
    gca_model,
    ggc_density,
)

DEFAULT_SEED = 20260810

__all__ = ["SUITES", "run", "finite_diff_partial"]


def _record(check: str, expected: float, got: float, tol: float) -> dict:
    return {
        "check": check,
        "expected": float(expected),
        "got": float(got),
        "tolerance": float(tol),
        "pass": bool(abs(got - expected) <= tol),
    }


def _vector_record(check: str, expected: np.ndarray, got: np.ndarray, rtol: float) -> dict:
    """Compare vectors at relative tolerance; 'got' reports the scaled max deviation."""
    scale = max(float(np.max(np.abs(expected))), 1e-300)
    deviation = float(np.max(np.abs(got - expected))) / scale
    return {
        "check": check,
        "expected": 0.0,
        "got": deviation,
        "tolerance": float(rtol),
        "pass": bool(deviation <= rtol),
    }


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def _set_partitions(items: list) -> Iterable[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def _bell_moments(c: CumulantSet) -> dict[int, np.ndarray]:
    """Moment vectors by direct set-partition enumeration (Bell-polynomial form)."""
    out = {}
    for k in c.orders():
        acc = np.zeros(c.dim**k)
        for part in _set_partitions(list(range(k))):
            prod = None
            for block in sorted(part, key=len, reverse=True):
                v = c[len(block)]
                prod = v if prod is None else kron_product(prod, v)
            acc += symmetrize(prod).data
        out[k] = acc
    return out


def _fd_weights(offsets: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative on unit-spaced offsets."""
    n = offsets.size
    rhs = np.zeros(n)
    rhs[m] = factorial(m)
    vander = np.vander(offsets, n, increasing=True).T
    return np.linalg.solve(vander, rhs)


def finite_diff_partial(
    f: Callable[[np.ndarray], float],
    x: np.ndarray,
    orders: tuple[int, ...],
    rel_step: float = 1e-3,
) -> float:
    """Mixed partial derivative of ``f`` at ``x`` by tensor-product central stencils.

    ``orders[j]`` is the derivative order along coordinate ``j``.  Each axis
    uses a symmetric high-order stencil with a step of at least ``rel_step``
    scaled by the coordinate magnitude; higher derivative orders force larger
    steps to balance roundoff against truncation.
    """
    x = np.asarray(x, dtype=float)
    axes = [j for j, m in enumerate(orders) if m > 0]
    if not axes:
        return float(f(x))
    j = axes[0]
    m = orders[j]
    scale = max(1.0, abs(float(x[j])))
    # steps grow with the order so roundoff amplification (~eps / h^m) stays
    # below the stencils' O(h^6) truncation error
    min_step = {1: 1e-3, 2: 2e-3, 3: 8e-3}.get(m, 2e-2)
    step = max(rel_step, min_step) * scale
    half = (m + 5) // 2
    offsets = np.arange(-half, half + 1)
    weights = _fd_weights(offsets, m)
    reduced = tuple(0 if i == j else o for i, o in enumerate(orders))
    total = 0.0
    for off, w in zip(offsets, weights):
        xx = x.copy()
        xx[j] += off * step
        total += w * finite_diff_partial(f, xx, reduced, rel_step)
    return total / step**m


def _fd_gaussian_derivative(x: np.ndarray, k: int, g: GaussianParams) -> np.ndarray:
    """Order-k derivative vector of the Gaussian pdf by finite differences."""
    d = g.dim
    out = np.empty(d**k)
    modes = np.unravel_index(np.arange(d**k), (d,) * k) if k else ()
    for pos in range(d**k):
        orders = [0] * d
        for mode_idx in modes:
            orders[mode_idx[pos]] += 1
        out[pos] = finite_diff_partial(lambda y: gaussian_pdf(y, g), x, tuple(orders))
    return out


def _fd_hermite(x: np.ndarray, k: int, g: GaussianParams) -> np.ndarray:
    """Rodrigues-form Hermite vector from finite differences of the density."""
    deriv = KronVector(g.dim, k, _fd_gaussian_derivative(x, k, g))
    transported = apply_matrix_modewise(deriv, g.cov)
    sign = -1.0 if k % 2 else 1.0
    return sign * transported.data / gaussian_pdf(x, g)


def _random_cumulants(rng: np.random.Generator, dim: int, max_order: int) -> CumulantSet:
    vecs = {}
    for k in range(1, max_order + 1):
        vecs[k] = symmetrize(KronVector(dim, k, rng.normal(size=dim**k)))
    return CumulantSet(dim, max_order, vecs)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def check_moment_table(seed: int = DEFAULT_SEED, table_path=None) -> list[dict]:
    """Recursion vs the explicit set-partition table, orders <= 6, dims 1..3.

    The order-6 term with a third-order cumulant against three first-order
    factors is settled against the brute-force enumeration before the table
    comparison runs.
    """
    rng = np.random.default_rng(seed)
    table = load_moment_table(table_path)
    records = []

    # settle the ambiguous order-6 term by brute force at dimension 1
    c = _random_cumulants(rng, 1, 6)
    oracle = _bell_moments(c)
    table_eval = evaluate_moment_table(c, table)
    records.append(
        _vector_record(
            "moment-table/order6-term-vs-bell-oracle(d=1)",
            oracle[6],
            table_eval[6].data,
            1e-10,
        )
    )
    scalars = {k: float(c[k].data[0]) for k in c.orders()}
    misprint_m6 = (
        scalars[6]
        + 6 * scalars[5] * scalars[1]
        + 15 * scalars[4] * scalars[2]
        + 15 * scalars[4] * scalars[1] ** 2
        + 10 * scalars[3] ** 2
        + 60 * scalars[3] * scalars[2] * scalars[1]
        + 20 * scalars[3] * scalars[1] ** 2  # the misprinted reading, order 5 in total
        + 15 * scalars[2] ** 3
        + 45 * scalars[2] ** 2 * scalars[1] ** 2
        + 15 * scalars[2] * scalars[1] ** 4
        + scalars[1] ** 6
    )
    # the alternative low-order reading of that term must disagree with the oracle
    differs = abs(misprint_m6 - float(oracle[6][0])) > 1e-6
    records.append(
        {
            "check": "moment-table/low-order-misreading-rejected(d=1)",
            "expected": 1.0,
            "got": float(differs),
            "tolerance": 0.0,
            "pass": bool(differs),
        }
    )

    trials = {1: 34, 2: 33, 3: 33}
    worst = 0.0
    for dim, count in trials.items():
        for _ in range(count):
            c = _random_cumulants(rng, dim, 6)
            rec = moments_from_cumulants(c)
            tab = evaluate_moment_table(c, table)
            for k in range(1, 7):
                scale = max(float(np.max(np.abs(tab[k].data))), 1e-300)
                worst = max(worst, float(np.max(np.abs(rec[k].data - tab[k].data))) / scale)
    records.append(
        {
            "check": "moment-table/recursion-vs-table(d=1..3,K=6,100 sets)",
            "expected": 0.0,
            "got": worst,
            "tolerance": 1e-10,
            "pass": bool(worst <= 1e-10),
        }
    )
    return records


def check_roundtrip(seed: int = DEFAULT_SEED) -> list[dict]:
    """cumulants -> moments -> cumulants is the identity at K = 6, dims 1..3."""
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    trials = {1: 34, 2: 33, 3: 33}
    for dim, count in trials.items():
        for _ in range(count):
            c = _random_cumulants(rng, dim, 6)
            back = cumulants_from_moments(moments_from_cumulants(c))
            for k in c.orders():
                scale = max(float(np.max(np.abs(c[k].data))), 1e-300)
                worst = max(worst, float(np.max(np.abs(back[k].data - c[k].data))) / scale)
    return [
        {
            "check": "roundtrip/cumulants-moments-cumulants(d=1..3,K=6,100 sets)",
            "expected": 0.0,
            "got": worst,
            "tolerance": 1e-10,
            "pass": bool(worst <= 1e-10),
        }
    ]


def check_univariate_exponential() -> list[dict]:
    """Unit-rate exponential: c_k = (k-1)! maps to m_k = k! and back, exactly."""
    kmax = 6
    c = CumulantSet(
        1, kmax, {k: KronVector(1, k, [float(factorial(k - 1))]) for k in range(1, kmax + 1)}
    )
    m = moments_from_cumulants(c)
    records = []
    worst_m = max(
        abs(float(m[k].data[0]) - factorial(k)) / factorial(k) for k in range(1, kmax + 1)
    )
    records.append(_record("univariate/exponential-moments(m_k=k!)", 0.0, worst_m, 1e-12))
    back = cumulants_from_moments(m)
    worst_c = max(
        abs(float(back[k].data[0]) - factorial(k - 1)) / factorial(k - 1)
        for k in range(1, kmax + 1)
    )
    records.append(_record("univariate/exponential-cumulants(c_k=(k-1)!)", 0.0, worst_c, 1e-12))
    return records


def check_hermite(seed: int = DEFAULT_SEED) -> list[dict]:
    """Three-term recurrence, finite-difference Rodrigues form, and orthogonality."""
    records = []

    # (a) scalar recurrence He_{k+1} = x He_k - k He_{k-1} through order 8
    worst = 0.0
    for x in (-2.3, -0.7, 0.4, 1.1, 2.8):
        values = [float(hermite_identity(np.array([x]), k).data[0]) for k in range(9)]
        for k in range(1, 8):
            lhs = values[k + 1]
            rhs = x * values[k] - k * values[k - 1]
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1.0))
    records.append(_record("hermite/recurrence(k<=8,d=1)", 0.0, worst, 1e-12))

    # (b) general covariance vs finite-difference Rodrigues at d = 2
    g = GaussianParams(np.zeros(2), np.array([[1.3, 0.4], [0.4, 0.9]]))
    worst = 0.0
    for x in (np.array([0.5, 1.2]), np.array([-0.8, 0.3])):
        for k in (1, 2, 3):
            got = hermite_general(x, k, g)
            oracle = _fd_hermite(x, k, g)
            scale = max(float(np.max(np.abs(oracle))), 1e-300)
            worst = max(worst, float(np.max(np.abs(got.data - oracle))) / scale)
    records.append(_record("hermite/rodrigues-fd(d=2,k<=3,general C)", 0.0, worst, 1e-6))

    # (c) orthogonality under the standard normal weight on [-12, 12]
    nodes, weights = np.polynomial.legendre.leggauss(256)
    xs = nodes * 12.0
    ws = weights * 12.0
    weight = np.exp(-0.5 * xs**2) / np.sqrt(2.0 * np.pi)
    he = [np.array([hermite_identity(np.array([x]), k).data[0] for x in xs]) for k in range(6)]
    worst = 0.0
    for j in range(6):
        for k in range(6):
            integral = float(np.sum(ws * weight * he[j] * he[k]))
            target = float(factorial(k)) if j == k else 0.0
            worst = max(worst, abs(integral - target))
    records.append(_record("hermite/orthogonality(j,k<=5)", 0.0, worst, 1e-8))
    return records


def check_gaussian_reconstruction() -> list[dict]:
    """Integral form of the density reproduces the Gaussian at 25 probe points."""
    probes: list[tuple[CumulantSet, np.ndarray]] = []
    c_1d_std = gaussian_cumulants([0.0], [[1.0]], 2)
    for x in np.linspace(-3.0, 3.0, 7):
        probes.append((c_1d_std, np.array([x])))
    c_1d_wide = gaussian_cumulants([0.5], [[4.0]], 2)
    for x in np.linspace(-4.0, 5.0, 6):
        probes.append((c_1d_wide, np.array([x])))
    c_2d_shift = gaussian_cumulants([1.0, -1.0], np.eye(2), 2)
    for x in [(1.0, -1.0), (0.0, 0.0), (2.0, -2.0), (1.5, 0.5), (-0.5, -1.5), (0.5, -0.5)]:
        probes.append((c_2d_shift, np.array(x)))
    c_2d_corr = gaussian_cumulants([0.0, 0.0], np.array([[2.0, 0.6], [0.6, 1.0]]), 2)
    for x in [(0.0, 0.0), (1.0, 1.0), (-1.0, 0.5), (2.0, -1.0), (0.3, 1.7), (-2.0, -1.0)]:
        probes.append((c_2d_corr, np.array(x)))
    assert len(probes) == 25
    worst = 0.0
    for c, x in probes:
        got = pdf_from_cumulants_quadrature(c, x)
        expected = gaussian_pdf(x, GaussianParams(c.mean(), c.covariance()))
        worst = max(worst, abs(got - expected))
    return [
        _record("gaussian-reconstruction/quadrature-vs-pdf(25 points,d=1,2)", 0.0, worst, 1e-6)
    ]


def check_hermite_integral() -> list[dict]:
    """Integral form of the Hermite vectors matches the closed form at 10 probes."""
    cases = [
        (np.array([0.0]), 0),
        (np.array([0.0]), 2),
        (np.array([2.0]), 3),
        (np.array([-1.3]), 4),
        (np.array([0.7]), 1),
        (np.array([0.5, 1.2]), 1),
        (np.array([0.5, 1.2]), 2),
        (np.array([-0.6, 0.4]), 3),
        (np.array([1.1, -0.8]), 4),
        (np.array([0.0, 0.0]), 2),
    ]
    worst = 0.0
    for x, k in cases:
        got = hermite_integral_quadrature(x, k)
        expected = hermite_identity(x, k)
        scale = max(float(np.max(np.abs(expected.data))), 1.0)
        worst = max(worst, float(np.max(np.abs(got.data - expected.data))) / scale)
    return [_record("hermite-integral/vs-closed-form(10 probes,k<=4,d<=2)", 0.0, worst, 1e-5)]


def check_ggc_degeneracy(seed: int = DEFAULT_SEED) -> list[dict]:
    """Vanishing corrections give back the reference; the order-6 composite holds."""
    rng = np.random.default_rng(seed + 2)
    records = []

    # all-zero delta: expansion equals the mixture reference exactly
    ref = ReferenceDensity.mixture(
        [0.4, 0.6],
        [
            GaussianParams(np.array([-1.0, 0.0]), np.eye(2)),
            GaussianParams(np.array([1.0, 0.5]), np.array([[1.5, 0.3], [0.3, 0.8]])),
        ],
    )
    delta = CumulantDelta(2, 6, {k: KronVector.zeros(2, k) for k in range(1, 7)})
    model = ExpansionModel(2, 6, alpha_from_delta(delta), ref)
    worst = 0.0
    for _ in range(8):
        x = rng.normal(size=2) * 1.5
        worst = max(worst, abs(ggc_density(model, x) - ref.pdf(x)))
    records.append(_record("ggc/zero-delta-returns-reference", 0.0, worst, 1e-14))

    # Gaussian target with Gaussian reference: expansion equals the Gaussian
    c = gaussian_cumulants([0.3, -0.2], np.array([[1.2, 0.4], [0.4, 0.9]]), 6)
    g = GaussianParams(c.mean(), c.covariance())
    worst = 0.0
    for _ in range(8):
        x = rng.normal(size=2) * 1.5
        worst = max(worst, abs(gca_density(c, x) - gaussian_pdf(x, g)) / gaussian_pdf(x, g))
    records.append(_record("ggc/gaussian-target-returns-gaussian", 0.0, worst, 1e-12))

    # order-6 coefficient composite with vanishing delta(1), delta(2)
    d3 = symmetrize(KronVector(2, 3, rng.normal(size=8)))
    d6 = symmetrize(KronVector(2, 6, rng.normal(size=64)))
    delta_vecs = {k: KronVector.zeros(2, k) for k in range(1, 7)}
    delta_vecs[3] = d3
    delta_vecs[6] = d6
    alpha = alpha_from_delta(CumulantDelta(2, 6, delta_vecs))
    expected6 = d6.data + 10.0 * symmetrize(kron_product(d3, d3)).data
    records.append(
        _vector_record("ggc/alpha6-composite(delta6+10*delta3^2)", expected6, alpha[6].data, 1e-12)
    )
    for k, expected in ((1, 0.0), (2, 0.0)):
        records.append(
            _record(f"ggc/alpha{k}-vanishes", expected, float(np.max(np.abs(alpha[k].data))), 1e-15)
        )
    for k in (3, 4, 5):
        target = delta_vecs[k].data
        records.append(_vector_record(f"ggc/alpha{k}-equals-delta{k}", target, alpha[k].data, 1e-15))
    return records


# frozen from the deterministic oracle run: the order-4 expansion of the unit
# exponential WORSENS the L1 distance on [-4, 10] by about 20%
EXPONENTIAL_L1_REDUCTION_OBSERVED = -0.19901
EXPONENTIAL_L1_REDUCTION_REQUIRED = 0.30


def check_exponential_fit() -> list[dict]:
    """Order-4 expansion of the standardized unit exponential, L1 gate on [-4, 10].

    The gate requires a >= 30% L1 improvement over the plain Gaussian
    reference.  The truncated series does not deliver it for this target
    (the expansion is divergent for exponential tails), so the gate record
    fails; the observed value is also pinned as a regression bound.
    """
    c = CumulantSet(1, 4, {k: KronVector(1, k, [float(factorial(k - 1))]) for k in range(1, 5)})
    model = gca_model(c)  # standardizes to z = x - 1

    def true_std(z: np.ndarray) -> np.ndarray:
        return np.where(z >= -1.0, np.exp(-(z + 1.0)), 0.0)

    def gauss_std(z: np.ndarray) -> np.ndarray:
        return np.exp(-0.5 * z**2) / np.sqrt(2.0 * np.pi)

    nodes, weights = np.polynomial.legendre.leggauss(1500)

    def l1(fn, lo, hi):
        # split at the support edge z = -1 where the target density jumps
        total = 0.0
        for a, b in ((lo, -1.0), (-1.0, hi)):
            z = 0.5 * (nodes + 1.0) * (b - a) + a
            w = 0.5 * (b - a) * weights
            total += float(np.sum(w * np.abs(fn(z) - true_std(z))))
        return total

    def fitted(z: np.ndarray) -> np.ndarray:
        # model works in raw coordinates x = z + 1
        return np.array([ggc_density(model, np.array([zz + 1.0])) for zz in z])

    l1_gauss = l1(gauss_std, -4.0, 10.0)
    l1_fit = l1(fitted, -4.0, 10.0)
    reduction = 1.0 - l1_fit / l1_gauss
    return [
        _record(
            "exponential-fit/regression(frozen oracle value)",
            EXPONENTIAL_L1_REDUCTION_OBSERVED,
            reduction,
            5e-4,
        ),
        {
            "check": "exponential-fit/l1-reduction-gate(>=30%)",
            "expected": EXPONENTIAL_L1_REDUCTION_REQUIRED,
            "got": float(reduction),
            "tolerance": 0.0,
            "pass": bool(reduction >= EXPONENTIAL_L1_REDUCTION_REQUIRED),
        },
    ]


def check_charfn_duality() -> list[dict]:
    """Inverse Fourier transform of the characteristic-function form matches the density.

    Uses a third-order correction small enough that series orders beyond the
    truncation contribute below tolerance, while the correction itself stays
    three decades above it.
    """
    d3 = 0.015
    delta_vecs = {k: KronVector.zeros(1, k) for k in range(1, 7)}
    delta_vecs[3] = KronVector(1, 3, [d3])
    delta = CumulantDelta(1, 6, delta_vecs)
    ref = ReferenceDensity.standard_gaussian(1)
    model = ExpansionModel(1, 6, alpha_from_delta(delta), ref)
    xs = np.linspace(-4.0, 4.0, 25)
    inverted = inverse_fourier_1d(lambda lam: char_fn_ggc(delta, ref.char_fn, lam), xs)
    direct = np.array([ggc_density(model, np.array([x])) for x in xs])
    worst = float(np.max(np.abs(inverted - direct)))
    signal = float(np.max(np.abs(direct - np.exp(-0.5 * xs**2) / np.sqrt(2 * np.pi))))
    return [
        _record("charfn-duality/invFT-vs-density(d=1)", 0.0, worst, 1e-6),
        {
            "check": "charfn-duality/correction-signal-above-tolerance",
            "expected": 1.0,
            "got": float(signal > 1e-4),
            "tolerance": 0.0,
            "pass": bool(signal > 1e-4),
        },
    ]


def check_mass_and_moments() -> list[dict]:
    """Truncated expansions keep unit mass and reproduce encoded moments (d = 1)."""
    c = CumulantSet(1, 4, {k: KronVector(1, k, [float(factorial(k - 1))]) for k in range(1, 5)})
    model = gca_model(c)
    nodes, weights = np.polynomial.legendre.leggauss(512)
    xs = nodes * 12.0 + 1.0  # raw coordinates centered on the mean
    ws = weights * 12.0
    dens = np.array([ggc_density(model, np.array([x])) for x in xs])
    mass = float(np.sum(ws * dens))
    records = [_record("mass-moments/unit-mass", 1.0, mass, 1e-8)]
    target = moments_from_cumulants(c)
    worst = 0.0
    for j in range(1, 5):
        mj = float(np.sum(ws * xs**j * dens))
        worst = max(worst, abs(mj - float(target[j].data[0])))
    records.append(_record("mass-moments/moment-matching(j<=4)", 0.0, worst, 1e-6))
    return records


SUITES: dict[str, Callable[..., list[dict]]] = {
    "moment-table": check_moment_table,
    "roundtrip": check_roundtrip,
    "univariate-exponential": check_univariate_exponential,
    "hermite": check_hermite,
    "gaussian-reconstruction": check_gaussian_reconstruction,
    "hermite-integral": check_hermite_integral,
    "ggc-degeneracy": check_ggc_degeneracy,
    "exponential-fit": check_exponential_fit,
    "charfn-duality": check_charfn_duality,
    "mass-and-moments": check_mass_and_moments,
}


def run(only: str | None = None, seed: int = DEFAULT_SEED, table_path=None) -> dict:
    """Run the validation suites, optionally filtered by substring match on the name."""
    selected = {
        name: fn for name, fn in SUITES.items() if only is None or only in name
    }
    if not selected:
        raise InputError(f"--only {only!r} matches no suite; available: {sorted(SUITES)}")
    records = []
    timings = {}
    for name, fn in selected.items():
        start = time.perf_counter()
        if name == "moment-table":
            recs = fn(seed=seed, table_path=table_path)
        elif name in ("roundtrip", "hermite", "ggc-degeneracy"):
            recs = fn(seed=seed)
        else:
            recs = fn()
        timings[name] = round(time.perf_counter() - start, 3)
        records.extend(recs)
    return {
        "seed": seed,
        "suites": sorted(selected),
        "timings_s": timings,
        "checks": records,
        "passed": all(r["pass"] for r in records),
    }
