"""Independent oracles used by the tests.

Everything here is deliberately written against plain scalars, numpy
polynomial helpers, or brute-force enumeration, so the tested library paths
(binomial recursions, closed-form Hermite vectors, series evaluators) never
appear on the oracle side.
"""

from __future__ import annotations

from math import comb, factorial

import numpy as np
from numpy.polynomial.hermite_e import hermeval


def set_partitions(items: list) -> list[list[list]]:
    """All set partitions, as lists of blocks."""
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for part in set_partitions(rest):
        out.append([[first]] + part)
        for i in range(len(part)):
            out.append(part[:i] + [[first] + part[i]] + part[i + 1 :])
    return out


def scalar_moments_from_cumulants(c: list[float]) -> list[float]:
    """Univariate m_k from c_k (index 0 = order 1) via set-partition sums."""
    kmax = len(c)
    out = []
    for k in range(1, kmax + 1):
        total = 0.0
        for part in set_partitions(list(range(k))):
            term = 1.0
            for block in part:
                term *= c[len(block) - 1]
            total += term
        out.append(total)
    return out


def scalar_cumulants_from_moments(m: list[float]) -> list[float]:
    """Univariate c_k from m_k via the binomial recursion on scalars."""
    kmax = len(m)
    full = [1.0] + list(m)
    c = [0.0] * (kmax + 1)
    for k in range(1, kmax + 1):
        acc = full[k]
        for p in range(1, k):
            acc -= comb(k - 1, p) * c[k - p] * full[p]
        c[k] = acc
    return c[1:]


def series_exp_coefficients(c: list[float], kmax: int) -> list[float]:
    """Coefficients a_k with sum_k a_k t^k / k! = exp(sum_j c_j t^j / j!).

    Computed by power-series composition: summing powers of the inner
    polynomial with factorial weights, truncated at degree ``kmax``.
    """
    inner = np.zeros(kmax + 1)
    for j, cj in enumerate(c, start=1):
        if j <= kmax:
            inner[j] = cj / factorial(j)
    series = np.zeros(kmax + 1)
    series[0] = 1.0
    power = np.zeros(kmax + 1)
    power[0] = 1.0
    for n in range(1, kmax + 1):
        # power <- power * inner, truncated
        new = np.zeros(kmax + 1)
        for a in range(kmax + 1):
            if power[a] == 0.0:
                continue
            for b in range(1, kmax + 1 - a):
                new[a + b] += power[a] * inner[b]
        power = new
        series += power / factorial(n)
    return [series[k] * factorial(k) for k in range(kmax + 1)]


def he(n: int, x):
    """Probabilists' Hermite polynomial via numpy's hermite_e basis."""
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    return hermeval(x, coeffs)


def scalar_gca_density(z, c3: float, c4: float):
    """Univariate order-4 expansion around the standard normal.

    Independent scalar implementation: phi(z) * (1 + c3/3! He3 + c4/4! He4).
    """
    z = np.asarray(z, dtype=float)
    phi = np.exp(-0.5 * z**2) / np.sqrt(2.0 * np.pi)
    return phi * (1.0 + c3 / 6.0 * he(3, z) + c4 / 24.0 * he(4, z))


def gaussian_cf(lam: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> complex:
    lam = np.asarray(lam, dtype=float).ravel()
    mean = np.asarray(mean, dtype=float).ravel()
    cov = np.asarray(cov, dtype=float)
    return complex(np.exp(1j * float(mean @ lam) - 0.5 * float(lam @ cov @ lam)))


def isserlis_fourth_moment(cov: np.ndarray) -> np.ndarray:
    """E[x_i x_j x_k x_l] for a centered Gaussian, flattened to d**4."""
    cov = np.asarray(cov, dtype=float)
    d = cov.shape[0]
    out = np.empty(d**4)
    pos = 0
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    out[pos] = cov[i, j] * cov[k, l] + cov[i, k] * cov[j, l] + cov[i, l] * cov[j, k]
                    pos += 1
    return out
