"""Sample ingestion, empirical moment estimation, and expansion fitting.

Moment vectors are plain averages of Kronecker powers of the rows (no
small-sample bias correction), accumulated block by block in a fixed order so
repeated runs are bit-identical.  Fitting standardizes the sample first:
high-order moments of whitened data are well conditioned and the working
reference becomes the standard normal.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .cumulants import (
    MomentSet,
    alpha_from_delta,
    cumulant_delta,
    cumulants_from_moments,
)
from .errors import EstimationError, InputError, NumericalError, ShapeError
from .kron import KronVector, check_entry_budget
from .series import AffineMap, ExpansionModel, ReferenceDensity
from .gauss import GaussianParams

BLOCK_ROWS = 4096

__all__ = [
    "load_samples_csv",
    "sample_moments",
    "standardize",
    "transform_reference",
    "fit_expansion",
]


def load_samples_csv(path: str | Path, header: bool = False) -> np.ndarray:
    """Read an n x d sample block from CSV; strict about malformed cells.

    One sample per row, '.' decimal separator, UTF-8.  A non-numeric or
    missing cell raises :class:`InputError` naming the offending row and
    column (1-based, header excluded) instead of imputing.
    """
    path = Path(path)
    rows: list[list[float]] = []
    width = None
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if header and lineno == 1:
                continue
            if not row or all(cell.strip() == "" for cell in row):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InputError(
                    f"{path.name}: row {lineno} has {len(row)} columns, expected {width}"
                )
            parsed = []
            for col, cell in enumerate(row, start=1):
                text = cell.strip()
                try:
                    value = float(text)
                except ValueError:
                    raise InputError(
                        f"{path.name}: non-numeric cell at row {lineno}, column {col}: {text!r}"
                    ) from None
                if not np.isfinite(value):
                    raise InputError(
                        f"{path.name}: non-finite cell at row {lineno}, column {col}: {text!r}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise InputError(f"{path.name}: no data rows")
    return np.asarray(rows, dtype=float)


def _as_samples(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim == 1:
        s = s[:, None]
    if s.ndim != 2 or s.shape[0] < 1:
        raise ShapeError(f"expected an n x d sample block, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise InputError("sample block contains non-finite values")
    return s


def sample_moments(s: np.ndarray, max_order: int) -> MomentSet:
    """Average Kronecker powers of the rows: m(k) = mean_i x_i^(x)k for k <= max_order.

    Symmetric by construction.  Rows are reduced in fixed-size blocks in row
    order, so results are bit-reproducible for a given sample.
    """
    s = _as_samples(s)
    n, d = s.shape
    check_entry_budget(d, max_order)
    sums: dict[int, np.ndarray] = {k: np.zeros(d**k) for k in range(1, max_order + 1)}
    for start in range(0, n, BLOCK_ROWS):
        block = s[start : start + BLOCK_ROWS]
        powers = np.ones((block.shape[0], 1))
        for k in range(1, max_order + 1):
            powers = np.einsum("na,nj->naj", powers, block).reshape(block.shape[0], -1)
            sums[k] += powers.sum(axis=0)
    vectors = {k: KronVector(d, k, sums[k] / n) for k in sums}
    return MomentSet(d, max_order, vectors)


def standardize(s: np.ndarray) -> tuple[np.ndarray, AffineMap]:
    """Whiten a sample to zero mean and identity covariance.

    Returns the transformed sample and the affine map z = A (x - mean) with
    A the inverse Cholesky factor of the (1/n) sample covariance, i.e. the
    covariance convention matching :func:`sample_moments`.
    """
    s = _as_samples(s)
    n, d = s.shape
    if n < d + 1:
        raise EstimationError(f"need at least d + 1 = {d + 1} rows to standardize, got {n}")
    mean = s.mean(axis=0)
    centered = s - mean
    cov = centered.T @ centered / n
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("sample covariance is singular or not positive definite") from exc
    a = np.linalg.inv(chol)
    out = centered @ a.T
    log_det = -float(np.sum(np.log(np.diag(chol))))
    return out, AffineMap(a, -a @ mean, log_det)


def transform_reference(ref: ReferenceDensity, transform: AffineMap) -> ReferenceDensity:
    """Push a Gaussian or mixture reference through an affine map z = A x + b."""
    comps = []
    for g in ref.components:
        mean = transform.apply(g.mean)
        cov = transform.a @ g.cov @ transform.a.T
        comps.append(GaussianParams(mean, 0.5 * (cov + cov.T)))
    if ref.kind == "gaussian":
        return ReferenceDensity.gaussian(comps[0])
    return ReferenceDensity.mixture(ref.weights, comps)


def fit_expansion(
    s: np.ndarray,
    max_order: int = 6,
    reference: str | ReferenceDensity = "gaussian",
) -> ExpansionModel:
    """Fit a truncated expansion to a sample.

    Standardizes, estimates moments, converts to cumulants, differences them
    against the reference's cumulants, and builds the coefficient vectors.
    ``reference`` is either ``"gaussian"`` (standard normal in working
    coordinates, i.e. the moment-matched Gaussian in raw coordinates) or a
    raw-coordinate :class:`ReferenceDensity`, which is pushed through the
    standardizer.
    """
    s = _as_samples(s)
    working, transform = standardize(s)
    d = working.shape[1]
    if isinstance(reference, str):
        if reference != "gaussian":
            raise InputError(f"unsupported reference kind {reference!r}")
        ref = ReferenceDensity.standard_gaussian(d)
    elif isinstance(reference, ReferenceDensity):
        if reference.dim != d:
            raise ShapeError(
                f"reference dimension {reference.dim} does not match sample dimension {d}"
            )
        ref = transform_reference(reference, transform)
    else:
        raise InputError("reference must be 'gaussian' or a ReferenceDensity")
    moments = sample_moments(working, max_order)
    cumulants = cumulants_from_moments(moments)
    delta = cumulant_delta(cumulants, ref.cumulants(max_order))
    alpha = alpha_from_delta(delta)
    return ExpansionModel(d, max_order, alpha, ref, transform)
