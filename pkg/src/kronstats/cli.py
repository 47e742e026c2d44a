"""Command-line front door: fit, eval, convert, validate.

Structured outputs are JSON (sorted keys); point tables are CSV.  All
commands are deterministic for fixed inputs and flags.  Exit codes: 0 on
success, 2 for usage or input problems, 3 for numerical failures, 4 when the
validation suite reports a failing check.  Errors are written to stderr as a
single JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import validation
from .cumulants import (
    CumulantSet,
    MomentSet,
    cumulants_from_moments,
    delta_from_alpha,
    moments_from_cumulants,
)
from .empirical import fit_expansion, load_samples_csv
from .errors import (
    AccuracyError,
    BudgetError,
    EstimationError,
    InputError,
    NumericalError,
    ShapeError,
)
from .series import ExpansionModel, ReferenceDensity, ggc_density, negative_mass_fraction

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

_INPUT_ERRORS = (InputError, EstimationError, ShapeError, BudgetError, OSError, ValueError)
_NUMERICAL_ERRORS = (NumericalError, AccuracyError, np.linalg.LinAlgError)


def _fail(kind: str, exc: BaseException, code: int) -> int:
    payload = {"error": {"type": kind, "message": str(exc), "exit_code": code}}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _parse_grid(spec: str, dim: int) -> np.ndarray:
    """Parse 'min:max:n[,min:max:n...]' into the cartesian grid of points."""
    parts = spec.split(",")
    if len(parts) != dim:
        raise InputError(f"--grid has {len(parts)} axes, model dimension is {dim}")
    axes = []
    for part in parts:
        fields = part.split(":")
        if len(fields) != 3:
            raise InputError(f"grid axis {part!r} is not of the form min:max:n")
        lo, hi, n = float(fields[0]), float(fields[1]), int(fields[2])
        if n < 1 or hi <= lo:
            raise InputError(f"grid axis {part!r} must have max > min and n >= 1")
        axes.append(np.linspace(lo, hi, n))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _load_reference(spec: str, dim: int) -> str | ReferenceDensity:
    if spec == "gaussian":
        return "gaussian"
    if spec.startswith("mixture:"):
        path = Path(spec.split(":", 1)[1])
        obj = json.loads(path.read_text())
        ref = ReferenceDensity.from_dict(obj)
        if ref.dim != dim:
            raise InputError(f"mixture file dimension {ref.dim} does not match data ({dim})")
        return ref
    raise InputError(f"--reference must be 'gaussian' or 'mixture:<file>', got {spec!r}")


def cmd_fit(args: argparse.Namespace) -> int:
    samples = load_samples_csv(args.input, header=args.header)
    d = samples.shape[1]
    if args.dim is not None and args.dim != d:
        raise InputError(f"--dim {args.dim} does not match the {d}-column input file")
    reference = _load_reference(args.reference, d)
    model = fit_expansion(samples, max_order=args.order, reference=reference)
    _write_json(args.output, model.to_dict())

    delta = delta_from_alpha(model.coefficients)
    ref_cum = model.reference.cumulants(model.max_order)
    diagnostics = {
        "n_samples": int(samples.shape[0]),
        "dim": d,
        "max_order": model.max_order,
        "negative_mass_fraction": negative_mass_fraction(model) if d <= 3 else None,
        "delta_max_abs": {
            str(k): float(np.max(np.abs(delta[k].data))) for k in delta.orders()
        },
        "cumulant_max_abs": {
            str(k): float(np.max(np.abs(delta[k].data + ref_cum[k].data)))
            for k in delta.orders()
        },
        "alpha_max_abs": {
            str(k): float(np.max(np.abs(model.coefficients[k].data)))
            for k in range(1, model.max_order + 1)
        },
    }
    diag_path = args.diagnostics
    if diag_path is None and args.output not in (None, "-"):
        diag_path = str(Path(args.output).with_suffix(".diagnostics.json"))
    if diag_path is not None:
        _write_json(diag_path, diagnostics)
    return EXIT_OK


def _format_value(x: float) -> str:
    return repr(float(x))


def cmd_eval(args: argparse.Namespace) -> int:
    model = ExpansionModel.from_json(Path(args.model).read_text())
    if (args.grid is None) == (args.points is None):
        raise InputError("exactly one of --grid or --points is required")
    if args.grid is not None:
        points = _parse_grid(args.grid, model.dim)
    else:
        points = load_samples_csv(args.points, header=args.header)
        if points.shape[1] != model.dim:
            raise InputError(
                f"points file has {points.shape[1]} columns, model dimension is {model.dim}"
            )
    header = [f"x_{i + 1}" for i in range(model.dim)]
    lines = []
    if args.charfn:
        header += ["cf_re", "cf_im"]
        for p in points:
            value = model.char_fn(p)
            lines.append(
                ",".join([_format_value(v) for v in p] + [_format_value(value.real), _format_value(value.imag)])
            )
    else:
        header.append("f_hat")
        for p in points:
            lines.append(",".join([_format_value(v) for v in p] + [_format_value(ggc_density(model, p))]))
    text = ",".join(header) + "\n" + "\n".join(lines) + "\n"
    if args.output is None or args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return EXIT_OK


def cmd_convert(args: argparse.Namespace) -> int:
    obj = json.loads(Path(args.input).read_text())
    if args.to == "moments":
        result = moments_from_cumulants(CumulantSet.from_dict(obj))
    else:
        result = cumulants_from_moments(MomentSet.from_dict(obj))
    _write_json(args.output, result.to_dict())
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    report = validation.run(only=args.only, seed=args.seed, table_path=args.table)
    _write_json(args.output, report)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kronstats",
        description="Higher-order statistics and density expansions in flat Kronecker layout",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit an expansion model to CSV samples")
    p_fit.add_argument("--input", required=True, help="CSV sample file, one row per sample")
    p_fit.add_argument("--output", default="-", help="model JSON path (default stdout)")
    p_fit.add_argument("--order", type=int, default=6, help="truncation order K (2..10)")
    p_fit.add_argument("--dim", type=int, default=None, help="expected dimension (validated)")
    p_fit.add_argument("--reference", default="gaussian", help="gaussian | mixture:<file>")
    p_fit.add_argument("--header", action="store_true", help="skip the first CSV row")
    p_fit.add_argument("--seed", type=int, default=0, help="accepted for config parity; fit is deterministic")
    p_fit.add_argument("--diagnostics", default=None, help="diagnostics JSON path")
    p_fit.set_defaults(fn=cmd_fit)

    p_eval = sub.add_parser("eval", help="evaluate a model on a grid or points file")
    p_eval.add_argument("--model", required=True, help="model JSON from 'fit'")
    p_eval.add_argument("--output", default="-", help="output CSV path (default stdout)")
    p_eval.add_argument("--grid", default=None, help='per-axis "min:max:n[,...]"')
    p_eval.add_argument("--points", default=None, help="CSV of evaluation points")
    p_eval.add_argument("--header", action="store_true", help="points CSV has a header row")
    p_eval.add_argument(
        "--charfn", action="store_true", help="evaluate the characteristic function instead"
    )
    p_eval.set_defaults(fn=cmd_eval)

    p_conv = sub.add_parser("convert", help="convert between moment and cumulant JSON files")
    p_conv.add_argument("--input", required=True)
    p_conv.add_argument("--output", default="-")
    p_conv.add_argument("--to", required=True, choices=["moments", "cumulants"])
    p_conv.set_defaults(fn=cmd_convert)

    p_val = sub.add_parser("validate", help="run the validation suite and emit a JSON report")
    p_val.add_argument("--only", default=None, help="substring filter on suite names")
    p_val.add_argument("--output", default="-", help="report JSON path (default stdout)")
    p_val.add_argument("--seed", type=int, default=validation.DEFAULT_SEED)
    p_val.add_argument("--table", default=None, help="override the moment-table data file")
    p_val.set_defaults(fn=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return int(exc.code) if exc.code else EXIT_OK
    if hasattr(args, "order") and not 2 <= args.order <= 10:
        return _fail("input", InputError(f"--order must be in [2, 10], got {args.order}"), EXIT_INPUT)
    try:
        return args.fn(args)
    except _NUMERICAL_ERRORS as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    except _INPUT_ERRORS as exc:
        return _fail("input", exc, EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
