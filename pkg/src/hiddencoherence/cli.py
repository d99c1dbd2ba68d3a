"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import measures, sampler, theorems
from .matcore import DimensionError
from .state import (
    DensityMatrix,
    FamilyId,
    StateError,
    family_state,
    load_state,
    spectral,
    state_to_json,
)

SCHEMA_VERSION = 1
SLACK = 1e-9
FULL_SCALE_SAMPLES = 10**6

SWEEP_COLUMNS = (
    "family",
    "param",
    "purity",
    "d_sq_orig",
    "bmax_orig",
    "d2_max",
    "bmax_upper",
    "bmax_lower",
    "c_bd",
    "c_max",
    "s_min",
    "s_max",
)

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _finite(doc):
    """Raise if any float inside ``doc`` is NaN or infinite."""
    if isinstance(doc, float):
        if not math.isfinite(doc):
            raise ValueError("refusing to emit a non-finite number")
    elif isinstance(doc, dict):
        for v in doc.values():
            _finite(v)
    elif isinstance(doc, (list, tuple)):
        for v in doc:
            _finite(v)
    return doc


def _emit_json(doc: dict, out: str | None) -> None:
    text = json.dumps(_finite(doc), indent=1) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _family(name: str) -> FamilyId:
    try:
        return FamilyId(name)
    except ValueError:
        raise UsageError(
            f"unknown family {name!r}; choose from {', '.join(f.value for f in FamilyId)}"
        ) from None


def _state_from_args(args) -> tuple[DensityMatrix, dict]:
    if getattr(args, "state_file", None):
        if args.family is not None:
            raise UsageError("give either a state file or --family, not both")
        return load_state(args.state_file), {"source": str(args.state_file)}
    if args.family is None or args.param is None:
        raise UsageError("need a state file or --family with --param")
    fam = _family(args.family)
    rho = family_state(fam, args.param, args.kappa)
    return rho, {"family": fam.value, "param": args.param, "kappa": args.kappa}


def _analysis(rho: DensityMatrix) -> dict:
    lam = spectral(rho).lambdas
    return {
        "report": measures.report(rho).to_dict(),
        "eigenvalues": [float(x) for x in lam],
        "bounds": theorems.bounds(lam).to_dict(),
    }


def parse_range(text: str) -> list[float]:
    """Inclusive grid from ``start:stop:step``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(x) for x in parts)
    except ValueError:
        raise UsageError(f"range must be numeric, got {text!r}") from None
    if not all(math.isfinite(x) for x in (start, stop, step)):
        raise UsageError("range values must be finite")
    if step <= 0:
        raise UsageError("range step must be positive")
    if stop < start:
        raise UsageError("range stop is below start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def sweep_rows(family: FamilyId, grid, kappa: float | None = None) -> list[dict]:
    rows = []
    for x in grid:
        rho = family_state(family, x, kappa)
        d_sq = measures.coherence(rho)[2]
        b = theorems.family_bounds(family, x, kappa)
        rows.append(
            {
                "family": family.value,
                "param": float(x),
                "purity": measures.purity(rho),
                "d_sq_orig": d_sq,
                "bmax_orig": measures.bmax(rho),
                "d2_max": b.d2_max,
                "bmax_upper": b.bmax_upper,
                "bmax_lower": b.bmax_lower,
                "c_bd": b.c_bd,
                "c_max": b.c_max,
                "s_min": b.s_min,
                "s_max": b.s_max,
            }
        )
    return rows


def write_sweep_csv(rows: list[dict], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        _finite([row[c] for c in SWEEP_COLUMNS[1:]])
        writer.writerow([row["family"]] + [f"{row[c]:.17g}" for c in SWEEP_COLUMNS[1:]])


# --- commands -------------------------------------------------------------------

def cmd_analyze(args) -> int:
    rho, source = _state_from_args(args)
    doc = {"schema_version": SCHEMA_VERSION, "input": source}
    doc.update(_analysis(rho))
    _emit_json(doc, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    fam = _family(args.family)
    rows = sweep_rows(fam, parse_range(args.range), args.kappa)
    if args.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "columns": list(SWEEP_COLUMNS), "rows": rows}
        _emit_json(doc, args.out)
    elif args.out is None or args.out == "-":
        write_sweep_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write_sweep_csv(rows, fh)
    return EXIT_OK


def cmd_transform(args) -> int:
    rho, source = _state_from_args(args)
    if args.mode == "min-coherence":
        res = theorems.min_coherence_transform(rho)
    else:
        res = theorems.max_coherence_transform(rho)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "input": source,
        "mode": args.mode,
        "unitary": state_to_json(res.u),
        "rho": state_to_json(res.state),
        "before": measures.report(rho).to_dict(),
        "after": measures.report(res.state).to_dict(),
        "eigenvalues": [float(x) for x in spectral(rho).lambdas],
    }
    _emit_json(doc, args.out)
    return EXIT_OK


def containment_violations(result: sampler.ExplorationResult, b: theorems.BoundSet) -> np.ndarray:
    """Indices of samples outside the closed-form region (with ``SLACK``)."""
    bad = (
        (result.d_sq < -SLACK)
        | (result.d_sq > b.d2_max + SLACK)
        | (result.bmax < b.bmax_lower - SLACK)
        | (result.bmax > b.bmax_upper + SLACK)
        | (result.s_comb < b.s_min - SLACK)
        | (result.s_comb > b.s_max + SLACK)
    )
    return np.flatnonzero(bad)


def cmd_verify(args) -> int:
    n = FULL_SCALE_SAMPLES if args.full_scale else args.samples
    if n < 1:
        raise UsageError("--samples must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    rho, source = _state_from_args(args)
    lam = spectral(rho).lambdas
    b = theorems.bounds(lam)
    result = sampler.explore(rho, n, args.seed, args.measure, workers=args.workers)
    bad = containment_violations(result, b)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "input": source,
        "n_samples": n,
        "seed": args.seed,
        "measure": result.measure.value,
        "eigenvalues": [float(x) for x in lam],
        "bounds": b.to_dict(),
        "observed": {
            "d2_max": result.observed_d2_max,
            "d2_min": result.observed_d2_min,
            "bmax_max": result.observed_bmax_max,
            "bmax_min": result.observed_bmax_min,
            "s_comb_max": float(result.s_comb.max()),
            "s_comb_min": float(result.s_comb.min()),
        },
        "contained": bool(bad.size == 0),
        "violations": int(bad.size),
        "first_violation": result.point(int(bad[0]))._asdict() if bad.size else None,
        "point_columns": ["d_sq", "bmax", "s_comb"],
        "points": result.values.tolist(),
    }
    _emit_json(doc, args.out)
    if bad.size:
        p = result.point(int(bad[0]))
        print(
            f"containment violated by {bad.size} sample(s); first: index={p.index} "
            f"d_sq={p.d_sq!r} bmax={p.bmax!r} s_comb={p.s_comb!r}",
            file=sys.stderr,
        )
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# --- parser ---------------------------------------------------------------------

def _add_state_args(p: argparse.ArgumentParser, positional: bool = True) -> None:
    if positional:
        p.add_argument("state_file", nargs="?", help="JSON file with a 'rho' key")
    p.add_argument("--family", help="named family instead of a file")
    p.add_argument("--param", type=float, help="family parameter")
    p.add_argument("--kappa", type=float, help="Schmidt coefficient k1 for gen-werner")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiddencoherence",
        description="Coherence and CHSH violation of two-qubit states under global unitaries.",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="measures, spectrum and bounds of one state", allow_abbrev=False)
    _add_state_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="bound curves over a family parameter grid", allow_abbrev=False)
    p.add_argument("--family", required=True)
    p.add_argument("--range", required=True, help="start:stop:step, inclusive")
    p.add_argument("--kappa", type=float, help="Schmidt coefficient k1 for gen-werner")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("transform", help="apply an optimal global unitary", allow_abbrev=False)
    _add_state_args(p)
    p.add_argument("--mode", choices=("min-coherence", "max-coherence"), required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="Monte Carlo check of the attainable region", allow_abbrev=False)
    _add_state_args(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--full-scale", action="store_true", help=f"use {FULL_SCALE_SAMPLES} samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--measure", choices=("haar", "jarlskog"), default="haar")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, StateError, DimensionError, theorems.SpectrumError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
