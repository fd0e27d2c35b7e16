"""Solve, fit growth, optionally sum; write a deterministic artifact bundle.

Outputs are JSON with sorted keys and no timestamps, so a rerun from
``run-manifest.json`` reproduces every file byte for byte.
"""
from __future__ import annotations

import cmath
import csv
import hashlib
import io
import json
import math
import platform
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import mpmath
import numpy as np
import scipy

from . import __version__
from .dsl import ProblemFile, parse_problem_file
from .errors import InvalidParameterError, MomentSumError
from .growth import (
    GrowthReport,
    coefficient_log_norms,
    fit_moment_order,
    predicted_order,
    radius_estimate,
)
from .pade import PadeRankWarning
from .solver import FormalSolution, solve_formal
from .summation import SummationResult, sum_grid, t_series_at

SCHEMA_VERSION = 1
DEFAULT_TGRID = (0.02, 0.04, 0.06, 0.08, 0.1)
STAGES = ("solve", "growth", "sum")


class StageError(MomentSumError):
    """Wraps a component failure with the pipeline stage it came from."""

    def __init__(self, stage: str, cause: Exception):
        self.stage, self.cause = stage, cause
        super().__init__(f"[{stage}] {cause}")


@dataclass
class PipelineResult:
    solution: FormalSolution
    growth: Optional[GrowthReport]
    radius: Optional[float]
    summation: Optional[SummationResult]
    files: dict


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def resolve_options(pf: ProblemFile, overrides: Optional[dict] = None) -> dict:
    opts = dict(pf.options)
    for key, value in (overrides or {}).items():
        if value is not None:
            opts[key] = value
    return opts


def _stage(name):
    def wrap(fn):
        def inner(*a, **kw):
            try:
                return fn(*a, **kw)
            except MomentSumError as exc:
                if isinstance(exc, StageError):
                    raise
                raise StageError(name, exc) from exc

        return inner

    return wrap


@_stage("solve")
def _solve(pf: ProblemFile, opts) -> FormalSolution:
    return solve_formal(pf.problem, opts["nt"], opts["nz"])


@_stage("growth")
def _growth(pf: ProblemFile, sol: FormalSolution, opts):
    rp = opts["rprime"]
    logs = coefficient_log_norms(sol.u, rp)
    try:
        pred = predicted_order(pf.problem)
    except MomentSumError:
        pred = None
    report = fit_moment_order(None, log_norms=logs, predicted_sigma=pred, r_prime=float(rp))
    try:
        radius = radius_estimate(None, log_norms=logs)
    except InvalidParameterError:
        radius = None
    return report, radius


def _alpha(opts, growth: Optional[GrowthReport]) -> float:
    if opts.get("alpha") is not None:
        alpha = float(opts["alpha"])
    elif growth is not None and growth.predicted_sigma:
        alpha = float(growth.predicted_sigma)
    else:
        alpha = 1.0
    if not 0 < alpha < 2:
        raise InvalidParameterError(f"summation order alpha must lie in (0, 2), got {alpha}")
    return alpha


@_stage("sum")
def _sum(sol: FormalSolution, opts, growth) -> SummationResult:
    alpha = _alpha(opts, growth)
    d = float(opts.get("direction") or 0.0)
    z0 = complex(opts.get("z0") or 0.0)
    grid = opts.get("tgrid")
    if grid is None:
        ts = [r * cmath.exp(1j * d) for r in DEFAULT_TGRID]
    else:
        ts = [complex(t) for t in grid]
    series = t_series_at(sol.u, z0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PadeRankWarning)
        return sum_grid(series, alpha, d, ts, z0=z0)


def _growth_csv(report: GrowthReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "s_n", "fit_prediction"])
    for n, s in enumerate(report.norms):
        w.writerow([n, repr(float(s)), repr(report.prediction(n))])
    return buf.getvalue()


def run_pipeline(pf: ProblemFile, options: Optional[dict] = None, out_dir=None,
                 stages=STAGES) -> PipelineResult:
    """Run the requested stages and write their outputs to ``out_dir``."""
    opts = resolve_options(pf, options)
    if _needs_reparse(pf, opts):
        pf = parse_problem_file(pf.text, opts["nt"], opts["nz"])
    files = {}
    sol = _solve(pf, opts)
    files["solution.json"] = _dump({
        "schema_version": SCHEMA_VERSION,
        "problem": pf.pretty(),
        **sol.to_json(),
    })
    files["solution.csv"] = sol.to_csv()
    growth = radius = summation = None
    if "growth" in stages or "sum" in stages:
        growth, radius = _growth(pf, sol, opts)
        gj = growth.to_json()
        gj["schema_version"] = SCHEMA_VERSION
        gj["radius_estimate"] = radius if radius is None or math.isfinite(radius) else "inf"
        files["growth.json"] = _dump(gj)
        files["growth.csv"] = _growth_csv(growth)
    if "sum" in stages:
        summation = _sum(sol, opts, growth)
        files["summation.json"] = summation.dumps() + "\n"
        files["summation.csv"] = summation.to_csv()
    files["run-manifest.json"] = _dump(_manifest(pf, opts, stages, files))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text, encoding="utf-8")
    return PipelineResult(sol, growth, radius, summation, files)


def _needs_reparse(pf: ProblemFile, opts) -> bool:
    return opts["nt"] != pf.options["nt"] or opts["nz"] != pf.options["nz"]


def _manifest(pf: ProblemFile, opts, stages, files) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "package": "momentsum",
        "version": __version__,
        "stages": list(stages),
        "problem_text": pf.text,
        "options": {k: _jsonable(v) for k, v in sorted(opts.items())},
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "mpmath": mpmath.__version__,
            "scipy": scipy.__version__,
        },
        # every stage is deterministic; no random numbers are drawn
        "seed": None,
        "outputs": {name: hashlib.sha256(text.encode()).hexdigest() for name, text in sorted(files.items())},
    }


def options_from_manifest(manifest: dict) -> dict:
    opts = {}
    for key, value in manifest["options"].items():
        if key == "rprime":
            opts[key] = Fraction(value)
        elif key == "tgrid" and value is not None:
            opts[key] = [complex(*v) if isinstance(v, list) else v for v in value]
        else:
            opts[key] = value
    return opts


def rerun_from_manifest(path, out_dir) -> PipelineResult:
    manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    opts = options_from_manifest(manifest)
    pf = parse_problem_file(manifest["problem_text"], opts["nt"], opts["nz"])
    return run_pipeline(pf, opts, out_dir, tuple(manifest["stages"]))
