"""Parameter sweeps behind the CLI, plus table serialization.

Each scan maps a list of domain sizes to rows of plain numbers; rows are
small frozen dataclasses so they serialize uniformly to CSV and JSON.
Sweep points are independent, so a worker pool can evaluate them in any
order; results are always emitted in input order.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from functools import partial
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .chain import force_qcf
from .lattice import DomainSpec, lp_norm, uniform_positions
from .operators import assemble_eqcf, assemble_la, assemble_llqc, assemble_lqcf, assemble_ea
from .potentials import Coefficients, PairPotential
from .solver import ErrorReport, ForceField, error_report_detailed
from .stability import (
    infsup_2,
    infsup_p_upper,
    quadratic_form,
    rayleigh_min,
    rdd_margin,
    unstable_candidate,
)

PATCH_TEST_TOL = 1e-13


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2:
        raise ValueError("need at least two points for a slope")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit needs positive data")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def _run_points(fn: Callable, points: Iterable, jobs: int) -> list:
    points = list(points)
    if jobs <= 1 or len(points) <= 1:
        return [fn(pt) for pt in points]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, points))


@dataclass(frozen=True)
class PatchTestRow:
    F: float
    N: int
    K: int
    residual: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class CoercivityScanRow:
    N: int
    K: int
    rayleigh_min: float
    witness_value: float


@dataclass(frozen=True)
class InfSupScanRow:
    N: int
    K: int
    p: float
    kind: str
    value: float


@dataclass(frozen=True)
class EigScanRow:
    N: int
    K: int
    min_real: float
    max_imag_abs: float
    n_nonpositive: int


def _patch_point(phi: PairPotential, point) -> PatchTestRow:
    F, n, k = point
    spec = DomainSpec(n, k)
    y = uniform_positions(F, n, spec.eps, snap=True)
    residual = float(np.max(np.abs(force_qcf(y, spec, phi).values)))
    scale = max(1.0, abs(float(phi.deriv1(F))) + abs(float(phi.deriv1(2.0 * F))))
    tol = PATCH_TEST_TOL * scale / spec.eps
    return PatchTestRow(F, n, k, residual, tol, residual <= tol)


def patch_test_scan(
    phi: PairPotential,
    F_values: Sequence[float],
    nk_pairs: Sequence[tuple],
    jobs: int = 1,
) -> list[PatchTestRow]:
    """Ghost-force residuals of the coupled force at uniform states."""
    points = [(F, n, k) for F in F_values for (n, k) in nk_pairs]
    return _run_points(partial(_patch_point, phi), points, jobs)


def _coercivity_point(c: Coefficients, point) -> CoercivityScanRow:
    n, k = point
    spec = DomainSpec(n, k)
    r = rayleigh_min(c, spec)
    witness = min(
        quadratic_form(c, spec, unstable_candidate(spec, "+")),
        quadratic_form(c, spec, unstable_candidate(spec, "-")),
    )
    return CoercivityScanRow(n, k, r, witness)


def coercivity_scan(
    c: Coefficients, nk_pairs: Sequence[tuple], jobs: int = 1
) -> list[CoercivityScanRow]:
    """Rayleigh minima next to the value at the explicit spike candidate."""
    return _run_points(partial(_coercivity_point, c), nk_pairs, jobs)


def coercivity_slope(rows: Sequence[CoercivityScanRow]) -> Optional[float]:
    """Log-log slope of |rayleigh_min| vs N over the negative-value rows."""
    neg = [r for r in rows if r.rayleigh_min < 0.0]
    if len(neg) < 2:
        return None
    return loglog_slope([r.N for r in neg], [abs(r.rayleigh_min) for r in neg])


def _infsup_point(c: Coefficients, ps: Sequence[float], point) -> list[InfSupScanRow]:
    n, k = point
    spec = DomainSpec(n, k)
    rows = [
        InfSupScanRow(n, k, np.inf, "lower_bound", 0.5 * rdd_margin(assemble_eqcf(c, spec))),
        InfSupScanRow(n, k, 2.0, "exact", infsup_2(assemble_eqcf(c, spec))),
    ]
    for p in ps:
        rows.append(InfSupScanRow(n, k, float(p), "upper_bound", infsup_p_upper(c, spec, p)))
    return rows


def infsup_scan(
    c: Coefficients,
    nk_pairs: Sequence[tuple],
    ps: Sequence[float],
    jobs: int = 1,
) -> list[InfSupScanRow]:
    """Certified lower bound, exact 2-norm value, and probe upper bounds."""
    nested = _run_points(partial(_infsup_point, c, list(ps)), nk_pairs, jobs)
    return [row for group in nested for row in group]


def _convergence_point(c: Coefficients, load: ForceField, m_factor: int, point):
    n, k = point
    spec = DomainSpec(n, k, M=m_factor * n)
    report, details = error_report_detailed(c, load, spec)
    half_t_l1 = 0.5 * lp_norm(details["t"], spec.eps, 1)
    return report, half_t_l1


def convergence_scan_with_checks(
    c: Coefficients,
    load: ForceField,
    nk_pairs: Sequence[tuple],
    m_factor: int = 4,
    jobs: int = 1,
) -> list[tuple]:
    """(ErrorReport, half 1-norm of the truncation error) per sweep point."""
    return _run_points(partial(_convergence_point, c, load, m_factor), nk_pairs, jobs)


def convergence_scan(
    c: Coefficients,
    load: ForceField,
    nk_pairs: Sequence[tuple],
    m_factor: int = 4,
    jobs: int = 1,
) -> list[ErrorReport]:
    return [rep for rep, _ in convergence_scan_with_checks(c, load, nk_pairs, m_factor, jobs)]


def _eig_point(c: Coefficients, point) -> EigScanRow:
    n, k = point
    ev = np.linalg.eigvals(assemble_lqcf(c, DomainSpec(n, k)).interior_block())
    return EigScanRow(
        n,
        k,
        float(ev.real.min()),
        float(np.abs(ev.imag).max()),
        int(np.sum(ev.real <= 0.0)),
    )


def eig_scan(c: Coefficients, nk_pairs: Sequence[tuple], jobs: int = 1) -> list[EigScanRow]:
    """Exploratory eigenvalue-sign scan of the (nonsymmetric) coupled operator."""
    return _run_points(partial(_eig_point, c), nk_pairs, jobs)


OPERATOR_BUILDERS = {
    "La": lambda c, spec: assemble_la(c, spec.N, spec.eps),
    "Llqc": lambda c, spec: assemble_llqc(c, spec.N, spec.eps),
    "Lqcf": assemble_lqcf,
    "Ea": lambda c, spec: assemble_ea(c, spec.N, spec.eps),
    "Eqcf": assemble_eqcf,
}


def _format_value(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_rows(rows: Sequence) -> tuple[list[str], list[list]]:
    """Column names and value lists for a sequence of row dataclasses."""
    if not rows:
        return [], []
    names = [f.name for f in fields(rows[0])]
    return names, [[getattr(r, n) for n in names] for r in rows]


def write_table(
    path: str,
    fmt: str,
    command: str,
    config: dict,
    rows: Sequence,
    extras: Optional[dict] = None,
) -> None:
    """Write scan rows as CSV (with a config echo in # comments) or JSON."""
    extras = extras or {}
    names, values = serialize_rows(rows)
    if fmt == "csv":
        lines = [f"# qcf1d {command}"]
        for k in sorted(config):
            lines.append(f"# {k}={_format_value(config[k])}")
        for k in sorted(extras):
            lines.append(f"# {k}={_format_value(extras[k])}")
        lines.append(",".join(names))
        for row in values:
            lines.append(",".join(_format_value(v) for v in row))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    elif fmt == "json":
        doc = {
            "command": command,
            "config": config,
            "extras": extras,
            "rows": [dict(zip(names, row)) for row in values],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, default=float)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format '{fmt}'")
