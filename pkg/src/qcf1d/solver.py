"""Reference and coupled solves, truncation errors, convergence reports.

The reference problem resolves the whole chain (half-width M, usually
4N) atomistically; the coupled problem lives on the computational domain
-N..N with boundary values copied from the reference solution, so every
measured error is coupling error and not boundary error.

Plugging the reference solution into the coupled equations leaves a
residual supported in the continuum region, equal there to
eps^2 * phi2F * (centered fourth difference); measuring it in the dual
norm of dual_norm_star and dividing by the certified inf-sup constant
bounds the strain error at order eps^2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .lattice import DomainSpec, Field, diff, diff3, diff4_centered, lp_norm
from .operators import assemble_la, assemble_lqcf
from .potentials import Coefficients
from .stability import dual_norm_star

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class ForceField:
    """External load: a closed form sampled at x_j = j*eps, or stored samples."""

    fn: Optional[Callable] = None
    samples: Optional[Field] = None
    name: str = ""

    @classmethod
    def from_function(cls, fn: Callable, name: str = "") -> "ForceField":
        return cls(fn=fn, name=name)

    @classmethod
    def from_samples(cls, samples: Field, name: str = "") -> "ForceField":
        return cls(samples=samples, name=name)

    def sample(self, half_width: int, eps: float) -> Field:
        if self.fn is not None:
            x = np.arange(-half_width, half_width + 1) * eps
            v = np.asarray(self.fn(x), dtype=float)
            if v.shape != x.shape:
                raise ValueError("load function must map samples elementwise")
            return Field(v, -half_width)
        if self.samples is None:
            raise ValueError("empty ForceField")
        if self.samples.half_width < half_width:
            raise ValueError(
                f"stored samples cover half-width {self.samples.half_width}, "
                f"need {half_width}"
            )
        return self.samples.restrict(-half_width, half_width)


def named_load(name: str) -> ForceField:
    loads = {
        "cospi": ForceField.from_function(lambda x: np.cos(np.pi * x), name="cospi"),
        "const": ForceField.from_function(lambda x: np.ones_like(x), name="const"),
        "zero": ForceField.from_function(lambda x: np.zeros_like(x), name="zero"),
    }
    try:
        return loads[name]
    except KeyError:
        raise ValueError(f"unknown load '{name}', choose from {sorted(loads)}")


def _solve_refined(A: np.ndarray, b: np.ndarray, what: str) -> np.ndarray:
    """Direct dense solve with one step of iterative refinement.

    Raises with a condition estimate if the residual stays above
    RESIDUAL_TOL relative to the data.
    """
    try:
        lu, piv = scipy.linalg.lu_factor(A)
        x = scipy.linalg.lu_solve((lu, piv), b)
        x += scipy.linalg.lu_solve((lu, piv), b - A @ x)
    except scipy.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"{what}: factorization failed (condition estimate "
            f"{np.linalg.cond(A):.3e}): {exc}"
        ) from exc
    scale = float(np.max(np.abs(b)))
    resid = float(np.max(np.abs(A @ x - b)))
    if scale > 0.0 and resid > RESIDUAL_TOL * scale:
        raise RuntimeError(
            f"{what}: residual {resid:.3e} exceeds {RESIDUAL_TOL:.1e} * {scale:.3e} "
            f"(condition estimate {np.linalg.cond(A):.3e})"
        )
    return x


def solve_atomistic(c: Coefficients, f: Field, eps: float) -> Field:
    """Solve the linearized atomistic system with zero boundary values.

    f holds samples over the full chain -M..M; its boundary entries pair
    with constrained atoms and are ignored.
    """
    if not c.phiF + 4.0 * c.phi2F > 0.0:
        raise ValueError(
            f"atomistic system needs phiF + 4*phi2F > 0, got "
            f"{c.phiF + 4.0 * c.phi2F}"
        )
    m = f.half_width
    A = assemble_la(c, m, eps).interior_block()
    x = _solve_refined(A, f.values[1:-1], "atomistic solve")
    u = np.zeros(2 * m + 1)
    u[1:-1] = x
    return Field(u, -m)


def solve_qcf(
    c: Coefficients, f: Field, spec: DomainSpec, bc_left: float, bc_right: float
) -> Field:
    """Solve the coupled system on -N..N with prescribed boundary values.

    The boundary data enters through an affine lift, which the coupled
    operator annihilates, plus a homogeneous solve for the remainder.
    Outside the proven stability regime phiF + 8*phi2F > 0 the solve
    still runs (instability studies need it) but warns.
    """
    n = spec.N
    if f.half_width != n:
        raise ValueError(f"load must cover -N..N with N={n}")
    if not c.phiF + 8.0 * c.phi2F > 0.0:
        warnings.warn(
            f"phiF + 8*phi2F = {c.phiF + 8.0 * c.phi2F:.4g} <= 0: outside the "
            "proven stability regime",
            RuntimeWarning,
            stacklevel=2,
        )
    A = assemble_lqcf(c, spec).interior_block()
    x = _solve_refined(A, f.values[1:-1], "coupled solve")
    j = np.arange(-n, n + 1)
    u = bc_left + (bc_right - bc_left) * (n + j) / (2.0 * n)
    u[1:-1] += x
    u[0] = bc_left
    u[-1] = bc_right
    return Field(u, -n)


def _apply_la_interior(c: Coefficients, u: Field, eps: float, lo: int, hi: int) -> Field:
    """Interior atomistic stencil applied to u on rows lo..hi.

    u must extend two sites beyond the requested rows on both ends.
    """
    if u.lo > lo - 2 or u.hi < hi + 2:
        raise ValueError("field does not cover the stencil of the requested rows")
    v = u.values
    idx = np.arange(lo - u.lo, hi - u.lo + 1)
    nn = -v[idx + 1] + 2.0 * v[idx] - v[idx - 1]
    nnn = -v[idx + 2] + 2.0 * v[idx] - v[idx - 2]
    return Field((c.phiF * nn + c.phi2F * nnn) / eps**2, lo)


def truncation_error(u_a: Field, c: Coefficients, spec: DomainSpec) -> Field:
    """Residual of the reference solution in the coupled equations.

    Computed directly as (coupled operator applied to the restriction)
    minus (atomistic operator applied to the full field), with zeros at
    the boundary sites.  Needs M >= N+2 so the atomistic stencil at rows
    +-(N-1) stays inside the reference chain.
    """
    spec.require_reference(2)
    n = spec.N
    if u_a.half_width < n + 2:
        raise ValueError("reference field too short for the stencils at +-(N-1)")
    lq = assemble_lqcf(c, spec).apply(u_a.restrict(-n, n))
    la = _apply_la_interior(c, u_a, spec.eps, -n + 1, n - 1)
    t = np.zeros(2 * n + 1)
    t[1:-1] = lq.values - la.values
    return Field(t, -n)


def truncation_error_stencil(u_a: Field, c: Coefficients, spec: DomainSpec) -> Field:
    """Same residual via the closed form: eps^2 * phi2F * D4 on the continuum.

    Independent route used to cross-check truncation_error; zero on the
    atomistic sites and at the boundary.
    """
    spec.require_reference(2)
    n, k = spec.N, spec.K
    eps = spec.eps
    d4 = diff4_centered(u_a, eps)
    t = np.zeros(2 * n + 1)
    j = np.arange(-n, n + 1)
    cont = (np.abs(j) > k) & (np.abs(j) <= n - 1)
    d4_vals = d4.values[j[cont] - d4.lo]
    t[cont] = eps**2 * c.phi2F * d4_vals
    return Field(t, -n)


@dataclass(frozen=True)
class ErrorReport:
    """One convergence-study run: measured errors next to the proved bounds."""

    N: int
    K: int
    M: int
    eps: float
    err_strain_inf: float
    bound_rhs: float
    trunc_star: float
    trunc_bound: float


def error_report_detailed(c: Coefficients, load: ForceField, spec: DomainSpec):
    """Run the reference and coupled solves and assemble an ErrorReport.

    Returns (report, details) where details holds the fields every
    downstream check needs (solutions, truncation error both ways).
    """
    if not c.phiF + 8.0 * c.phi2F > 0.0:
        raise ValueError("error report needs the stability regime phiF + 8*phi2F > 0")
    m = spec.require_reference(2)
    n = spec.N
    eps = spec.eps
    f_m = load.sample(m, eps)
    u_a = solve_atomistic(c, f_m, eps)
    u_q = solve_qcf(c, f_m.restrict(-n, n), spec, u_a.at(-n), u_a.at(n))
    e = u_a.restrict(-n, n) - u_q
    err_strain_inf = lp_norm(diff(e, eps), eps, np.inf)
    d3 = diff3(u_a, eps)
    cbonds = spec.extended_continuum_bonds()
    d3_max = float(np.max(np.abs(d3.values[cbonds - d3.lo])))
    t = truncation_error(u_a, c, spec)
    t_stencil = truncation_error_stencil(u_a, c, spec)
    gamma = c.phiF + 8.0 * c.phi2F
    report = ErrorReport(
        N=n,
        K=spec.K,
        M=m,
        eps=eps,
        err_strain_inf=err_strain_inf,
        bound_rhs=4.0 * eps**2 * abs(c.phi2F) * d3_max / gamma,
        trunc_star=dual_norm_star(t, eps),
        trunc_bound=2.0 * eps**2 * abs(c.phi2F) * d3_max,
    )
    details = {
        "u_a": u_a,
        "u_qcf": u_q,
        "t": t,
        "t_stencil": t_stencil,
        "f": f_m,
        "d3_max_continuum": d3_max,
    }
    return report, details


def error_report(c: Coefficients, load: ForceField, spec: DomainSpec) -> ErrorReport:
    return error_report_detailed(c, load, spec)[0]
