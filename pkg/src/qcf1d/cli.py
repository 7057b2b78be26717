"""Experiment runner: every verifiable claim as a named subcommand.

Subcommands write one machine-readable table each (CSV with the full
config echoed in # comments, or JSON) and encode acceptance in the exit
status: 0 when every proved inequality and tolerance in the run holds,
1 when one fails, 2 for configuration errors.

Flags can also be given in a flat key=value config file (--config);
explicit flags override file values.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .lattice import DomainSpec
from .potentials import Coefficients, lennard_jones
from .scans import (
    OPERATOR_BUILDERS,
    coercivity_scan,
    coercivity_slope,
    convergence_scan_with_checks,
    eig_scan,
    infsup_scan,
    loglog_slope,
    patch_test_scan,
    write_table,
)
from .solver import named_load

POTENTIALS = {"lj": lennard_jones}


def _int_list(s: str) -> list[int]:
    return [int(tok) for tok in s.split(",") if tok != ""]


def _float_list(s: str) -> list[float]:
    return [float(tok) for tok in s.split(",") if tok != ""]


def _bool(s: str) -> bool:
    if isinstance(s, bool):
        return s
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


# converters for config-file values, keyed by argparse dest
CONFIG_TYPES = {
    "phiF": float,
    "phi2F": float,
    "potential": str,
    "F": float,
    "F_list": _float_list,
    "N": int,
    "N_list": _int_list,
    "K": int,
    "K_ratio": float,
    "K_all": _bool,
    "M_factor": int,
    "p_list": _float_list,
    "load": str,
    "jobs": int,
    "out": str,
    "format": str,
    "seed": int,
    "operator": str,
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration of one subcommand run."""

    command: str
    phiF: Optional[float] = None
    phi2F: Optional[float] = None
    potential: str = "lj"
    F: Optional[float] = None
    F_list: Optional[list] = None
    N: Optional[int] = None
    N_list: list = field(default_factory=list)
    K: Optional[int] = None
    K_ratio: Optional[float] = None
    K_all: bool = False
    M_factor: int = 4
    p_list: list = field(default_factory=lambda: [1.0, 2.0, 4.0])
    load: str = "cospi"
    jobs: int = 1
    out: str = ""
    format: str = "csv"
    seed: int = 0
    operator: Optional[str] = None

    def coefficients(self) -> Coefficients:
        if self.phiF is not None and self.phi2F is not None:
            return Coefficients(self.phiF, self.phi2F)
        if self.F is not None:
            return Coefficients.from_potential(POTENTIALS[self.potential](), self.F)
        raise ValueError("need either --phiF and --phi2F, or --potential with --F")

    def k_for(self, n: int) -> int:
        if self.K is not None:
            return self.K
        ratio = 0.25 if self.K_ratio is None else self.K_ratio
        return max(2, int(round(ratio * n)))

    def nk_pairs(self) -> list[tuple]:
        if not self.N_list:
            raise ValueError("need --N-list")
        pairs = []
        for n in self.N_list:
            if self.K_all:
                pairs.extend((n, k) for k in range(2, n // 2 + 1))
            else:
                pairs.append((n, self.k_for(n)))
        for n, k in pairs:
            DomainSpec(n, k)  # validates the range, K included
        return pairs

    def echo(self) -> dict:
        d = {
            "command": self.command,
            "jobs": self.jobs,
            "format": self.format,
            "seed": self.seed,
            "out": self.out,
        }
        for key in (
            "phiF",
            "phi2F",
            "potential",
            "F",
            "F_list",
            "N",
            "N_list",
            "K",
            "K_ratio",
            "K_all",
            "M_factor",
            "p_list",
            "load",
            "operator",
        ):
            v = getattr(self, key)
            if v is not None and v != []:
                d[key] = v
        return d


def read_config_file(path: str) -> dict:
    """Flat key=value file; # starts a comment; keys must be known flags."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key = key.strip().replace("-", "_")
            val = val.strip()
            if key not in CONFIG_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = CONFIG_TYPES[key](val)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return values


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="flat key=value config file; flags override it")
    sub.add_argument("--phiF", type=float, default=None)
    sub.add_argument("--phi2F", type=float, default=None)
    sub.add_argument("--potential", choices=sorted(POTENTIALS), default=None)
    sub.add_argument("--F", type=float, default=None)
    sub.add_argument("--N-list", dest="N_list", type=_int_list, default=None)
    sub.add_argument("--K", type=int, default=None)
    sub.add_argument("--K-ratio", dest="K_ratio", type=float, default=None)
    sub.add_argument("--M-factor", dest="M_factor", type=int, default=None)
    sub.add_argument("--jobs", type=int, default=None)
    sub.add_argument("--out", default=None)
    sub.add_argument("--format", choices=("csv", "json"), default=None)
    sub.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcf1d",
        description="experiments for the force-based coupled chain",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("patch-test", help="ghost-force residuals at uniform states")
    _add_common(p)
    p.add_argument("--F-list", dest="F_list", type=_float_list, default=None)
    p.add_argument("--K-all", dest="K_all", action="store_true", default=None)

    p = subs.add_parser("coercivity", help="scan the minimum of the quadratic form")
    _add_common(p)

    p = subs.add_parser("infsup", help="inf-sup bounds and exact 2-norm values")
    _add_common(p)
    p.add_argument("--p-list", dest="p_list", type=_float_list, default=None)

    p = subs.add_parser("convergence", help="coupled-vs-reference error study")
    _add_common(p)
    p.add_argument("--load", choices=("cospi", "const", "zero"), default=None)

    p = subs.add_parser("dump-operator", help="write (row,col,value) triples")
    _add_common(p)
    p.add_argument("--operator", choices=sorted(OPERATOR_BUILDERS), default=None)
    p.add_argument("--N", type=int, default=None)

    p = subs.add_parser("eig-scan", help="exploratory eigenvalue-sign scan")
    _add_common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for key in CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
        elif key in file_values:
            merged[key] = file_values[key]
    cfg = RunConfig(command=args.command, **merged)
    if not cfg.out:
        raise ValueError("missing output path (--out)")
    if cfg.jobs < 1:
        raise ValueError("--jobs must be >= 1")
    return cfg


@dataclass(frozen=True)
class TripleRow:
    row: int
    col: int
    value: float


def cmd_patch_test(cfg: RunConfig) -> int:
    phi = POTENTIALS[cfg.potential]()
    F_values = cfg.F_list or ([cfg.F] if cfg.F is not None else [0.9, 1.0, 1.1])
    rows = patch_test_scan(phi, F_values, cfg.nk_pairs(), jobs=cfg.jobs)
    ok = all(r.passed for r in rows)
    extras = {"max_residual": max(r.residual for r in rows), "all_passed": ok}
    write_table(cfg.out, cfg.format, cfg.command, cfg.echo(), rows, extras)
    return 0 if ok else 1


def cmd_coercivity(cfg: RunConfig) -> int:
    c = cfg.coefficients()
    rows = coercivity_scan(c, cfg.nk_pairs(), jobs=cfg.jobs)
    slope = coercivity_slope(rows)
    extras = {} if slope is None else {"slope_abs_rayleigh_vs_N": slope}
    # feasibility of the witness is the one proved relation in this scan
    ok = all(r.rayleigh_min <= r.witness_value + 1e-9 * max(1.0, abs(r.witness_value)) for r in rows)
    write_table(cfg.out, cfg.format, cfg.command, cfg.echo(), rows, extras)
    return 0 if ok else 1


def cmd_infsup(cfg: RunConfig) -> int:
    c = cfg.coefficients()
    rows = infsup_scan(c, cfg.nk_pairs(), cfg.p_list, jobs=cfg.jobs)
    extras = {}
    by_kind = {}
    for r in rows:
        by_kind.setdefault((r.kind, r.p), []).append(r)
    for (kind, p), group in sorted(by_kind.items()):
        if len(group) >= 2 and all(g.value > 0 for g in group):
            extras[f"slope_{kind}_p{p:g}"] = loglog_slope(
                [g.N for g in group], [g.value for g in group]
            )
    ok = True
    exact = {(r.N, r.K): r.value for r in rows if r.kind == "exact"}
    for r in rows:
        if r.kind == "upper_bound" and r.p == 2.0 and (r.N, r.K) in exact:
            ok = ok and exact[(r.N, r.K)] <= r.value + 1e-12
    write_table(cfg.out, cfg.format, cfg.command, cfg.echo(), rows, extras)
    return 0 if ok else 1


def cmd_convergence(cfg: RunConfig) -> int:
    c = cfg.coefficients()
    load = named_load(cfg.load)
    pairs = cfg.nk_pairs()
    checked = convergence_scan_with_checks(c, load, pairs, cfg.M_factor, jobs=cfg.jobs)
    rows = [rep for rep, _ in checked]
    ok = True
    for rep, half_t_l1 in checked:
        ok = ok and rep.err_strain_inf <= rep.bound_rhs
        ok = ok and rep.trunc_star <= rep.trunc_bound
        ok = ok and rep.trunc_star <= half_t_l1 + 1e-15
    extras = {"all_inequalities_hold": ok}
    errs = [r.err_strain_inf for r in rows]
    if len(rows) >= 2 and all(e > 0 for e in errs):
        extras["slope_err_vs_eps"] = loglog_slope([r.eps for r in rows], errs)
    write_table(cfg.out, cfg.format, cfg.command, cfg.echo(), rows, extras)
    return 0 if ok else 1


def cmd_dump_operator(cfg: RunConfig) -> int:
    if not cfg.operator:
        raise ValueError("need --operator")
    n = cfg.N if cfg.N is not None else (cfg.N_list[0] if cfg.N_list else None)
    if n is None:
        raise ValueError("need --N (or --N-list) for dump-operator")
    spec = DomainSpec(n, cfg.k_for(n))
    op = OPERATOR_BUILDERS[cfg.operator](cfg.coefficients(), spec)
    rows = [TripleRow(*t) for t in op.to_triples()]
    write_table(cfg.out, cfg.format, cfg.command, cfg.echo(), rows, {})
    return 0


def cmd_eig_scan(cfg: RunConfig) -> int:
    rows = eig_scan(cfg.coefficients(), cfg.nk_pairs(), jobs=cfg.jobs)
    write_table(cfg.out, cfg.format, cfg.command, cfg.echo(), rows, {})
    return 0


COMMANDS = {
    "patch-test": cmd_patch_test,
    "coercivity": cmd_coercivity,
    "infsup": cmd_infsup,
    "convergence": cmd_convergence,
    "dump-operator": cmd_dump_operator,
    "eig-scan": cmd_eig_scan,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except RuntimeError as exc:  # solver/eigensolver failures
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():  # console-script wrapper
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
