"""Command-line front end.

Every subcommand reads an INI-style config (``[section]`` headers with
``key = value`` lines), validates it completely, runs the library operation
and writes a CSV table to ``--out`` plus a JSON summary next to it
(``<stem>.summary.json``).  The summary is echoed on stdout.

Exit status: 0 success, 2 validation error, 3 numeric non-convergence,
4 lemma / verdict failure under ``--strict``.  Failures print one line
``varexp: error code=<code> reason="<text>"`` on stderr.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .domains import (
    Annulus,
    Box,
    DiskSet,
    Domain,
    Union,
    build_grid,
    measure,
    neighborhood_halfplane,
)
from .errors import NonConvergenceError, ValidationError, VarexpError
from .exponents import Constant, ExponentField, Radial, TwoLevel, essential_bounds
from .falsifier import SLOPE_THRESHOLD, _check_schedule, falsify, geometric_schedule, proof_chain_check
from .modular import Indicator, Polynomial, ScaledIndicator, luxemburg_norm, modular
from .operators import HarmonicHalfSpace, kernel_from_name, project_many
from .verifier import harmonic_neighborhood, verify_lower_bound

COMMANDS = ("norm", "project", "verify-lemma", "falsify")


def fmt(x) -> str:
    """17 significant digits: round-trips every double."""
    return format(float(x), ".17g")


def _floats(text, what):
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ValidationError(f"{what}: expected numbers, got {text!r}") from exc


def parse_region(text: str, dim: int):
    """``box lo.. hi..`` | ``disk c.. r`` | ``annulus cx cy r_in r_out``, joined by ``|`` for unions."""
    parts = [p.strip() for p in text.split("|")]
    if len(parts) > 1:
        return Union(tuple(parse_region(p, dim) for p in parts))
    head, _, rest = parts[0].partition(" ")
    vals = _floats(rest, f"region {parts[0]!r}")
    kind = head.lower()
    if kind == "box" and len(vals) == 2 * dim:
        return Box(vals[:dim], vals[dim:])
    if kind in ("disk", "ball") and len(vals) == dim + 1:
        return DiskSet(vals[:dim], vals[dim])
    if kind == "annulus" and dim == 2 and len(vals) == 4:
        return Annulus(vals[:2], vals[2], vals[3])
    raise ValidationError(f"cannot parse {dim}-d region {parts[0]!r}")


@dataclass
class RunConfig:
    command: str
    cfg: configparser.ConfigParser
    resolution: int
    tolerance: float
    seed: int

    def get(self, section, key, default=None):
        if self.cfg.has_option(section, key):
            return self.cfg.get(section, key).strip()
        if default is None:
            raise ValidationError(f"missing [{section}] {key}")
        return default

    def number(self, section, key, default=None, kind=float):
        raw = self.get(section, key, None if default is None else str(default))
        try:
            return kind(float(raw)) if kind is int else kind(raw)
        except ValueError as exc:
            raise ValidationError(f"[{section}] {key}: bad number {raw!r}") from exc

    @property
    def domain(self) -> Domain:
        kind = self.get("domain", "kind").lower()
        if kind == "halfspace":
            return Domain.halfspace(self.number("domain", "n", kind=int))
        return Domain(kind)


def load_config(path, command, resolution=None, seed=None) -> RunConfig:
    cfg = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path, encoding="utf-8") as fh:
            cfg.read_file(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ValidationError(f"malformed config: {exc}") from exc
    declared = cfg.get("run", "command", fallback=command).strip()
    if declared != command:
        raise ValidationError(f"config is for {declared!r}, not {command!r}")
    rc = RunConfig(command, cfg, 0, 0.0, 0)
    rc.resolution = resolution if resolution is not None else rc.number("run", "resolution", 64, int)
    rc.tolerance = rc.number("run", "tolerance", 1e-10)
    rc.seed = seed if seed is not None else rc.number("run", "seed", 0, int)
    if rc.resolution < 2:
        raise ValidationError("resolution must be >= 2")
    if not rc.tolerance > 0:
        raise ValidationError("tolerance must be positive")
    return rc


def build_exponent(rc: RunConfig, domain: Domain) -> ExponentField:
    kind = rc.get("exponent", "kind").lower()
    dim = domain.dim
    if kind == "constant":
        rule = Constant(rc.number("exponent", "value"))
    elif kind == "two_level":
        rule = TwoLevel(
            parse_region(rc.get("exponent", "minus_region"), dim),
            rc.number("exponent", "minus_value"),
            parse_region(rc.get("exponent", "plus_region"), dim),
            rc.number("exponent", "plus_value"),
            rc.number("exponent", "background"),
        )
    elif kind == "radial":
        center = rc.get("exponent", "center", "")
        rule = Radial(_floats(rc.get("exponent", "coefficients"), "coefficients"),
                      _floats(center, "center") if center else None)
    else:
        raise ValidationError(f"unknown exponent kind {kind!r}")
    return ExponentField(domain, rule)


def build_function(rc: RunConfig, domain: Domain):
    """Returns ``(function, integration region)``."""
    kind = rc.get("function", "kind").lower()
    if kind in ("indicator", "scaled_indicator"):
        region = parse_region(rc.get("function", "region"), domain.dim)
        if kind == "indicator":
            return Indicator(region, domain), region
        return ScaledIndicator(rc.number("function", "k"), region, domain), region
    if kind == "polynomial":
        try:
            coeffs = [complex(t) for t in rc.get("function", "coefficients").replace(",", " ").split()]
        except ValueError as exc:
            raise ValidationError("polynomial coefficients must be complex literals") from exc
        support = rc.get("function", "support", "")
        if support:
            region = parse_region(support, domain.dim)
        elif domain.kind == "disk":
            region = DiskSet((0.0, 0.0), 1.0 - 1.0 / rc.resolution**2)
        else:
            raise ValidationError("polynomial on a half-plane needs [function] support")
        return Polynomial(coeffs, domain), region
    raise ValidationError(f"unknown function kind {kind!r}")


def build_kernel(rc: RunConfig, domain: Domain):
    kid = kernel_from_name(rc.get("kernel", "id"), domain.dim)
    if kid.domain != domain:
        raise ValidationError(f"kernel {kid.name} lives on {kid.domain.name}, config domain is {domain.name}")
    return kid


def build_neighborhood(rc: RunConfig, kid):
    """Neighborhood from ``region``, from ``tau``/``gamma`` (half-plane) or searched ``around`` a point."""
    sec = "neighborhood"
    dim = kid.domain.dim
    if rc.cfg.has_option(sec, "region"):
        return parse_region(rc.get(sec, "region"), dim)
    if rc.cfg.has_option(sec, "gamma"):
        return neighborhood_halfplane(_floats(rc.get(sec, "tau"), "tau"), rc.number(sec, "gamma"))
    if rc.cfg.has_option(sec, "around") and isinstance(kid, HarmonicHalfSpace):
        return harmonic_neighborhood(kid.n, _floats(rc.get(sec, "around"), "around")).box
    raise ValidationError("[neighborhood] needs region, tau+gamma, or around (harmonic kernels)")


def _coords_header(dim, prefix="x"):
    return ["re_z", "im_z"] if dim == 2 else [f"{prefix}{i + 1}" for i in range(dim)]


def run_norm(rc: RunConfig):
    domain = rc.domain
    p = build_exponent(rc, domain)
    f, region = build_function(rc, domain)
    grid = build_grid(region, domain, rc.resolution)
    rho = modular(f, p, grid)
    norm = luxemburg_norm(f, p, grid, rc.tolerance)
    p_lo, p_hi = essential_bounds(p, region, rc.resolution)
    rows = [
        ["modular", fmt(rho)],
        ["luxemburg_norm", fmt(norm)],
        ["measure", fmt(measure(region, domain))],
        ["p_minus", fmt(p_lo)],
        ["p_plus", fmt(p_hi)],
        ["nodes", str(len(grid))],
    ]
    summary = {"luxemburg_norm": norm, "modular": rho, "exponent": p.describe()}
    return ["quantity", "value"], rows, summary, True


def run_project(rc: RunConfig):
    domain = rc.domain
    kid = build_kernel(rc, domain)
    f, region = build_function(rc, domain)
    targets = parse_region(rc.get("targets", "region"), domain.dim)
    t_res = rc.number("targets", "resolution", 8, int)
    target_grid = build_grid(targets, domain, t_res)
    grid = build_grid(region, domain, rc.resolution)
    values = project_many(kid, f, target_grid.nodes, grid)
    header = _coords_header(domain.dim) + ["re_value", "im_value"]
    rows = [[fmt(c) for c in node] + [fmt(v.real), fmt(v.imag)] for node, v in zip(target_grid.nodes, values)]
    summary = {"kernel": kid.name, "targets": len(rows), "max_abs_value": float(np.max(np.abs(values)))}
    return header, rows, summary, True


def run_verify(rc: RunConfig):
    domain = rc.domain
    kid = build_kernel(rc, domain)
    K = build_neighborhood(rc, kid)
    trials = rc.number("verify", "trials", 50, int)
    inf_res = rc.number("verify", "infimum_resolution", 0, int) or None
    report = verify_lower_bound(kid, K, trials, rc.resolution, rc.seed, inf_res)
    dim = domain.dim
    header = (["trial"] + [f"e_lo{i + 1}" for i in range(dim)] + [f"e_hi{i + 1}" for i in range(dim)]
              + [f"z{i + 1}" for i in range(dim)] + ["measure", "lhs", "bound", "margin"])
    rows = []
    for i, t in enumerate(report.trials):
        rows.append([str(i)] + [fmt(v) for v in t.E.lo + t.E.hi] + [fmt(v) for v in t.z]
                    + [fmt(t.measure), fmt(t.lhs), fmt(t.bound), fmt(t.margin)])
    summary = {
        "kernel": kid.name,
        "neighborhood": K.descriptor(),
        "c_tau": report.c_tau,
        "min_margin": report.min_margin,
        "tol_quadrature": report.tol_quadrature,
        "verified": report.verified,
    }
    return header, rows, summary, report.verified


def run_falsify(rc: RunConfig):
    domain = rc.domain
    kid = build_kernel(rc, domain)
    p = build_exponent(rc, domain)
    K = build_neighborhood(rc, kid)
    sec = "falsify"
    if rc.cfg.has_option(sec, "k_schedule"):
        ks = _floats(rc.get(sec, "k_schedule"), "k_schedule")
    else:
        ks = geometric_schedule(rc.number(sec, "k_min", 1.0), rc.number(sec, "k_max", 1e6),
                                rc.number(sec, "k_count", 7, int))
    _check_schedule(ks)
    tau = _floats(rc.get(sec, "tau"), "tau")
    threshold = rc.number(sec, "slope_threshold", SLOPE_THRESHOLD)
    inf_res = rc.number(sec, "infimum_resolution", 0, int) or None
    expect = rc.get(sec, "expect", "violated").lower()
    if expect not in ("violated", "bounded"):
        raise ValidationError("[falsify] expect must be violated or bounded")
    C = rc.number(sec, "hypothetical_constant", 0.0)

    report = falsify(kid, p, tau, K, ks, rc.resolution, threshold, inf_res)
    rows = [[fmt(k), fmt(a), fmt(b), fmt(r)] for k, a, b, r in zip(report.k_schedule, report.lhs, report.rhs, report.ratios)]
    summary = {
        "kernel": kid.name,
        "exponent": report.exponent,
        "K_minus": report.K_minus.descriptor(),
        "K_plus": report.K_plus.descriptor(),
        "s_minus": report.s_minus,
        "s_plus": report.s_plus,
        "c_tau": report.c_tau,
        "fitted_slope": report.fitted_slope,
        "predicted_slope": report.predicted_slope,
        "verdict": report.verdict,
    }
    if C > 0 and report.violated:
        k_star, lhs_b, rhs_b = proof_chain_check(kid, p, report, C)
        summary.update({"hypothetical_constant": C, "k_star": k_star, "lhs_bound": lhs_b, "rhs_bound": rhs_b})
    return ["k", "lhs", "rhs", "ratio"], rows, summary, report.verdict.lower() == expect


RUNNERS = {"norm": run_norm, "project": run_project, "verify-lemma": run_verify, "falsify": run_falsify}


def summary_path(out: Path) -> Path:
    return out.with_name(out.stem + ".summary.json")


def write_outputs(out: Path, header, rows, summary):
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    text = json.dumps(summary, indent=2, sort_keys=True)
    summary_path(out).write_text(text + "\n", encoding="utf-8")
    return text


def run(command, config, out, strict=False, force=False, resolution=None, seed=None) -> int:
    """Execute one command; returns the process exit status."""
    out = Path(out)
    try:
        if not force and (out.exists() or summary_path(out).exists()):
            raise ValidationError(f"{out} exists; pass --force to overwrite")
        rc = load_config(config, command, resolution, seed)
        header, rows, summary, ok = RUNNERS[command](rc)
    except NonConvergenceError as exc:
        _diagnose(exc)
        return 3
    except (VarexpError, ValueError) as exc:
        _diagnose(exc)
        return 2
    summary = {"command": command, **summary}
    print(write_outputs(out, header, rows, summary))
    if strict and not ok:
        print(f'varexp: error code=strict reason="{command} check failed"', file=sys.stderr)
        return 4
    return 0


def _diagnose(exc):
    code = getattr(exc, "code", "validation")
    reason = str(exc).replace('"', "'").replace("\n", " ")
    print(f'varexp: error code={code} reason="{reason}"', file=sys.stderr)


def build_parser():
    parser = argparse.ArgumentParser(prog="varexp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", required=True, type=Path)
        sp.add_argument("--strict", action="store_true", help="exit 4 when the lemma / verdict check fails")
        sp.add_argument("--force", action="store_true", help="overwrite existing outputs")
        sp.add_argument("--resolution", type=int, help="override [run] resolution")
        sp.add_argument("--seed", type=int, help="override [run] seed")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run(args.command, args.config, args.out, args.strict, args.force, args.resolution, args.seed)


if __name__ == "__main__":
    sys.exit(main())
