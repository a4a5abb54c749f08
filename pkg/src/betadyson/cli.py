"""Command-line front end: ``betadyson <group> <command> [flags]``.

Every verification command emits a :class:`Report`. Its checks carry an anchor
slug from :data:`ANCHORS` and a pass flag derived from value, reference and
tolerance. The process exits 0 iff every check passes and 2 on usage errors.
Reports are byte-identical for a fixed config, seed and worker count (the
timestamp is only written with ``--timestamp``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from .partitions import Partition

SCHEMA = "betadyson.report/1"
QUICK_PATHS = 20_000
QUICK_THETAS = (0.5, 1.0)
FULL_THETAS = (0.25, 0.5, 1.0, 2.0, 3.7)
EXACT_KAPPAS = ((1,), (2,), (1, 1), (2, 1), (2, 2), (3, 1))
EXACT_TIMES = (0.1, 1.0, 5.0)
MC_BETAS = (0.5, 1.0, 2.0)
MC_TIMES = (0.5, 1.0)

# anchor slug -> what it refers to
ANCHORS = {
    "semigroup-intertwining": "Lambda P^(k)(t) = P^(k+1)(t) Lambda on the Jack basis, DBM and DOU",
    "generator-intertwining": "Lambda A^(k) = A^(k+1) Lambda on the Jack basis",
    "mc-intertwining": "both pipeline routes to the lower-level law agree in distribution",
    "kernel-moment": "E[J_kappa(X)] = c_kappa J_kappa(x_top) under the Dixon-Anderson kernel",
    "matrix-corner": "corner eigenvalues of matrix Brownian motion follow DBM plus the kernel (beta = 1, 2)",
    "corner-interlacing": "Cauchy interlacing of corner and full spectra",
    "sde-moment": "Monte Carlo Jack moment of the simulated process",
}

# every check name starts with exactly one of these prefixes
CHECK_ANCHORS = {
    "intertwine-exact": "semigroup-intertwining",
    "intertwine-gen": "generator-intertwining",
    "intertwine-mc": "mc-intertwining",
    "kernel-check": "kernel-moment",
    "corner-moment": "matrix-corner",
    "corner-interlacing": "corner-interlacing",
    "simulate-moment": "sde-moment",
}


class UsageError(Exception):
    pass


def anchor_for(name: str) -> str:
    hits = [a for prefix, a in CHECK_ANCHORS.items() if name == prefix or name.startswith(prefix + "/")]
    if len(hits) != 1:
        raise KeyError(f"check {name!r} has no unique anchor")
    return hits[0]


@dataclass(frozen=True)
class Check:
    """One verified quantity.

    With ``z`` set the check passes when ``|z| <= tolerance``; otherwise when
    ``|value - reference| <= tolerance``.
    """

    name: str
    value: float
    reference: float
    tolerance: float
    z: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def anchor(self) -> str:
        return anchor_for(self.name)

    @property
    def passed(self) -> bool:
        metric = abs(self.z) if self.z is not None else abs(self.value - self.reference)
        return bool(metric <= self.tolerance)

    def to_dict(self) -> dict:
        out = {"name": self.name, "anchor": self.anchor, "value": self.value, "reference": self.reference,
               "tolerance": self.tolerance}
        if self.z is not None:
            out["z"] = self.z
        out["passed"] = self.passed
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    timestamp: str | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        meta = {"schema": SCHEMA, "version": __version__, "command": self.command, "config": self.config}
        if self.timestamp is not None:
            meta["timestamp"] = self.timestamp
        return {"metadata": meta, "checks": [c.to_dict() for c in self.checks], "passed": self.passed}

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2) + "\n"

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            metric = f"z={c.z:+.3f}" if c.z is not None else f"err={abs(c.value - c.reference):.3e}"
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {metric}  tol={c.tolerance:g}")
        n_ok = sum(c.passed for c in self.checks)
        lines.append(f"{n_ok}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


# -- parsing helpers --------------------------------------------------------

def floats(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).strip("[]() ").split(",") if v.strip())


def partition(text) -> Partition:
    if isinstance(text, (list, tuple)):
        return Partition(text)
    return Partition.parse(str(text))


def stat_specs(text: str) -> list[str]:
    """Split ``p1,p2,jack:2,1`` into ``["p1", "p2", "jack:2,1"]``; bare digits extend a jack spec."""
    out: list[str] = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if tok.isdigit() and out and out[-1].startswith("jack:"):
            out[-1] += "," + tok
        elif tok in ("p1", "p2", "p1^2") or tok.startswith("jack:"):
            out.append(tok)
        else:
            raise UsageError(f"unknown statistic {tok!r}; use p1, p2, p1^2 or jack:<partition>")
    return out


def stat_values(spec: str, x: np.ndarray, theta: float) -> np.ndarray:
    from .jack import JackParams, build_jack

    p1 = x.sum(axis=1)
    if spec == "p1":
        return p1
    if spec == "p2":
        return (x * x).sum(axis=1)
    if spec == "p1^2":
        return p1 * p1
    kappa = partition(spec.split(":", 1)[1])
    return np.broadcast_to(build_jack(JackParams(theta, x.shape[1]), kappa).eval(x), p1.shape).astype(float)


def fmt(v) -> str:
    return f"{float(v):.12g}"


# -- argument resolution ----------------------------------------------------

def resolve_theta(args, exact: bool = False):
    theta, beta = getattr(args, "theta", None), getattr(args, "beta", None)
    if (theta is None) == (beta is None):
        raise UsageError("give exactly one of --theta and --beta")
    if exact:
        return Fraction(str(theta)) if theta is not None else Fraction(str(beta)) / 2
    value = float(theta) if theta is not None else float(beta) / 2
    if not value > 0:
        raise UsageError("theta and beta must be positive")
    return value


def resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("DYSON_SEED")
    if env is None or not env.strip():
        raise UsageError("this command is stochastic: pass --seed or set DYSON_SEED")
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"DYSON_SEED must be an integer, got {env!r}") from None


def resolve_paths(args) -> int:
    if args.paths is not None:
        return int(args.paths)
    return QUICK_PATHS if getattr(args, "quick", False) else 100_000


def config_echo(args, **resolved) -> dict:
    skip = {"func", "config", "json", "out", "timestamp", "csv"}
    out = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    out.update(resolved)
    return _jsonable(out)


def emit_report(report: Report, args, out=None) -> int:
    out = out or sys.stdout
    if getattr(args, "timestamp", False):
        report.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    text = report.to_json()
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if getattr(args, "json", False):
        out.write(text)
    else:
        out.write(report.summary())
    return 0 if report.passed else 1


def write_csv(path, header, rows, out=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if not isinstance(v, str) else v for v in row])
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(buf.getvalue())
    else:
        (out or sys.stdout).write(buf.getvalue())


# -- commands ---------------------------------------------------------------

def cmd_jack_build(args, out):
    from .jack import JackParams, build_jack, jack_norm

    theta = resolve_theta(args, args.exact)
    params = JackParams(theta, args.k)
    kappa = partition(args.kappa)
    poly = build_jack(params, kappa)
    norm = jack_norm(params, kappa)
    if args.json:
        data = {"theta": theta, "k": args.k, "kappa": list(kappa),
                "coefficients": [{"mu": list(mu), "c": c} for mu, c in poly.coeffs.items()], "norm": norm}
        out.write(json.dumps(_jsonable(data), indent=2) + "\n")
    elif args.csv:
        write_csv(None, ["monomial", "coefficient"],
                  [[f"m_{mu}", c] for mu, c in poly.coeffs.items()] + [["norm", norm]], out)
    else:
        body = ", ".join(f"m_{mu}: {c if args.exact else fmt(c)}" for mu, c in poly.coeffs.items())
        out.write("{" + body + "}\n")
        out.write(f"J_{kappa}(1_{args.k}) = {norm if args.exact else fmt(norm)}\n")
    return 0


def cmd_jack_binom(args, out):
    from .jack import JackBasis, JackParams

    theta = resolve_theta(args, args.exact)
    kappa = partition(args.kappa)
    table = JackBasis.build(JackParams(theta, args.k), kappa).binomial_coefficients(kappa)
    if args.json:
        data = {"theta": theta, "k": args.k, "kappa": list(kappa),
                "binomial": [{"rho": list(rho), "value": v} for rho, v in table.items()]}
        out.write(json.dumps(_jsonable(data), indent=2) + "\n")
    else:
        write_csv(None, ["rho", "binomial"], [[str(rho), float(v)] for rho, v in table.items()], out)
    return 0


OPERATORS = ("A", "A_ou", "B1", "B2", "B3", "opjack")


def cmd_op_apply(args, out):
    from . import operators
    from .symmpoly import SymPoly

    theta = resolve_theta(args)
    with open(args.poly, encoding="utf-8") as fh:
        poly = SymPoly.from_json(fh.read())
    if args.k is not None and poly.k != args.k:
        raise UsageError(f"--k {args.k} does not match the polynomial's k = {poly.k}")
    result = getattr(operators, f"apply_{args.op}")(poly, theta)
    data = result.to_dict()
    if args.jack:
        from .jack import JackBasis, JackParams

        basis = JackBasis.full(JackParams(theta, poly.k), max(result.degree, 0))
        data["jack"] = [{"mu": list(mu), "c": c} for mu, c in basis.to_jack_basis(result).items()]
    out.write(json.dumps(_jsonable(data), indent=2) + "\n")
    return 0


def cmd_op_matrix(args, out):
    from .jack import cached_basis
    from .operators import build_generator_matrix, generator_matrix_direct

    theta = resolve_theta(args)
    basis = cached_basis(theta, args.k, partition(args.kappa_max))
    build = generator_matrix_direct if args.direct else build_generator_matrix
    text = build(basis, args.kind).to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def _exact_check(prefix, rep) -> Check:
    t = "" if rep.t is None else f"/t={rep.t:g}"
    name = f"{prefix}/{rep.kind}/theta={float(rep.theta):g}/k={rep.k}/kappa={rep.kappa}{t}"
    return Check(name, rep.scaled_error, 0.0, rep.tolerance, details=rep.to_dict())


def cmd_verify_exact(args, out):
    from .semigroup import verify_intertwining_exact

    theta = resolve_theta(args)
    rep = verify_intertwining_exact(theta, args.k, partition(args.kappa), args.t, args.kind, args.tol)
    report = Report("verify intertwine-exact", config_echo(args, theta=theta), [_exact_check("intertwine-exact", rep)])
    return emit_report(report, args, out)


def cmd_verify_gen(args, out):
    from .semigroup import verify_generator_intertwining

    theta = resolve_theta(args)
    rep = verify_generator_intertwining(theta, args.k, partition(args.kappa), args.kind, args.tol)
    report = Report("verify intertwine-gen", config_echo(args, theta=theta), [_exact_check("intertwine-gen", rep)])
    return emit_report(report, args, out)


def _sde_config(args, theta, dim, t, seed, paths):
    from .sde import SdeConfig

    return SdeConfig(beta=2 * theta, dim=dim, t_final=t, dt=args.dt, scheme=args.scheme, paths=paths, seed=seed,
                     antithetic=not args.no_antithetic, workers=args.workers)


def _mc_checks(theta, k, top, t, kappa, seed, paths, args, process="dbm") -> list[Check]:
    from .sde import mc_intertwining

    cfg = _sde_config(args, theta, k, t, seed, paths)
    rep = mc_intertwining(top, cfg, kappa, process=process)
    base = f"intertwine-mc/{process}/beta={2 * theta:g}/k={k}/t={t:g}"
    return [
        Check(f"{base}/{name}", rep.lhs[name].mean, rep.rhs[name].mean, args.z_max, z,
              {"lhs": rep.lhs[name].to_dict(), "rhs": rep.rhs[name].to_dict()})
        for name, z in rep.z_scores.items()
    ]


def cmd_verify_mc(args, out):
    theta = resolve_theta(args)
    seed = resolve_seed(args)
    paths = resolve_paths(args)
    top = floats(args.top) if args.top is not None else tuple(float(i) for i in range(args.k + 1))
    if len(top) != args.k + 1:
        raise UsageError(f"--top needs k + 1 = {args.k + 1} entries")
    checks = _mc_checks(theta, args.k, top, args.t, partition(args.kappa), seed, paths, args, args.process)
    report = Report("verify intertwine-mc", config_echo(args, theta=theta, seed=seed, paths=paths), checks)
    return emit_report(report, args, out)


def _kernel_check(theta, top, kappa, n, rng) -> Check:
    from .dixon_anderson import da_moment_exact, da_moment_mc

    est = da_moment_mc(top, theta, kappa, n, rng)
    ref = da_moment_exact(top, theta, kappa)
    z = est.z_score(ref)
    name = f"kernel-check/theta={theta:g}/k={len(top) - 1}/kappa={kappa}"
    return Check(name, est.mean, ref, 3.0, z, {"estimate": est.mean, "se": est.std_error, "reference": ref,
                                               "z_score": z})


def cmd_verify_all(args, out):
    from .semigroup import verify_generator_intertwining, verify_intertwining_exact

    seed = resolve_seed(args)
    paths = resolve_paths(args)
    if args.theta is not None or args.beta is not None:
        thetas = (resolve_theta(args),)
    else:
        thetas = QUICK_THETAS if args.quick else FULL_THETAS
    k_max = 2 if args.quick else 3
    checks: list[Check] = []
    for theta in thetas:
        for k in range(1, k_max + 1):
            for kappa in EXACT_KAPPAS:
                if len(kappa) > k:
                    continue
                for kind in ("dbm", "dou"):
                    rep = verify_generator_intertwining(theta, k, kappa, kind)
                    checks.append(_exact_check("intertwine-gen", rep))
                    for t in EXACT_TIMES:
                        rep = verify_intertwining_exact(theta, k, kappa, t, kind)
                        checks.append(_exact_check("intertwine-exact", rep))
    kernel_seed, *mc_seeds = np.random.SeedSequence(seed).spawn(1 + len(thetas) * k_max * len(MC_TIMES))
    kernel_rng = np.random.default_rng(kernel_seed)
    for theta in thetas:
        for k in range(1, k_max + 1):
            top = tuple(float(i) for i in range(k + 1))
            checks.append(_kernel_check(theta, top, Partition((2,)), paths, kernel_rng))
    mc_thetas = thetas if (args.quick or len(thetas) == 1) else tuple(b / 2 for b in MC_BETAS)
    times = MC_TIMES[:1] if args.quick else MC_TIMES
    streams = iter(mc_seeds)
    for theta in mc_thetas:
        for k in range(1 if args.quick else 2, k_max + 1):
            for t in times:
                s = int(next(streams).generate_state(1)[0])
                top = tuple(float(i) for i in range(k + 1))
                checks.extend(_mc_checks(theta, k, top, t, Partition((2,)), s, paths, args))
    report = Report("verify all", config_echo(args, thetas=list(thetas), seed=seed, paths=paths), checks)
    return emit_report(report, args, out)


def _top(args):
    from .dixon_anderson import as_ordered, jitter_ties

    top = np.asarray(floats(args.top))
    if np.any(np.diff(top) <= 0):
        if np.any(np.diff(top) < 0):
            raise UsageError("--top must be increasing")
        top = jitter_ties(top, args.jitter)
    return as_ordered(top, strict=True, name="top")


def cmd_kernel_sample(args, out):
    from .dixon_anderson import da_sample

    theta = resolve_theta(args)
    seed = resolve_seed(args)
    top = _top(args)
    x = np.atleast_2d(da_sample(top, theta, np.random.default_rng(seed), size=args.n))
    write_csv(args.out, [f"x{i + 1}" for i in range(x.shape[1])], x, out)
    return 0


def cmd_kernel_check(args, out):
    theta = resolve_theta(args)
    seed = resolve_seed(args)
    top = _top(args)
    check = _kernel_check(theta, tuple(top), partition(args.kappa), args.n, np.random.default_rng(seed))
    check = Check(check.name, check.value, check.reference, args.z_max, check.z, check.details)
    report = Report("kernel check", config_echo(args, theta=theta, seed=seed), [check])
    return emit_report(report, args, out)


def cmd_simulate(args, out):
    from .sde import estimate, simulate

    theta = resolve_theta(args)
    seed = resolve_seed(args)
    paths = resolve_paths(args)
    x0 = floats(args.x0)
    if args.k is not None and args.k != len(x0):
        raise UsageError(f"--x0 has {len(x0)} entries but --k is {args.k}")
    cfg = _sde_config(args, theta, len(x0), args.t, seed, paths)
    x = simulate(args.process, x0, cfg)
    if args.stats:
        specs = stat_specs(args.stats)
        cols = [stat_values(s, x, theta) for s in specs]
        write_csv(args.csv_out, specs, np.column_stack(cols), out if args.csv_out is None else None)
        if args.csv_out is not None:
            summary = {s: estimate(c, cfg).to_dict() for s, c in zip(specs, cols)}
            out.write(json.dumps(_jsonable({"config": config_echo(args, theta=theta, seed=seed, paths=paths),
                                            "estimates": summary}), indent=2) + "\n")
    else:
        write_csv(args.csv_out, [f"x{i + 1}" for i in range(x.shape[1])], x, out)
    return 0


def cmd_rmt_corner(args, out):
    from .rmt import corner_pipeline

    seed = resolve_seed(args)
    top = floats(args.top)
    if args.k is not None and args.k != len(top) - 1:
        raise UsageError(f"--top needs k + 1 = {args.k + 1} entries")
    if np.any(np.diff(top) <= 0):
        raise UsageError("--top must be strictly increasing")
    rep = corner_pipeline(top, args.t, args.paths, seed, args.field, args.convention, partition(args.kappa),
                          args.dt, args.workers)
    base = f"beta={2 if args.field == 'complex' else 1}/k={rep.k}/t={args.t:g}"
    checks = [
        Check(f"corner-moment/{base}/{name}", rep.matrix[name].mean, rep.dyson[name].mean, args.z_max, z,
              {"matrix": rep.matrix[name].to_dict(), "dyson": rep.dyson[name].to_dict()})
        for name, z in rep.z_scores.items()
    ]
    checks.append(Check(f"corner-interlacing/{base}", float(rep.interlacing_violations), 0.0, 0.0,
                        details={"samples": rep.samples}))
    report = Report("rmt corner-check", config_echo(args, seed=seed), checks)
    return emit_report(report, args, out)


# -- parser -----------------------------------------------------------------

def _theta_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--theta", type=str, help="Jack parameter theta = beta / 2")
    g.add_argument("--beta", type=str, help="inverse temperature beta = 2 theta")


def _report_flags(p):
    p.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
    p.add_argument("--out", help="also write the JSON report to this path")
    p.add_argument("--timestamp", action="store_true", help="record the UTC time in the report metadata")


def _mc_flags(p):
    from .sde import SCHEMES

    p.add_argument("--seed", type=int, help="root seed (or set DYSON_SEED)")
    p.add_argument("--paths", type=int)
    p.add_argument("--dt", type=float, help="step size; default 1e-3 * t")
    p.add_argument("--scheme", choices=SCHEMES, default="trapezoidal")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-antithetic", action="store_true")
    p.add_argument("--z-max", type=float, default=3.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betadyson", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"betadyson {__version__}")
    parser.add_argument("--config", help="JSON file of flag defaults; explicit flags take precedence")
    groups = parser.add_subparsers(dest="group", required=True)

    jack = groups.add_parser("jack", help="Jack polynomials").add_subparsers(dest="command", required=True)
    p = jack.add_parser("build", help="monomial coefficients of J_kappa and J_kappa(1_k)")
    _theta_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kappa", required=True, help="partition, e.g. 2,1")
    p.add_argument("--exact", action="store_true", help="rational arithmetic (theta read as a fraction)")
    fmt_group = p.add_mutually_exclusive_group()
    fmt_group.add_argument("--json", action="store_true")
    fmt_group.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_jack_build)
    p = jack.add_parser("binom", help="generalized binomial coefficients binom(kappa, rho)")
    _theta_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kappa", required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_jack_binom)

    op = groups.add_parser("op", help="differential operators").add_subparsers(dest="command", required=True)
    p = op.add_parser("apply", help="apply an operator to a polynomial read from JSON")
    _theta_flags(p)
    p.add_argument("--op", choices=OPERATORS, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--poly", required=True, help='JSON file {"k": K, "terms": [{"mu": [..], "c": ..}, ..]}')
    p.add_argument("--jack", action="store_true", help="also expand the result in the Jack basis")
    p.set_defaults(func=cmd_op_apply)
    p = op.add_parser("matrix", help="generator matrix on the Jack basis as CSV")
    _theta_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kappa-max", required=True)
    p.add_argument("--kind", choices=("dbm", "dou"), default="dbm")
    p.add_argument("--direct", action="store_true", help="differentiate and re-expand instead of closed forms")
    p.add_argument("--out")
    p.set_defaults(func=cmd_op_matrix)

    verify = groups.add_parser("verify", help="intertwining checks").add_subparsers(dest="command", required=True)
    p = verify.add_parser("intertwine-exact", help="semigroup intertwining on the Jack basis")
    _theta_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kappa", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--kind", choices=("dbm", "dou"), default="dbm")
    p.add_argument("--tol", type=float, default=1e-10)
    _report_flags(p)
    p.set_defaults(func=cmd_verify_exact)
    p = verify.add_parser("intertwine-gen", help="generator intertwining on the Jack basis")
    _theta_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kappa", required=True)
    p.add_argument("--kind", choices=("dbm", "dou"), default="dbm")
    p.add_argument("--tol", type=float, default=1e-10)
    _report_flags(p)
    p.set_defaults(func=cmd_verify_gen)
    p = verify.add_parser("intertwine-mc", help="Monte Carlo comparison of the two pipelines")
    _theta_flags(p)
    p.add_argument("--k", type=int, required=True, help="lower dimension")
    p.add_argument("--top", help="k + 1 increasing starting points; default 0,1,..,k")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--kappa", default="2")
    p.add_argument("--process", choices=("dbm", "dou"), default="dbm")
    p.add_argument("--quick", action="store_true")
    _mc_flags(p)
    _report_flags(p)
    p.set_defaults(func=cmd_verify_mc)
    p = verify.add_parser("all", help="exact suite plus Monte Carlo suite")
    _theta_flags(p)
    p.add_argument("--quick", action="store_true", help="2e4 paths, theta in {1/2, 1}, k <= 2")
    _mc_flags(p)
    _report_flags(p)
    p.set_defaults(func=cmd_verify_all)

    kernel = groups.add_parser("kernel", help="Dixon-Anderson kernel").add_subparsers(dest="command", required=True)
    for name, func in (("sample", cmd_kernel_sample), ("check", cmd_kernel_check)):
        p = kernel.add_parser(name)
        _theta_flags(p)
        p.add_argument("--top", required=True)
        p.add_argument("--n", type=int, default=100_000)
        p.add_argument("--seed", type=int)
        p.add_argument("--jitter", type=float, help="spread for tied --top entries; default 1e-9 * scale")
        if name == "sample":
            p.add_argument("--out", help="CSV path; stdout if omitted")
        else:
            p.add_argument("--kappa", default="2")
            p.add_argument("--z-max", type=float, default=3.0)
            _report_flags(p)
        p.set_defaults(func=func)

    sim = groups.add_parser("simulate", help="simulate DBM or DOU").add_subparsers(dest="process", required=True)
    for process in ("dbm", "dou"):
        p = sim.add_parser(process)
        _theta_flags(p)
        p.add_argument("--k", type=int)
        p.add_argument("--x0", required=True)
        p.add_argument("--t", type=float, default=1.0)
        p.add_argument("--stats", help="comma list of p1, p2, p1^2, jack:<partition>")
        p.add_argument("--out", dest="csv_out", help="CSV path; stdout if omitted")
        p.add_argument("--quick", action="store_true")
        _mc_flags(p)
        p.set_defaults(func=cmd_simulate)

    rmt = groups.add_parser("rmt", help="matrix model").add_subparsers(dest="command", required=True)
    p = rmt.add_parser("corner-check", help="corner eigenvalues against DBM plus the kernel")
    p.add_argument("--k", type=int)
    p.add_argument("--top", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--paths", type=int, default=50_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--field", choices=("real", "complex"), default="real")
    p.add_argument("--convention", choices=("goe", "uniform"), default="goe")
    p.add_argument("--kappa", default="2")
    p.add_argument("--z-max", type=float, default=3.0)
    _report_flags(p)
    p.set_defaults(func=cmd_rmt_corner)
    return parser


def _leaf_parsers(parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                if any(isinstance(a, argparse._SubParsersAction) for a in sub._actions):
                    yield from _leaf_parsers(sub)
                else:
                    yield sub


def _apply_config(parser, path, argv):
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    config = {k.replace("-", "_"): v for k, v in config.items()}
    if any(a.split("=")[0] in ("--theta", "--beta") for a in argv):
        config.pop("theta", None)
        config.pop("beta", None)
    for leaf in _leaf_parsers(parser):
        for action in leaf._actions:
            if action.dest in config:
                action.required = False
        dests = {a.dest for a in leaf._actions}
        leaf.set_defaults(**{k: v for k, v in config.items() if k in dests})


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    pre, _ = pre.parse_known_args(argv)
    try:
        if pre.config:
            _apply_config(parser, pre.config, argv)
        args = parser.parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"betadyson: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"betadyson: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
