"""Command-line entry point.

Exit codes: 0 success, 1 property violation found, 2 invalid input.
Every numeric knob is a flag; ``--config FILE`` supplies defaults from a JSON
object keyed by flag destination (e.g. ``{"restarts": 16}``), and explicit
flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import delta as delta_mod
from .immersion import CATALOG, builtin_catalog, to_submanifold_point
from .inequality import (
    SLACK_TOL,
    LemmaInstance,
    Verdict,
    chen_lemma_check,
    classify_submanifold,
    construct_equality_instance,
    delta_upper_bound,
    main_inequality,
)
from .io import DocumentError, InstanceDocument, SweepRow, write_sweep_csv
from .numerics import RankDeficiencyError, make_rng
from .submanifold import PlaneSection, random_point

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID = 0, 1, 2

SWEEP_RESTARTS, SWEEP_GRID, SWEEP_ITERS = 8, 16, 200


class UsageError(ValueError):
    pass


def _emit(report: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True) + "\n")
        return
    for key, value in report.items():
        out.write(f"{key}: {value}\n")


def parse_plane(spec: str, dim: int) -> PlaneSection:
    """``"e1,e2"`` (1-based frame indices) or ``"u1 u2 ...;v1 v2 ..."`` in frame coordinates."""
    spec = spec.strip()
    try:
        if ";" in spec:
            a, b = spec.split(";")
            u = np.array([float(x) for x in a.replace(",", " ").split()])
            v = np.array([float(x) for x in b.replace(",", " ").split()])
            if u.shape != (dim,) or v.shape != (dim,):
                raise UsageError(f"plane vectors must have {dim} components")
            return PlaneSection.spanned_by(u, v)
        parts = [p.strip().lstrip("e") for p in spec.split(",")]
        i, j = (int(p) - 1 for p in parts)
    except (ValueError, RankDeficiencyError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad plane {spec!r}: {exc}") from exc
    if not (0 <= i < dim and 0 <= j < dim) or i == j:
        raise UsageError(f"plane indices must be distinct and in 1..{dim}")
    return PlaneSection.coordinate(i, j, dim)


def _delta_kwargs(args) -> dict:
    return dict(restarts=args.restarts, max_iters=args.max_iters, grid_resolution=args.grid, seed=args.opt_seed)


def _plane_for(pt, args):
    if args.plane in (None, "min"):
        return delta_mod.delta_invariant(pt, **_delta_kwargs(args)).minimizing_plane
    return parse_plane(args.plane, pt.dim)


def _report_for(pt, plane, tol) -> dict:
    rep = main_inequality(pt, plane, tol)
    out = {k: v for k, v in rep.to_dict().items() if k != "equality_residuals"}
    out["plane_u"] = plane.u.tolist()
    out["plane_v"] = plane.v.tolist()
    return out


def _exit_for(verdict: str) -> int:
    return EXIT_VIOLATION if verdict == Verdict.VIOLATED.value else EXIT_OK


def _immersion_spec(args):
    params = {k: getattr(args, k) for k in ("r", "k", "m", "r1", "r2", "n") if getattr(args, k, None) is not None}
    return builtin_catalog(args.immersion, fd_step=args.fd_step, **params)


# -- subcommands ---------------------------------------------------------------------------------


def cmd_gen(args, out) -> int:
    if args.equality:
        pt = construct_equality_instance(
            args.n, args.m, args.c if args.c is not None else 0.0, args.lam, args.mu, seed=args.seed
        )
    else:
        pt = random_point(args.seed, args.n, args.m, args.c, geometric_mode=not args.algebraic, kind=args.kind)
    text = InstanceDocument.from_point(pt, args.seed).dumps()
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_check(args, out) -> int:
    pt = InstanceDocument.loads(Path(args.instance).read_text()).to_point()
    report = _report_for(pt, _plane_for(pt, args), args.tol)
    _emit(report, args.format, out)
    return _exit_for(report["verdict"])


def cmd_delta(args, out) -> int:
    if (args.instance is None) == (args.immersion is None):
        raise UsageError("give exactly one of --instance or --immersion")
    if args.instance:
        pt = InstanceDocument.loads(Path(args.instance).read_text()).to_point()
    else:
        pt = to_submanifold_point(_immersion_spec(args))
    res = delta_mod.delta_invariant(pt, **_delta_kwargs(args))
    bound, case = delta_upper_bound(pt)
    bound_slack = bound - res.delta
    verdict = Verdict.VIOLATED if bound_slack < -args.tol else Verdict.EQUALITY if abs(bound_slack) <= args.tol else Verdict.HOLDS
    report = {
        "delta": res.delta,
        "inf_k": res.inf_k,
        "tau": res.tau,
        "eigen_lower_bound": res.eigen_lower_bound,
        "restarts_used": res.restarts_used,
        "grid_resolution": res.grid_resolution,
        "converged": res.converged,
        "plane_u": res.minimizing_plane.u.tolist(),
        "plane_v": res.minimizing_plane.v.tolist(),
        "bound": bound,
        "curvature_case": case.value,
        "bound_slack": bound_slack,
        "verdict": verdict.value,
    }
    _emit(report, args.format, out)
    return _exit_for(verdict.value)


def _sweep_one(job):
    i, args = job
    rng = make_rng((args.seed, i))
    c = float(rng.uniform(args.c_min, args.c_max))
    if args.construct_equality:
        lam, mu = rng.uniform(-2.0, 2.0, size=2)
        codim = 2 * args.m - args.n
        blocks = [tuple(b) for b in rng.uniform(-2.0, 2.0, size=(codim - 1, 2))]
        pt = construct_equality_instance(args.n, args.m, c, lam, mu, blocks, seed=rng)
        plane = PlaneSection.coordinate(0, 1, pt.dim)
        d = delta_mod.delta_invariant(pt, **_delta_kwargs(args))
    else:
        pt = random_point(rng, args.n, args.m, c, geometric_mode=not args.algebraic, kind=args.kind)
        d = delta_mod.delta_invariant(pt, **_delta_kwargs(args))
        plane = d.minimizing_plane
    rep = main_inequality(pt, plane, args.tol)
    return SweepRow(
        instance_id=i,
        seed=args.seed,
        n=args.n,
        m=args.m,
        c=c,
        tau=rep.tau,
        inf_k=d.inf_k,
        delta=d.delta,
        h_norm2=rep.h_norm2,
        mean_norm2=rep.mean_norm2,
        p_norm2=rep.p_norm2,
        lhs=rep.lhs,
        rhs=rep.rhs,
        slack=rep.slack,
        verdict=rep.verdict.value,
        classification=classify_submanifold(pt).kind.value,
        equality_residual_max=rep.equality_residuals.max,
    )


def run_sweep(args) -> list[SweepRow]:
    jobs = [(i, args) for i in range(args.count)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            return list(pool.map(_sweep_one, jobs, chunksize=64))  # map keeps instance order
    return [_sweep_one(j) for j in jobs]


def cmd_sweep(args, out) -> int:
    if args.count < 1:
        raise UsageError("count must be >= 1")
    if args.c_min > args.c_max:
        raise UsageError("c-min must not exceed c-max")
    if not 2 <= args.n <= 2 * args.m - int(args.construct_equality):
        raise UsageError(f"n out of range for m, got n={args.n}, m={args.m}")
    rows = run_sweep(args)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_sweep_csv(rows, fh)
    else:
        write_sweep_csv(rows, out)
    slacks = np.array([r.slack for r in rows])
    violations = [r for r in rows if r.verdict == Verdict.VIOLATED.value]
    summary = {
        "count": len(rows),
        "seed": args.seed,
        "min_slack": float(slacks.min()),
        "max_abs_slack": float(np.abs(slacks).max()),
        "equality_count": sum(r.verdict == Verdict.EQUALITY.value for r in rows),
        "violation_count": len(violations),
        "violating_ids": [r.instance_id for r in violations][:20],
    }
    sys.stderr.write(json.dumps(summary) + "\n")
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_equality(args, out) -> int:
    pt = construct_equality_instance(
        args.n, args.m, args.c, args.lam, args.mu, args.block or (), geometric_mode=args.geometric, seed=args.seed
    )
    if args.output:
        Path(args.output).write_text(InstanceDocument.from_point(pt, args.seed).dumps())
    report = _report_for(pt, PlaneSection.coordinate(0, 1, pt.dim), args.tol)
    _emit(report, args.format, out)
    return _exit_for(report["verdict"])


def cmd_immerse(args, out) -> int:
    pt = to_submanifold_point(_immersion_spec(args))
    report = _report_for(pt, _plane_for(pt, args), args.tol)
    report["immersion"] = args.immersion
    _emit(report, args.format, out)
    return _exit_for(report["verdict"])


def lemma_instances(count: int, seed: int, n_min: int = 2, n_max: int = 8, equality_fraction: float = 0.1):
    """Seeded on-quadric lemma instances; a fraction is placed exactly on the equality locus."""
    rng = make_rng(seed)
    for _ in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        if rng.random() < equality_fraction:
            s = rng.normal()
            a1 = rng.normal()
            vals = np.array([a1, s - a1] + [s] * (n - 1))
        else:
            vals = rng.normal(size=n + 1) * rng.choice([0.1, 1.0, 10.0])
        yield LemmaInstance.on_quadric(vals)


def cmd_lemma_fuzz(args, out) -> int:
    if args.count < 1 or not 2 <= args.n_min <= args.n_max:
        raise UsageError("need count >= 1 and 2 <= n-min <= n-max")
    violations = equalities = mismatches = 0
    min_slack = np.inf
    for inst in lemma_instances(args.count, args.seed, args.n_min, args.n_max):
        chk = chen_lemma_check(inst, args.tol)
        violations += not chk.holds
        equalities += chk.equality
        mismatches += chk.equality != chk.characterization
        min_slack = min(min_slack, chk.slack)
    report = {
        "count": args.count,
        "seed": args.seed,
        "violations": violations,
        "equality_count": equalities,
        "characterization_mismatches": mismatches,
        "min_slack": float(min_slack),
    }
    _emit(report, args.format, out)
    return EXIT_VIOLATION if violations or mismatches else EXIT_OK


# -- parser --------------------------------------------------------------------------------------


def _common(p, plane=False, optimizer=False):
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--tol", type=float, default=SLACK_TOL, help="slack tolerance for the verdict")
    if plane:
        p.add_argument("--plane", default=None, help='"e1,e2", "u...;v..." or "min" (default: inf-K plane)')
    if plane or optimizer:
        p.add_argument("--restarts", type=int, default=delta_mod.DEFAULT_RESTARTS)
        p.add_argument("--grid", type=int, default=delta_mod.DEFAULT_GRID)
        p.add_argument("--max-iters", type=int, default=delta_mod.DEFAULT_MAX_ITERS)
        p.add_argument("--opt-seed", type=int, default=0, help="seed for random optimizer restarts")


def _immersion_params(p, positional: bool):
    if positional:
        p.add_argument("immersion", choices=CATALOG)
    else:
        p.add_argument("--immersion", choices=CATALOG)
    p.add_argument("--r", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--fd-step", type=float, default=1e-4)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="cosymplectic-bench", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of default flag values")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["gen"] = sub.add_parser("gen", help="write a random instance document")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--c", type=float, default=None, help="default: uniform on [-4, 4]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", default="generic", choices=("generic", "invariant", "anti_invariant", "semi_invariant"))
    p.add_argument("--algebraic", action="store_true", help="allow h(xi, .) != 0")
    p.add_argument("--equality", action="store_true", help="equality-form instance instead")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = subs["check"] = sub.add_parser("check", help="evaluate the inequality on an instance")
    p.add_argument("instance")
    _common(p, plane=True)
    p.set_defaults(func=cmd_check)

    p = subs["delta"] = sub.add_parser("delta", help="tau - inf K with optimizer metadata")
    p.add_argument("--instance")
    _immersion_params(p, positional=False)
    _common(p, optimizer=True)
    p.set_defaults(func=cmd_delta, tol=1e-6)

    p = subs["sweep"] = sub.add_parser("sweep", help="seeded batch of random instances as CSV")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--c-min", type=float, default=-4.0)
    p.add_argument("--c-max", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", default="generic", choices=("generic", "invariant", "anti_invariant", "semi_invariant"))
    p.add_argument("--algebraic", action="store_true")
    p.add_argument("--construct-equality", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    _common(p, optimizer=True)
    p.set_defaults(func=cmd_sweep, restarts=SWEEP_RESTARTS, grid=SWEEP_GRID, max_iters=SWEEP_ITERS)

    p = subs["equality"] = sub.add_parser("equality", help="build and check an equality-form instance")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--block", type=float, nargs=2, action="append", metavar=("H11", "H12"))
    p.add_argument("--geometric", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    _common(p)
    p.set_defaults(func=cmd_equality)

    p = subs["immerse"] = sub.add_parser("immerse", help="ingest a catalog immersion and check it")
    _immersion_params(p, positional=True)
    _common(p, plane=True)
    p.set_defaults(func=cmd_immerse, tol=1e-6)

    p = subs["lemma-fuzz"] = sub.add_parser("lemma-fuzz", help="fuzz the algebraic lemma")
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    _common(p)
    p.set_defaults(func=cmd_lemma_fuzz)
    return parser, subs


def _apply_config(path: str, sub: argparse.ArgumentParser) -> None:
    try:
        config = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"config: {exc}") from exc
    if not isinstance(config, dict):
        raise UsageError("config: expected a JSON object")
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(config) - known)
    if unknown:
        raise UsageError(f"config: unknown keys {unknown}")
    sub.set_defaults(**config)


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser, subs = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(argv)
        if args.config:
            _apply_config(args.config, subs[args.command])
            args = parser.parse_args(argv)
        return args.func(args, out)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INVALID if exc.code else EXIT_OK
    except DocumentError as exc:
        sys.stderr.write(f"invalid instance: {exc}\n")
        return EXIT_INVALID
    except (UsageError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
