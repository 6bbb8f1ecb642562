"""Command-line surface: volumes, verification suites, moments, tails, samples.

Outputs are plain CSV plus a JSON summary, with no timestamps, so a rerun
with identical arguments (and worker count) reproduces them byte for byte.
Exit codes: 0 pass, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import concentration as conc
from . import specio
from .quadrature import QuadratureSpec, integrate_quadrant
from .samplers import RadialDensity, export_csv, sample_hit_and_run, sample_lp, sample_rejection
from .suites import SUITES, run_suite
from .verify import moment_compare


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _write_rows(path: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write("check_id,instance_hash,margin,tol,verdict\n")
        for cid, h, r in rows:
            fh.write(f"{cid},{h},{_fmt(r.margin)},{_fmt(r.tol)},{r.verdict}\n")


def _write_summary(path: str, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ball_from_args(parser, args):
    if args.ball:
        if not os.path.exists(args.ball):
            parser.error(f"ball spec not found: {args.ball}")
        return specio.load_ball(args.ball)
    if args.lp:
        p, n = args.lp.split(":")
        return specio.lp_ball(float(p), int(n))
    if args.cube:
        return specio.cube_ball(int(args.cube))
    parser.error("need --ball, --lp P:N, or --cube N")


def _add_ball_args(sp):
    sp.add_argument("--ball", help="ball spec JSON path")
    sp.add_argument("--lp", help="builtin lp ball, e.g. 1:2 for the l1 disc")
    sp.add_argument("--cube", help="builtin cube ball of the given dimension")


def cmd_volume(args, parser) -> int:
    K = _ball_from_args(parser, args)
    if K.n <= 4:
        r = integrate_quadrant(K, spec=QuadratureSpec(args.nodes, args.levels))
        print(f"quadrant volume = {r.value!r} +- {r.error_estimate!r} "
              f"(quadrature, {r.nodes_used} cells)")
    else:
        rng = np.random.default_rng(args.seed)
        box = K.box
        boxvol = float(np.prod(box))
        N = args.mc
        hits = 0
        for start in range(0, N, 1 << 16):
            m = min(1 << 16, N - start)
            pts = rng.uniform(0.0, 1.0, size=(m, K.n)) * box
            hits += int(np.sum(K.residual(pts) <= 1.0))
        p = hits / N
        se = boxvol * (p * (1 - p) / N) ** 0.5
        print(f"quadrant volume = {boxvol * p!r} +- {3 * se!r} (MC, N={N})")
    return 0


def _explicit_instance(args, parser):
    """Single spec-file-driven check: --ball plus --cset (A, then B for na)."""
    from orlicz_na.sets import CSet
    from orlicz_na.verify import ProperMeasure, ThetaInstance, four_term_check, \
        theta_dominance_check

    K = _ball_from_args(parser, args)
    sets = []
    for path in args.cset:
        if not os.path.exists(path):
            parser.error(f"set spec not found: {path}")
        s = specio.load_set(path)
        if not isinstance(s, CSet):
            s = s.as_cset(float(max(K.radii)) + 1.0)
        sets.append(s)
    spec = QuadratureSpec(args.nodes, 2)
    if args.suite == "na":
        if len(sets) != 2:
            parser.error("na with --cset needs exactly two set specs (A then B)")
        A, B = sets
        axes_I = list(range(A.n))
        axes_J = list(range(A.n, A.n + B.n))
        if A.n + B.n > K.n:
            parser.error("set dimensions exceed the ball dimension")
        r = four_term_check(K, A, axes_I, B, axes_J, spec=spec, check_id="na/explicit")
        return [(r.check_id, "explicit", r)]
    if args.suite == "main":
        if len(sets) != 1:
            parser.error("main with --cset needs exactly one set spec")
        z_axis = K.n - 1
        R = float(K.radii[z_axis])
        inst = ThetaInstance.phi_pair(K, z_axis, 0.2 * R, 0.6 * R)
        mu = ProperMeasure.lebesgue(inst.domain)
        r = theta_dominance_check(inst, mu, sets[0], spec, check_id="main/explicit")
        return [(r.check_id, "explicit", r)]
    parser.error("--cset instances are supported for suites 'na' and 'main'")


def cmd_verify(args, parser) -> int:
    if args.cset:
        rows = _explicit_instance(args, parser)
    else:
        rows = run_suite(args.suite, args.count, args.seed, nodes=args.nodes,
                         workers=args.workers, grid=args.grid)
    if args.tol:
        # extra absolute slack on every verdict (CLI-level tolerance override)
        from orlicz_na.verify import CheckResult
        rows = [(cid, h, CheckResult(r.check_id, r.margin, r.tol + args.tol,
                                     "pass" if r.verdict == "fail"
                                     and r.margin is not None
                                     and r.margin >= -(r.tol + args.tol)
                                     else r.verdict, r.extras))
                for cid, h, r in rows]
    fails = sum(1 for _, _, r in rows if r.verdict == "fail")
    vacuous = sum(1 for _, _, r in rows if r.verdict == "vacuous")
    os.makedirs(args.out, exist_ok=True)
    _write_rows(os.path.join(args.out, f"verify_{args.suite}.csv"), rows)
    _write_summary(os.path.join(args.out, f"verify_{args.suite}.json"), {
        "suite": args.suite, "count": args.count, "seed": args.seed,
        "rows": len(rows), "fails": fails, "vacuous": vacuous,
    })
    print(f"suite={args.suite} rows={len(rows)} fails={fails} vacuous={vacuous}")
    return 1 if fails else 0


def cmd_moments(args, parser) -> int:
    rows = []
    if args.count:
        rows = run_suite("moments", args.count, args.seed, nodes=args.nodes,
                         workers=args.workers)
    else:
        K = _ball_from_args(parser, args)
        a = [float(v) for v in args.a.split(",")]
        if len(a) != K.n:
            parser.error("coefficient count must match the ball dimension")
        r = moment_compare(K, a, args.p, spec=QuadratureSpec(args.nodes, 2))
        rows = [(r.check_id, "-", r)]
        print(f"lhs={r.extras['lhs']!r} rhs={r.extras['rhs']!r} verdict={r.verdict}")
    fails = sum(1 for _, _, r in rows if r.verdict == "fail")
    os.makedirs(args.out, exist_ok=True)
    _write_rows(os.path.join(args.out, "moments.csv"), rows)
    _write_summary(os.path.join(args.out, "moments.json"),
                   {"rows": len(rows), "fails": fails, "seed": args.seed})
    print(f"moments rows={len(rows)} fails={fails}")
    return 1 if fails else 0


def cmd_concentration(args, parser) -> int:
    K = _ball_from_args(parser, args)
    ball, rep = conc.isotropize(K, sample_budget=0)
    batch = conc._default_sampler(ball, args.N, args.seed)
    # tails use the sign-symmetric statistic; quadrant samples give X^2 anyway
    t_grid = np.arange(0.0, args.grid_max + 1e-12, args.grid_step)
    curve = conc.empirical_tail(batch, rep.L2, t_grid)
    res = conc.domination_check(curve)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "tails.csv")
    with open(path, "w") as fh:
        fh.write("t,empirical,ci_lo,ci_hi,bound\n")
        for k in range(len(t_grid)):
            fh.write(",".join(repr(float(v)) for v in
                              (curve.t[k], curve.empirical[k], curve.ci_lo[k],
                               curve.ci_hi[k], curve.bound[k])) + "\n")
    _write_summary(os.path.join(args.out, "tails.json"), {
        "n": K.n, "N": args.N, "seed": args.seed, "L2": rep.L2,
        "volume_estimate": rep.volume_estimate,
        "domination": res.verdict, "worst_gap": res.margin,
    })
    print(f"L2={rep.L2!r} domination={res.verdict} worst_gap={res.margin!r}")
    return 1 if res.verdict == "fail" else 0


def cmd_sample(args, parser) -> int:
    K = None
    if args.method in ("rejection", "hit-and-run"):
        K = _ball_from_args(parser, args)
    if args.method == "rejection":
        batch = sample_rejection(K, args.N, args.seed, quadrant=not args.full)
    elif args.method == "hit-and-run":
        batch = sample_hit_and_run(K, args.N, args.seed, burn_in=args.burn_in,
                                   thinning=args.thinning, quadrant=not args.full)
    else:
        dens = RadialDensity(args.radial, p=args.p)
        batch = sample_lp(args.n, dens, args.N, args.seed, quadrant=not args.full)
    export_csv(batch, args.out)
    print(f"wrote {len(batch)} x {batch.n} points to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orlicz-na",
                                 description="Orlicz-ball negative-association toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("volume", help="quadrant volume (quadrature or MC)")
    _add_ball_args(v)
    v.add_argument("--nodes", type=int, default=256)
    v.add_argument("--levels", type=int, default=3)
    v.add_argument("--mc", type=int, default=1 << 20, help="MC proposals for n > 4")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=cmd_volume)

    w = sub.add_parser("verify", help="randomized verification suites")
    w.add_argument("--suite", required=True, choices=SUITES)
    w.add_argument("--count", type=int, default=50)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--nodes", type=int, default=64)
    w.add_argument("--grid", type=int, default=16)
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--tol", type=float, default=0.0,
                   help="extra absolute slack added to every verdict tolerance")
    w.add_argument("--cset", action="append", default=[],
                   help="set spec path; with --ball runs one explicit instance")
    _add_ball_args(w)
    w.add_argument("--out", default="out")
    w.set_defaults(fn=cmd_verify)

    m = sub.add_parser("moments", help="moment comparison checks")
    _add_ball_args(m)
    m.add_argument("--a", default="1,1", help="comma-separated coefficients")
    m.add_argument("--p", type=int, default=4)
    m.add_argument("--count", type=int, default=0, help="random suite size (0 = single check)")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--nodes", type=int, default=256)
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--out", default="out")
    m.set_defaults(fn=cmd_moments)

    c = sub.add_parser("concentration", help="isotropize, empirical tails, bound")
    _add_ball_args(c)
    c.add_argument("--N", type=int, default=100000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--grid-step", type=float, default=0.05)
    c.add_argument("--grid-max", type=float, default=1.0)
    c.add_argument("--out", default="out")
    c.set_defaults(fn=cmd_concentration)

    s = sub.add_parser("sample", help="draw and export a sample batch")
    _add_ball_args(s)
    s.add_argument("--method", choices=("rejection", "hit-and-run", "lp"),
                   default="rejection")
    s.add_argument("--N", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--burn-in", type=int, default=1000)
    s.add_argument("--thinning", type=int, default=1)
    s.add_argument("--full", action="store_true", help="sign-symmetric points")
    s.add_argument("--n", type=int, default=2, help="dimension for lp sampling")
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--radial", choices=("indicator", "exp", "gauss"), default="indicator")
    s.add_argument("--out", default="sample.csv")
    s.set_defaults(fn=cmd_sample)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    return args.fn(args, ap)


if __name__ == "__main__":
    sys.exit(main())
