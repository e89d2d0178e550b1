"""Command-line front end.  Exit codes: 0 success, 2 precondition error,
3 numerical failure."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .cones import global_cone_check, hyperbolicity_scan, local_cone_check, sector_samples
from .errors import NumericalError, PreconditionError
from .henon import make_params
from .lab import (
    RunConfig,
    connectivity_image,
    connectivity_scan,
    continuity_experiment,
    radial_demo,
)
from .normalform2d import petal_check, reduce
from .poly1d import caratheodory, normal_form_1d, poly_params
from .torus import semiconjugacy_residual, torus_fixed_point

COMMANDS = (
    "caratheodory", "normal-form", "petal-check", "cone-check", "hyp-scan",
    "torus-iterate", "continuity", "connectivity-scan", "radial-demo",
)


def build_parser():
    ap = argparse.ArgumentParser(prog="henonlab")
    ap.add_argument("subcommand", choices=COMMANDS)
    ap.add_argument("--config", help="flat key=value config file; flags override")
    ap.add_argument("--pq", help="rotation number p/q, e.g. 1/2")
    ap.add_argument("--t", type=float, help="multiplier perturbation")
    ap.add_argument("--a", type=complex, help="Jacobian parameter, complex ok")
    ap.add_argument("--angles", type=int, help="angle samples (power of two)")
    ap.add_argument("--degree", type=int, help="disk Taylor degree")
    ap.add_argument("--iters", type=int, help="iteration count")
    ap.add_argument("--res", type=int, help="grid resolution")
    ap.add_argument("--depth", type=int, help="sigma-orbit depth")
    ap.add_argument("--seed", type=int, help="RNG seed")
    ap.add_argument("--samples", type=int, help="sample count")
    ap.add_argument("--tol", type=float, help="tolerance")
    ap.add_argument("--t-list", help="comma separated t values")
    ap.add_argument("--out", help="output path prefix")
    return ap


def config_from_args(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    cfg.subcommand = args.subcommand
    for name in ("pq", "t", "angles", "degree", "iters", "res", "depth",
                 "seed", "samples", "tol", "out"):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, name, v)
    if args.a is not None:
        cfg.a_re, cfg.a_im = args.a.real, args.a.imag
    if args.t_list is not None:
        cfg.t_list = args.t_list
    return cfg


def run(cfg: RunConfig) -> int:
    out = cfg.out
    if cfg.subcommand == "caratheodory":
        res = caratheodory(poly_params(cfg.p_over_q, cfg.t), cfg.angles, cfg.iters)
        io.write_loop_csv(out + ".csv", res.loop)
        print(f"caratheodory: N={cfg.angles} iters={cfg.iters} final_gap={res.final_gap:.3e}")
    elif cfg.subcommand == "normal-form":
        pp = poly_params(cfg.p_over_q, cfg.t)
        change, normal, C_t = normal_form_1d(pp)
        print(f"1-D: C_t = {C_t}")
        if cfg.a != 0:
            params = make_params(cfg.p_over_q, cfg.t, cfg.a)
            nf = reduce(params)
            io.write_torus_csv(out + "_normal.csv", _jet_as_torus(nf))
            print(f"2-D: C_at = {nf.C_at}, rescale A = {nf.rescale}")
    elif cfg.subcommand == "petal-check":
        params = make_params(cfg.p_over_q, cfg.t, cfg.a)
        rep = petal_check(params, reduce(params, D=2 * params.q + 8),
                          samples=cfg.samples, steps=cfg.iters, tol=cfg.tol, seed=cfg.seed)
        io.write_trapping_csv(out + ".csv", rep)
        print(f"petal-check: passed={rep.passed} rotation_failures={len(rep.rotation_failures)} "
              f"attraction_failures={len(rep.attraction_failures)} max_dist={rep.max_final_distance:.3e}")
        if not rep.passed:
            return 3
    elif cfg.subcommand == "cone-check":
        params = make_params(cfg.p_over_q, cfg.t, cfg.a)
        nf = reduce(params, D=2 * params.q + 8)
        loc = local_cone_check(params, nf, sector_samples(params, cfg.samples, seed=cfg.seed))
        print(f"local: {loc.verdict} worst_h={loc.worst_h_expansion:.6f} "
              f"worst_v={loc.worst_v_expansion:.3g} failures={len(loc.invariance_failures)}")
        if cfg.a != 0:
            glob = global_cone_check(params, sample_count=cfg.samples, seed=cfg.seed, nf=nf)
            print(f"global: {glob.verdict} worst_h={glob.worst_h_expansion:.6f} "
                  f"worst_v={glob.worst_v_expansion:.3g} vertical_ok={glob.extras['vertical_ok']}")
    elif cfg.subcommand == "hyp-scan":
        a_vals = np.linspace(-abs(cfg.a), abs(cfg.a), min(max(cfg.res, 3), 9))
        cells = hyperbolicity_scan(cfg.p_over_q, cfg.ts, a_vals, seed=cfg.seed)
        io.write_scan_csv(out + ".csv", cells)
        n = len(a_vals)
        img = np.array([{"PASS": 255, "MARGINAL": 170, "FAIL": 60, "EXCLUDED": 0}[c.verdict]
                        for c in cells], dtype=float).reshape(-1, n)
        io.write_pgm(out + ".pgm", img)
        print(f"hyp-scan: {sum(c.verdict == 'PASS' for c in cells)}/{len(cells)} PASS")
    elif cfg.subcommand == "torus-iterate":
        params = make_params(cfg.p_over_q, cfg.t, cfg.a)
        result = torus_fixed_point(params, cfg.iters, cfg.angles, cfg.degree)
        io.write_torus_csv(out + ".csv", result.torus)
        resid = semiconjugacy_residual(params, result.torus, seed=cfg.seed)
        print(f"torus: gap={result.final_gap:.3e} separation={result.separations[-1]:.3e} "
              f"semiconjugacy_residual={resid:.3e}")
    elif cfg.subcommand == "continuity":
        rj, rs = continuity_experiment(cfg.p_over_q, cfg.a, cfg.ts, resolution=cfg.res,
                                       n_angles=cfg.angles, n_iters=cfg.iters, depth=cfg.depth)
        io.write_hausdorff_csv(out + "_j.csv", rj)
        io.write_hausdorff_csv(out + "_jplus.csv", rs)
        print(f"continuity J: {['%.4f' % d for d in rj.distances]} decreasing={rj.strictly_decreasing}")
        print(f"continuity J+: {['%.4f' % d for d in rs.distances]} decreasing={rs.strictly_decreasing}")
    elif cfg.subcommand == "connectivity-scan":
        w = abs(cfg.a)
        cells = connectivity_scan(cfg.p_over_q, cfg.t, (-w, w, -w, w),
                                  resolution=min(max(cfg.res, 3), 16),
                                  n_angles=min(cfg.angles, 256), n_iters=min(cfg.iters, 12))
        io.write_pgm(out + ".pgm", connectivity_image(cells))
        flat = [c for row in cells for c in row]
        print(f"connectivity: {sum(c.verdict.startswith('CONNECTED') for c in flat)}/{len(flat)} connected")
    elif cfg.subcommand == "radial-demo":
        r = radial_demo(cfg.p_over_q, cfg.ts, N=cfg.angles, n_iters=cfg.iters)
        io.write_hausdorff_csv(out + ".csv", r)
        print(f"radial: {['%.4f' % d for d in r.distances]} decreasing={r.strictly_decreasing}")
    return 0


def _jet_as_torus(nf):
    """Pack the normal-form coefficient rows into the torus CSV layout."""
    from .torus import SolidTorus

    rows = np.vstack([nf.normal[0].coeffs.ravel(), nf.normal[1].coeffs.ravel()])
    return SolidTorus(coeffs=rows, level=0)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except PreconditionError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
