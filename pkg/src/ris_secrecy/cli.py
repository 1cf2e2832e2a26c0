"""Command-line entry point: place, beamform, sweep, verify.

Exit codes: 0 success, 1 usage or configuration error, 2 infeasible scene,
3 solver degradation above the configured fraction of trials.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .beamforming import exhaustive_q_oracle, optimize_beamforming
from .channel import draw_channels
from .geometry import DegeneratePlaneError
from .harness import (SCHEMES, ExperimentConfig, InfeasibleSceneError, emit_csv, emit_gnuplot,
                      load_config, sweep)
from .placement import brute_force_placement, outer_optimize
from .sdp import dump_problem

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_DEGRADED = 0, 1, 2, 3

_ALIASES = {"J-LPB": "JLPB", "NSB-LPB": "NSB", "NDB-LPB": "NDB", "R-LPB": "RANDOM",
            "R": "RANDOM", "J": "JLPB"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config(path) -> ExperimentConfig:
    return ExperimentConfig() if path is None else load_config(path)


def _fmt(v) -> str:
    return "[" + ", ".join(f"{x:.4f}" for x in np.asarray(v, dtype=float)) + "]"


def cmd_place(args) -> int:
    cfg = _config(args.scene)
    lb = cfg.link
    res = outer_optimize(cfg.scene, lb, cfg.grid)
    print(f"backend            {_kernels.BACKEND}")
    print(f"feasible           {str(res.feasible).lower()}")
    if res.feasible:
        print(f"p_opt (m)          {_fmt(res.p_opt)}")
        print(f"g_opt              {res.g_opt:.6g}")
    print(f"pairs visited      {res.inner_evals}")
    print(f"candidates checked {res.candidates_checked}")
    if args.oracle:
        step = args.oracle_step
        bf = brute_force_placement(cfg.scene, lb, step)
        print(f"oracle step (m)    {step}")
        if bf.feasible:
            print(f"oracle p (m)       {_fmt(bf.p_opt)}")
            print(f"oracle g           {bf.g_opt:.6g}")
            if res.feasible:
                print(f"ratio g/oracle     {res.g_opt / bf.g_opt:.6f}")
        else:
            print("oracle             infeasible")
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def cmd_beamform(args) -> int:
    cfg = _config(args.scene)
    cfg = cfg.with_(n=args.n if args.n is not None else cfg.n,
                    ps_dbm=args.ps if args.ps is not None else cfg.ps_dbm)
    lb = cfg.link
    place = outer_optimize(cfg.scene, lb, cfg.grid)
    if not place.feasible:
        print("no feasible RIS location", file=sys.stderr)
        return EXIT_INFEASIBLE
    rng = np.random.default_rng(args.seed)
    ch = draw_channels(cfg.n, cfg.fading, rng)
    if args.dump_sdp:
        from .beamforming import charnes_cooper
        dump_problem(charnes_cooper(ch, place.p_opt, cfg.scene, lb), args.dump_sdp)
    res = optimize_beamforming(ch, place.p_opt, cfg.scene, lb, cfg.srocr, rng=rng)
    print(f"p_I (m)         {_fmt(place.p_opt)}")
    print(f"N               {cfg.n}")
    print(f"Ps (dBm)        {cfg.ps_dbm}")
    print(f"|q|             {_fmt(np.abs(res.q))}")
    print(f"arg q (rad)     {_fmt(np.angle(res.q))}")
    print(f"F               {res.F:.8g}")
    print(f"secrecy rate    {res.rate:.6g} bit/s/Hz")
    print(f"source          {res.source}")
    print(f"degraded        {str(res.degraded).lower()}")
    print("SROCR log:")
    for e in res.srocr.trace:
        print(f"  iter {e['iter']:3d}  omega {e['omega']:.4f}  delta {e['delta']:.4f}  "
              f"g {e['objective']:.8g}  ratio {e['rank_ratio']:.6f}  {e['status']}")
    if args.oracle:
        if cfg.n > 3:
            print("oracle          skipped (N > 3)")
        else:
            q_o, F_o = exhaustive_q_oracle(ch, place.p_opt, cfg.scene, lb)
            print(f"oracle F        {F_o:.8g}")
            print(f"F / oracle F    {res.F / F_o:.6f}")
    frac = 1.0 if res.degraded else 0.0
    return EXIT_DEGRADED if frac > cfg.degradation_threshold else EXIT_OK


def _parse_schemes(text: str) -> list[str]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        name = _ALIASES.get(tok.upper(), tok.upper())
        if name not in SCHEMES:
            raise ValueError(f"unknown scheme {tok!r}")
        out.append(name)
    return out


def cmd_sweep(args) -> int:
    cfg = _config(args.scene)
    kw = {}
    if args.trials is not None:
        kw["trials"] = args.trials
    if args.n is not None:
        kw["n"] = args.n
    if args.ps is not None:
        kw["ps_dbm"] = args.ps
    if args.seed is not None:
        kw["base_seed"] = args.seed
    cfg = cfg.with_(**kw)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    schemes = _parse_schemes(args.schemes)
    try:
        res = sweep(cfg, args.axis, values, schemes)
    except InfeasibleSceneError as exc:
        print(f"infeasible scene: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = emit_csv(res, out / f"sweep_{args.axis}.csv")
    emit_gnuplot(res, csv_path, out / f"sweep_{args.axis}.gp")
    print(f"{'axis':>10} {'scheme':>8} {'mean':>10} {'stderr':>10} {'trials':>7}")
    for r in res.rows:
        print(f"{r.value:>10g} {r.scheme:>8} {r.mean:>10.5f} {r.stderr:>10.5f} {r.n_trials:>7d}")
    print(f"wrote {csv_path}")
    frac = res.degraded_fraction
    if frac > cfg.degradation_threshold:
        print(f"solver degradation in {frac:.1%} of trials", file=sys.stderr)
        return EXIT_DEGRADED
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_all
    return run_all(full=args.full, as_json=args.json)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ris-secrecy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    a = sub.add_parser("place", help="two-tier RIS placement")
    a.add_argument("--scene", type=Path, help="TOML configuration (defaults to the office scene)")
    a.add_argument("--oracle", action="store_true", help="also run the brute-force grid search")
    a.add_argument("--oracle-step", type=float, default=0.1)
    a.set_defaults(func=cmd_place)

    b = sub.add_parser("beamform", help="passive beamforming for one channel draw")
    b.add_argument("--scene", type=Path)
    b.add_argument("--n", type=int)
    b.add_argument("--ps", type=float, help="transmit power in dBm")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--oracle", action="store_true", help="exhaustive search (N <= 3)")
    b.add_argument("--dump-sdp", type=Path, help="write the relaxed SDP as JSON text")
    b.set_defaults(func=cmd_beamform)

    c = sub.add_parser("sweep", help="Monte-Carlo sweep over one axis")
    c.add_argument("--scene", type=Path)
    c.add_argument("--axis", required=True, choices=("Ps", "N", "x_max", "y_max", "z_max"))
    c.add_argument("--values", required=True, help="comma-separated ascending values")
    c.add_argument("--schemes", default="JLPB", help="comma-separated: JLPB,NSB,NDB,RANDOM")
    c.add_argument("--trials", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--ps", type=float)
    c.add_argument("--seed", type=int)
    c.add_argument("--out", required=True, type=Path)
    c.set_defaults(func=cmd_sweep)

    d = sub.add_parser("verify", help="run the built-in property checks")
    d.add_argument("--full", action="store_true", help="acceptance-sized sample counts")
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InfeasibleSceneError, DegeneratePlaneError) as exc:
        print(f"infeasible scene: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
