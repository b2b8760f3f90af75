"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from datetime import datetime, timezone
from pathlib import Path


from .bmo import bmo_norm
from .choquet import choquet_integral, level_profile
from .content import ContentParams, ball_content_estimate, dyadic_content, minimal_cover
from .lattice import FAMILIES, DyadicCube, read_grid, read_leafset, write_grid
from .operators import (RieszParams, beta_riesz_potential, commutator, iterated_commutator, maximal_content,
                        maximal_fractional, maximal_orlicz_fractional, maximal_sharp, riesz_potential)
from .verify import CHECKS, CheckConfig, ConfigError, run_check, run_suite, summary_csv, write_outputs
from .verify.checks import desk_config
from .verify.config import config_from_mapping, parse_value, read_config_file
from .verify.generators import KINDS, gen_functions
from .verify.harness import PROFILES
from .young import parse_young

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_DEFAULTS = CheckConfig()


class UsageError(Exception):
    pass


def _stamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (flags override --config; unset keys use the check's desk defaults)")
    g.add_argument("--config", metavar="FILE", help="flat 'key = value' configuration file")
    for f in dataclasses.fields(CheckConfig):
        if f.name == "check_id":
            continue
        default = getattr(_DEFAULTS, f.name)
        if isinstance(default, tuple):
            default = ",".join(str(x) for x in default)
        flags = [f"--{f.name}"] + ([f"--{f.name.replace('_', '-')}"] if "_" in f.name else [])
        g.add_argument(*flags, dest=f"cfg_{f.name}", metavar="V", default=None,
                       help=f"(base default: {default})")


def _overrides(args) -> dict:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for key, val in vars(args).items():
        if key.startswith("cfg_") and val is not None:
            values[key[4:]] = val
    return {k: parse_value(k, v) if isinstance(v, str) else v for k, v in values.items()}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capacitary", description=__doc__.splitlines()[0],
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("content", help="dyadic content of a leaf set with its minimal cover", formatter_class=fmt)
    p.add_argument("--in", dest="inp", required=True, help="leaf-set grid file (nonzero cells belong to E)")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--flavor", choices=("dyadic", "ball"), default="dyadic")
    p.add_argument("--witness", help="cover witness JSON path (default: <in>.witness.json)")

    p = sub.add_parser("choquet", help="Choquet integral of |f| and its level profile", formatter_class=fmt)
    p.add_argument("--in", dest="inp", required=True, help="grid function file")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--cube", help="restrict to the dyadic cube 'level:c1,c2,...'")
    p.add_argument("--profile", help="write the level profile t -> H({|f| > t}) as TSV")

    p = sub.add_parser("maximal", help="content maximal operators", formatter_class=fmt)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--kind", choices=("content", "sharp", "fractional", "orlicz"), default="content")
    p.add_argument("--family", choices=FAMILIES, default="dyadic")
    p.add_argument("--alpha", type=float, default=0.0, help="fractional order (fractional, orlicz)")
    p.add_argument("--young", default="t*log(e+t)", help="Young function (orlicz)")
    p.add_argument("--denominator", choices=("content", "power"), default="content")
    p.add_argument("--budget", type=int, default=20_000, help="cube budget for non-dyadic families")

    p = sub.add_parser("riesz", help="Riesz potential I_alpha f (or the content version)", formatter_class=fmt)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--method", choices=("fft", "direct"), default="fft")
    p.add_argument("--beta", type=float, help="integrate against dyadic content of this dimension instead")

    p = sub.add_parser("commutator", help="[b, I_alpha] f or its m-fold iterate", formatter_class=fmt)
    p.add_argument("--b", required=True, help="symbol grid file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--method", choices=("fft", "direct"), default="fft")

    p = sub.add_parser("bmo", help="BMO^beta norm", formatter_class=fmt)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--family", choices=FAMILIES, default="dyadic")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--budget", type=int, default=20_000)

    p = sub.add_parser("check", help="run one registered check", formatter_class=fmt)
    p.add_argument("check_id", help="one of: " + ", ".join(CHECKS))
    p.add_argument("--out-dir", default=".", help="root of reports/ and plots/")
    p.add_argument("--print-json", action="store_true", help="also print the report")
    _add_config_flags(p)

    p = sub.add_parser("suite", help="run every registered check", formatter_class=fmt)
    p.add_argument("--profile", choices=PROFILES, default="desk")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--checks", help="comma-separated subset of check ids")
    _add_config_flags(p)

    p = sub.add_parser("gen", help="write generated (b, f) pairs as grid files", formatter_class=fmt)
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--cube", help="target dyadic cube 'level:c1,...' for fourier-witness")
    _add_config_flags(p)
    return ap


def _parse_cube(text: str) -> DyadicCube:
    try:
        level, coords = text.split(":")
        return DyadicCube(int(level), tuple(int(c) for c in coords.split(",")))
    except ValueError:
        raise UsageError(f"bad cube {text!r}; expected 'level:c1,c2,...'") from None


def cmd_content(args) -> int:
    E = read_leafset(args.inp)
    params = ContentParams(args.beta, args.flavor)
    params.check(E.root)
    if args.flavor == "ball":
        lo, hi = ball_content_estimate(E, params)
        print(f"{lo!r} {hi!r}")
    else:
        print(repr(dyadic_content(E, params)))
    wit = minimal_cover(E, ContentParams(args.beta))
    path = Path(args.witness or f"{args.inp}.witness.json")
    path.write_text(wit.to_json() + "\n")
    print(f"witness: {path}", file=sys.stderr)
    return EXIT_OK


def cmd_choquet(args) -> int:
    f = read_grid(args.inp)
    params = ContentParams(args.beta)
    over = _parse_cube(args.cube) if args.cube else None
    print(repr(choquet_integral(abs(f), params, over)))
    if args.profile:
        level_profile(f, params, over).to_tsv(args.profile)
    return EXIT_OK


def cmd_maximal(args) -> int:
    f = read_grid(args.inp)
    params = ContentParams(args.beta)
    kw = dict(budget=args.budget)
    if args.kind == "content":
        g = maximal_content(f, params, args.family, args.denominator, **kw)
    elif args.kind == "sharp":
        g = maximal_sharp(f, params, args.family, **kw)
    elif args.kind == "fractional":
        g = maximal_fractional(f, args.alpha, params, args.family, args.denominator, **kw)
    else:
        g = maximal_orlicz_fractional(f, args.alpha, parse_young(args.young), params, args.family, **kw)
    write_grid(g, args.out)
    return EXIT_OK


def cmd_riesz(args) -> int:
    f = read_grid(args.inp)
    if args.beta is not None:
        g = beta_riesz_potential(f, args.alpha, ContentParams(args.beta))
    else:
        g = riesz_potential(f, RieszParams(args.alpha, args.method))
    write_grid(g, args.out)
    return EXIT_OK


def cmd_commutator(args) -> int:
    b, f = read_grid(args.b), read_grid(args.inp)
    if b.root != f.root:
        raise UsageError("b and f live on different grids")
    rp = RieszParams(args.alpha, args.method)
    g = commutator(b, f, rp) if args.m == 1 else iterated_commutator(b, f, args.m, rp)
    write_grid(g, args.out)
    return EXIT_OK


def cmd_bmo(args) -> int:
    b = read_grid(args.inp)
    print(repr(bmo_norm(b, ContentParams(args.beta), args.family, args.p, budget=args.budget)))
    return EXIT_OK


def cmd_check(args) -> int:
    if args.check_id not in CHECKS:
        raise UsageError(f"unknown check id {args.check_id!r}; known: {', '.join(CHECKS)}")
    cfg = config_from_mapping(desk_config(args.check_id), _overrides(args))
    rep = run_check(args.check_id, cfg)
    path = write_outputs(rep, args.out_dir, _stamp())
    if args.print_json:
        sys.stdout.write(rep.to_json())
    print(rep.summary_line())
    print(f"report: {path}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_suite(args) -> int:
    over = _overrides(args)
    seed = over.pop("seed", 0)
    ids = None
    if args.checks:
        ids = [c.strip() for c in args.checks.split(",") if c.strip()]
        unknown = [c for c in ids if c not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check ids: {unknown}")
    reports = run_suite(args.profile, seed, args.jobs, ids, over or None)
    stamp = _stamp()
    for rep in reports:
        write_outputs(rep, args.out_dir, stamp)
        print(rep.summary_line())
    out = Path(args.out_dir) / "reports" / f"summary_{stamp}.csv"
    out.write_text(summary_csv(reports))
    failed = [r.check_id for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed; summary: {out}")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_gen(args) -> int:
    cfg = config_from_mapping(_DEFAULTS, _overrides(args))
    target = _parse_cube(args.cube) if args.cube else None
    pairs = gen_functions(args.kind, cfg, target=target)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, (b, f) in enumerate(pairs):
        write_grid(b, out / f"{args.kind}_{i:03d}_b.txt")
        write_grid(f, out / f"{args.kind}_{i:03d}_f.txt")
    print(f"wrote {len(pairs)} pairs to {out}")
    return EXIT_OK


COMMANDS = {"content": cmd_content, "choquet": cmd_choquet, "maximal": cmd_maximal, "riesz": cmd_riesz,
            "commutator": cmd_commutator, "bmo": cmd_bmo, "check": cmd_check, "suite": cmd_suite, "gen": cmd_gen}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"capacitary: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"capacitary: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
