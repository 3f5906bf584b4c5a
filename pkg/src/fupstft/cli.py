"""Command-line front end: ``fupstft <group> <command> [options]``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds, density, porosity
from .cantor import CantorSpec, GrowthCondition, RadialCantorSpec, build_iterate, cantor_function, square_product
from .experiments import ExperimentConfig, run_experiment, run_property_suites
from .operators import bargmann, gabor, radial


def _number(text: str):
    """Integers and fractions stay exact; anything else becomes a float."""
    try:
        value = Fraction(text)
    except ValueError:
        return float(text)
    return int(value) if value.denominator == 1 else value


def _alphabet(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, default=_jsonable) + "\n"
    if args.out:
        Path(args.out).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def _spec(args) -> CantorSpec:
    return CantorSpec(args.M, _alphabet(args.alphabet), args.n, args.L)


def _add_spec(p, n_default=3):
    p.add_argument("--M", type=int, default=3, help="base")
    p.add_argument("--alphabet", default="0,2", help="comma-separated digits")
    p.add_argument("--n", type=int, default=n_default, help="iterate")
    p.add_argument("--L", type=_number, default=1, help="length (fractions like 1/3 stay exact)")


# handlers ------------------------------------------------------------------


def cmd_cantor(args):
    spec = _spec(args)
    if args.command == "build":
        return {"spec": spec.to_json(), "intervals": build_iterate(spec).to_json()}
    if args.command == "measure":
        s = build_iterate(spec)
        return {"spec": spec.to_json(), "measure": s.measure, "formula": spec.measure}
    return {"x": args.x, "value": cantor_function(spec, args.x)}


def cmd_porosity(args):
    spec = _spec(args)
    if args.command == "certify":
        return porosity.certify_cantor_porosity(spec, cross_check=not args.no_cross_check).to_json()
    nu = args.nu if args.nu is not None else 1 / spec.M**2
    alpha_min = args.alpha_min if args.alpha_min is not None else float(spec.L) * spec.M ** (1 - spec.n)
    alpha_max = args.alpha_max if args.alpha_max is not None else float(spec.L) * spec.M
    return porosity.verify_porosity_1d(build_iterate(spec), nu, alpha_min, alpha_max).to_json()


def cmd_density(args):
    spec = _spec(args)
    if args.command == "subadd":
        rng = np.random.default_rng(args.seed)
        xy = np.sort(rng.uniform(0, float(spec.L), (args.pairs, 2)), axis=1)
        res = density.check_weak_subadditivity(spec, map(tuple, xy))
        return {"ok": res.ok, "checked": res.checked, "violation": res.violation, "seed": args.seed}
    if args.kind == "exact":
        return density.rho_exact_1d(build_iterate(spec), 2 * args.r).to_json()
    if args.kind == "product":
        return density.rho_product_bound(square_product(spec, 2 * args.d), args.r).to_json()
    rspec = RadialCantorSpec(args.d, float(spec.L) ** (1 / (2 * args.d)), spec.M, spec.alphabet, spec.n)
    return density.rho_radial_bound(rspec, args.r).to_json()


def cmd_bounds(args):
    if args.command == "kappa":
        return {"d": args.d, "x": args.x, "kappa": bounds.kappa(args.d, args.x)}
    if args.command == "schedule":
        return bounds.build_schedule(args.nu, args.h, args.d, args.p, args.r0_fraction).to_json()
    if args.command == "improvement":
        res = bounds.check_improvement(np.linspace(args.r_min, args.r_max, args.points))
        return {"ok": res.ok, "violations": res.violations}
    alphabet = _alphabet(args.alphabet)
    cond = GrowthCondition("D_M" if args.family == "radial" else "I_M", args.c1, args.c2, args.M)
    scale = args.scale
    if args.family == "radial":
        fam = bounds.RadialFamily(args.d, args.M, alphabet, lambda n: (scale * args.M ** (n / 2)) ** (1 / (2 * args.d)))
    else:
        fam = bounds.ProductFamily(args.d, args.M, alphabet, lambda n: scale * args.M ** (n / 2))
    radii = [float(r) for r in args.radii.split(",")]
    rows, gamma = bounds.cantor_fup_table(fam, cond, radii, range(args.n_min, args.n_max + 1), args.p, not args.plain)
    return {"gamma": gamma, "rows": [r.to_json() for r in rows]}


def cmd_ops(args):
    if args.command == "radial-spectrum":
        spec = RadialCantorSpec(1, args.R, args.M, _alphabet(args.alphabet), args.n)
        return radial.daubechies_radial_spectrum(spec).to_json(limit=args.top)
    if args.command == "gabor-norm":
        spec = CantorSpec(args.M, _alphabet(args.alphabet), args.n, args.L)
        a = args.spacing if args.spacing is not None else float(spec.cell)
        lattice = gabor.Lattice2d.square(a, 1, centered_cells=not args.uncentered)
        res = gabor.lattice_restriction(lattice, square_product(spec, 2))
        out = gabor.gabor_multiplier_norm(res, method=args.method).to_json(limit=args.top)
        if args.dump:
            gabor.dump_matrix(args.dump, gabor.gram_matrix(res.points))
        return out
    rng = np.random.default_rng(args.seed)
    t = bargmann.default_grid()
    orders = [int(k) for k in rng.integers(0, 7, args.cases)]
    points = [tuple(rng.uniform(-2, 2, 2)) for _ in orders]
    table = bargmann.hermite_functions(6, t)
    ident = max(bargmann.check_stft_bargmann_identity(table[k], t, [p]) for k, p in zip(orders, points))
    return {
        "seed": args.seed,
        "cases": args.cases,
        "hermite_sampling_max_error": bargmann.check_hermite_sampling_identity(orders, points, t),
        "stft_bargmann_identity_max_error": ident,
    }


def cmd_run(args):
    if args.experiment == "suites":
        return cmd_suites(args)
    overrides = list(args.set or [])
    overrides.append(f"experiment={json.dumps(args.experiment)}")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    cfg = ExperimentConfig.load(args.config, overrides)
    csv_text, meta = run_experiment(cfg)
    out = args.out or cfg.out
    if out:
        Path(out).write_text(csv_text, newline="")
        Path(str(out) + ".json").write_text(json.dumps(meta, indent=2, default=_jsonable) + "\n")
    else:
        sys.stdout.write(csv_text)
    return 0 if meta["all_pass"] else 1


def cmd_suites(args):
    report = run_property_suites(args.suite, seed=args.seed or 0, inject=args.inject)
    _emit(args, report)
    return 0 if report["ok"] else 1


# parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--config", default=None, help="JSON config file")

    parser = argparse.ArgumentParser(prog="fupstft", description="Cantor sets, porosity, densities and time-frequency bounds.")
    groups = parser.add_subparsers(dest="group", required=True)

    g = groups.add_parser("cantor", help="Cantor iterates")
    sub = g.add_subparsers(dest="command", required=True)
    for name in ("build", "measure", "function"):
        p = sub.add_parser(name, parents=[common])
        _add_spec(p)
        if name == "function":
            p.add_argument("--x", type=_number, required=True)

    g = groups.add_parser("porosity", help="porosity certificates")
    sub = g.add_subparsers(dest="command", required=True)
    p = sub.add_parser("verify", parents=[common])
    _add_spec(p)
    p.add_argument("--nu", type=float)
    p.add_argument("--alpha-min", type=float)
    p.add_argument("--alpha-max", type=float)
    p = sub.add_parser("certify", parents=[common])
    _add_spec(p)
    p.add_argument("--no-cross-check", action="store_true")

    g = groups.add_parser("density", help="Nyquist densities")
    sub = g.add_subparsers(dest="command", required=True)
    p = sub.add_parser("rho", parents=[common])
    _add_spec(p)
    p.add_argument("--kind", choices=["exact", "product", "radial"], default="exact")
    p.add_argument("--r", type=float, required=True, help="window radius")
    p.add_argument("--d", type=int, default=1)
    p = sub.add_parser("subadd", parents=[common])
    _add_spec(p)
    p.add_argument("--pairs", type=int, default=1000)

    g = groups.add_parser("bounds", help="explicit constants")
    sub = g.add_subparsers(dest="command", required=True)
    p = sub.add_parser("kappa", parents=[common])
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--x", type=float, required=True)
    p = sub.add_parser("schedule", parents=[common])
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--r0-fraction", type=float, default=0.9)
    p = sub.add_parser("table", parents=[common])
    p.add_argument("--family", choices=["radial", "product"], default="radial")
    p.add_argument("--M", type=int, default=3)
    p.add_argument("--alphabet", default="0,2")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--n-min", type=int, default=0)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--radii", default=",".join(str(0.25 * k) for k in range(1, 17)))
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--plain", action="store_true", help="use the (p/2)-form instead of the optimized form")
    p = sub.add_parser("improvement", parents=[common])
    p.add_argument("--r-min", type=float, default=0.01)
    p.add_argument("--r-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=1000)

    g = groups.add_parser("ops", help="time-frequency operators")
    sub = g.add_subparsers(dest="command", required=True)
    p = sub.add_parser("radial-spectrum", parents=[common])
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--M", type=int, default=3)
    p.add_argument("--alphabet", default="0,2")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--top", type=int, default=16)
    p = sub.add_parser("gabor-norm", parents=[common])
    _add_spec(p, n_default=2)
    p.add_argument("--spacing", type=float, help="lattice spacing (default: the Cantor cell)")
    p.add_argument("--uncentered", action="store_true", help="lattice through the origin")
    p.add_argument("--method", choices=["power", "dense"], default="power")
    p.add_argument("--top", type=int, default=16)
    p.add_argument("--dump", help="write the Gram matrix to this file")
    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--cases", type=int, default=50)

    p = groups.add_parser("run", parents=[common], help="run an experiment sweep or the property suites")
    p.add_argument("experiment", choices=["radial_fup", "gabor_fup", "suites"])
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override (repeatable)")
    p.add_argument("--suite", action="append", help="suites only: restrict to these suites (repeatable)")
    p.add_argument("--inject", choices=["subadditivity"], help="suites only: inject a known violation")
    return parser


HANDLERS = {"cantor": cmd_cantor, "porosity": cmd_porosity, "density": cmd_density, "bounds": cmd_bounds, "ops": cmd_ops}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.group == "run":
            return cmd_run(args)
        if getattr(args, "seed", None) is None:
            args.seed = 0
        _emit(args, HANDLERS[args.group](args))
        return 0
    except (ValueError, ArithmeticError, NotImplementedError, OverflowError, gabor.MatrixCapError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
