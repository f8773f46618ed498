"""Command-line front end: solve, check, mesh, treadmill, flux, equiv.

Every command is deterministic given its inputs; the --seed flag is
reserved for stochastic probing and recorded in sidecars.  Commands that
write a delimited report also render a PNG figure next to it unless
--no-plot is given.

Exit codes: 0 success / verified, 1 verdict-negative (e.g. NON_CMC),
2 usage or I/O error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import plots
from .conservation import check_constancy, conserved_quantity, flux_conormal, flux_shaving, write_flux_csv
from .curve import BaseCurve, read_curve_csv, write_curve_csv
from .errors import DomainError, KindMismatch, TwizzleError
from .solver import SolverConfig, solve_h3, solve_r3, solve_s3, write_sidecar
from .spaceform import from_name
from .treadmill import read_path_csv, reconstruct, treadmill, write_path_csv
from .twizzler import Twizzler, sample_mesh, write_obj, write_vertices_csv

__all__ = ["main"]

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


# ---------------------------------------------------------------------------
# preset input curves (so the CLI is usable without external files)
# ---------------------------------------------------------------------------


def preset_curve(name: str, *, radius: float = 1.0, eps: float = 0.1, xi: float = np.pi / 4) -> BaseCurve:
    """Built-in analytic curves: circle, line, perturbed-cylinder, torus, h3-cylinder."""
    if name == "circle":
        r = radius
        return BaseCurve.from_callables(
            lambda u: r * np.exp(1j * u),
            lambda u: 1j * r * np.exp(1j * u),
            lambda u: -r * np.exp(1j * u),
            domain=(0.0, 2 * np.pi),
            metadata={"preset": name, "radius": r},
        )
    if name == "line":
        return BaseCurve.from_callables(
            lambda u: u + 0j,
            lambda u: np.ones_like(u) + 0j,
            lambda u: np.zeros_like(u) + 0j,
            domain=(-5.0, 5.0),
            metadata={"preset": name},
        )
    if name == "perturbed-cylinder":
        return BaseCurve.from_callables(
            lambda u: (1 + eps * np.sin(u)) * np.exp(1j * u),
            lambda u: eps * np.cos(u) * np.exp(1j * u) + 1j * (1 + eps * np.sin(u)) * np.exp(1j * u),
            domain=(0.0, 2 * np.pi),
            metadata={"preset": name, "eps": eps},
        )
    if name == "torus":
        a = float(np.cos(xi))
        return BaseCurve.from_callables(
            lambda u: a * np.exp(1j * u),
            lambda u: 1j * a * np.exp(1j * u),
            lambda u: -a * np.exp(1j * u),
            domain=(0.0, 2 * np.pi),
            metadata={"preset": name, "xi": xi, "radius": a},
        )
    if name == "h3-cylinder":
        a = radius
        return BaseCurve.from_callables(
            lambda u: a * np.exp(1j * u),
            lambda u: 1j * a * np.exp(1j * u),
            lambda u: -a * np.exp(1j * u),
            domain=(0.0, 2 * np.pi),
            metadata={"preset": name, "radius": a},
        )
    raise DomainError(f"unknown preset {name!r}")


def _load_curve(args) -> BaseCurve:
    if getattr(args, "preset", None):
        return preset_curve(args.preset, radius=args.radius, eps=args.eps, xi=args.xi)
    if getattr(args, "infile", None):
        return read_curve_csv(args.infile)
    raise DomainError("provide --in CURVE.csv or --preset NAME")


# ---------------------------------------------------------------------------
# config file: plain `key = value` lines, flags take precedence
# ---------------------------------------------------------------------------


def _coerce(text: str):
    text = text.strip()
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def load_config(path) -> dict:
    out = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"bad config line {line!r}")
            key, val = line.split("=", 1)
            out[key.strip().replace("-", "_")] = _coerce(val)
    return out


# ---------------------------------------------------------------------------
# shared argument groups
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--config", help="key = value defaults file (flags override)")
    p.add_argument("--seed", type=int, default=0, help="seed for stochastic probing (reserved)")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")


def _add_input(p):
    p.add_argument("--in", dest="infile", help="input curve CSV")
    p.add_argument("--preset", choices=["circle", "line", "perturbed-cylinder", "torus", "h3-cylinder"])
    p.add_argument("--radius", type=float, default=1.0, help="preset radius")
    p.add_argument("--eps", type=float, default=0.1, help="preset perturbation size")
    p.add_argument("--xi", type=float, default=np.pi / 4, help="preset torus angle")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="twizzle",
        description="Helicoidal CMC surfaces: solvers, conservation checks, meshes.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="generate a CMC base curve")
    p.add_argument("--space", required=True, choices=["r3", "s3", "h3"])
    p.add_argument("--H", type=float, required=True, dest="H")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--M", type=float, dest="M")
    p.add_argument("--C", type=float, dest="C")
    p.add_argument("--start", type=float, help="initial |gamma| (s3/h3)")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--max-steps", type=int, default=20000)
    p.add_argument("--branch", type=int, default=1, choices=[-1, 1])
    p.add_argument("--turning-eps", type=float, default=1e-9)
    p.add_argument("--tol-root", type=float, default=1e-12)
    p.add_argument("--samples", type=int, default=801, help="CSV sample count")
    p.add_argument("-o", "--out", required=True, help="output curve CSV")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="CMC verdict from flux constancy")
    _add_input(p)
    p.add_argument("--space", default="r3", choices=["r3", "s3", "h3"])
    p.add_argument("--H", type=float, required=True, dest="H")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--threshold", type=float, default=1e-3)
    p.add_argument("--report", help="flux report CSV (default <in>_flux.csv)")
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("mesh", help="sample a twizzler mesh and write OBJ")
    _add_input(p)
    p.add_argument("--space", default="r3", choices=["r3", "s3", "h3"])
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--nu", type=int, default=64)
    p.add_argument("--nv", type=int, default=64)
    p.add_argument("--u-range", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--v-range", type=float, nargs=2, default=[0.0, 2 * np.pi], metavar=("A", "B"))
    p.add_argument("-o", "--out", required=True, help="output OBJ path")
    _add_common(p)
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("treadmill", help="ell-treadmill of a curve, or reconstruct from a path")
    _add_input(p)
    p.add_argument("--ell", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--reconstruct", action="store_true", help="treat --in as a path CSV and invert it")
    p.add_argument("-o", "--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_treadmill)

    p = sub.add_parser("flux", help="raw conormal/shaving quadrature dump")
    _add_input(p)
    p.add_argument("--space", default="r3", choices=["r3", "s3", "h3"])
    p.add_argument("--H", type=float, default=0.0, dest="H")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("-o", "--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_flux)

    p = sub.add_parser("equiv", help="conserved quantity vs -pi M table")
    _add_input(p)
    p.add_argument("--H", type=float, required=True, dest="H")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("-o", "--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_equiv)

    return ap


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    have_m = args.M is not None
    have_c = args.C is not None
    if have_m == have_c:
        print("solve: give exactly one of --M / --C (C = -pi M)", file=sys.stderr)
        return EXIT_USAGE
    M = args.M if have_m else -args.C / np.pi
    C = args.C if have_c else -np.pi * args.M
    cfg = SolverConfig(
        step=args.step, tol_root=args.tol_root, max_steps=args.max_steps,
        branch=args.branch, turning_eps=args.turning_eps,
    )
    if args.space == "r3":
        curve = solve_r3(args.H, M, args.m, cfg)
    else:
        if args.start is None:
            print("solve: --start is required for s3/h3", file=sys.stderr)
            return EXIT_USAGE
        solver = solve_s3 if args.space == "s3" else solve_h3
        curve = solver(args.H, C, args.m, args.start, cfg)
    out = Path(args.out)
    write_curve_csv(out, curve, samples=args.samples)
    write_sidecar(curve, out.with_suffix(out.suffix + ".json"), extra={"seed": args.seed})
    if not args.no_plot:
        plots.save_curve_figure(curve, out.with_suffix(".png"), title=f"{args.space} solve H={args.H:g}")
    print(f"wrote {out} ({curve.metadata.get('steps', args.samples)} steps, "
          f"{curve.metadata.get('branch', 'trace')})")
    return EXIT_OK


def cmd_check(args) -> int:
    curve = _load_curve(args)
    sf = from_name(args.space)
    twz = Twizzler(sf, curve, args.m)
    a, b = curve.domain
    pad = (b - a) * 1e-3
    u = np.linspace(a + pad, b - pad, args.samples)
    report = check_constancy(twz, args.H, u)
    base = Path(args.infile).stem if args.infile else (args.preset or "curve")
    report_path = Path(args.report) if args.report else Path(f"{base}_flux.csv")
    write_flux_csv(report, report_path)
    if not args.no_plot:
        plots.save_flux_figure(report, report_path.with_suffix(".png"),
                               title=f"{args.space} flux constancy, H={args.H:g}")
    verdict_dev = report.omega_deviation
    extras = ""
    if args.space == "r3":
        from .treadmill import equivalence_check

        data = equivalence_check(curve, args.m, args.H, samples=args.samples)
        extras = f" |C+piM|={data.equivalence_gap:.3e}"
    print(
        f"median_C={report.median_closed:.12g} max_dev={verdict_dev:.3e} "
        f"cross={report.cross_discrepancy:.3e}{extras}"
    )
    if verdict_dev > args.threshold:
        print("NON_CMC")
        return EXIT_VERDICT
    print("CMC")
    return EXIT_OK


def cmd_mesh(args) -> int:
    curve = _load_curve(args)
    sf = from_name(args.space)
    twz = Twizzler(sf, curve, args.m)
    u_range = tuple(args.u_range) if args.u_range else curve.domain
    if not u_range[0] < u_range[1] or not args.v_range[0] < args.v_range[1]:
        print("mesh: degenerate sampling range", file=sys.stderr)
        return EXIT_USAGE
    mesh = sample_mesh(twz, u_range, tuple(args.v_range), args.nu, args.nv)
    out = Path(args.out)
    write_obj(mesh, out)
    msg = f"wrote {out} ({len(mesh.vertices)} vertices, {len(mesh.faces)} faces)"
    if not sf.is_flat:
        raw = out.with_suffix(".4d.csv")
        write_vertices_csv(mesh, raw)
        msg += f" + {raw}"
    if not args.no_plot:
        plots.save_mesh_figure(mesh, out.with_suffix(".png"), title=f"{args.space} twizzler, m={args.m:g}")
    print(msg)
    return EXIT_OK


def cmd_treadmill(args) -> int:
    out = Path(args.out)
    if args.reconstruct:
        if not args.infile:
            print("treadmill --reconstruct needs --in PATH.csv", file=sys.stderr)
            return EXIT_USAGE
        path_obj = read_path_csv(args.infile)
        curve = reconstruct(path_obj)
        write_curve_csv(out, curve, samples=max(args.samples, 4))
        if not args.no_plot:
            plots.save_curve_figure(curve, out.with_suffix(".png"), title="reconstructed curve")
        print(f"wrote {out}")
        return EXIT_OK
    if not (0.0 <= args.ell <= 1.0):
        print(f"warning: ell = {args.ell:g} outside [0, 1]; the definition imposes no bound",
              file=sys.stderr)
    curve = _load_curve(args)
    path_obj = treadmill(curve, args.ell, samples=args.samples)
    write_path_csv(path_obj, out)
    if not args.no_plot:
        plots.save_treadmill_figure(path_obj, out.with_suffix(".png"))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_flux(args) -> int:
    curve = _load_curve(args)
    sf = from_name(args.space)
    twz = Twizzler(sf, curve, args.m)
    a, b = curve.domain
    pad = (b - a) * 1e-3
    u = np.linspace(a + pad, b - pad, args.samples)
    conormal = np.array([flux_conormal(twz, x) for x in u])
    shaving = np.array([flux_shaving(twz, x) for x in u])
    omega = conormal - args.H * shaving
    out = Path(args.out)
    with open(out, "w", encoding="ascii") as fh:
        fh.write("u,conormal,shaving,omega\n")
        for row in zip(u, conormal, shaving, omega):
            fh.write(",".join(format(x, ".17g") for x in row) + "\n")
    if not args.no_plot:
        report = check_constancy(twz, args.H, u)
        plots.save_flux_figure(report, out.with_suffix(".png"), title=f"{args.space} raw flux")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_equiv(args) -> int:
    curve = _load_curve(args)
    twz = Twizzler(from_name("r3"), curve, args.m)
    from .treadmill import cmc_level_residual, treadmill as run_treadmill

    a, b = curve.domain
    pad = (b - a) * 1e-6
    u = np.linspace(a + pad, b - pad, args.samples)
    C = conserved_quantity(twz, u, args.H)
    path_obj = run_treadmill(curve, 1.0, grid=u)
    M_hat = cmc_level_residual(path_obj.x, path_obj.y, args.H, args.m, 0.0)
    minus_pi_M = -np.pi * M_hat
    gap = np.abs(C - minus_pi_M)
    out = Path(args.out)
    with open(out, "w", encoding="ascii") as fh:
        fh.write("u,C,minus_pi_M,abs_gap\n")
        for row in zip(u, C, minus_pi_M, gap):
            fh.write(",".join(format(x, ".17g") for x in row) + "\n")
        fh.write(f"# max_gap={np.max(gap):.17g} median_C={np.median(C):.17g}\n")
    if not args.no_plot:
        plots.save_equivalence_figure(u, C, minus_pi_M, out.with_suffix(".png"),
                                      title=f"C vs -pi M, H={args.H:g}")
    print(f"max |C + pi M| = {np.max(gap):.3e}")
    if np.max(gap) > args.threshold:
        print("EQUIVALENCE_GAP")
        return EXIT_VERDICT
    return EXIT_OK


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    if "--config" in argv:
        try:
            cfg_path = argv[argv.index("--config") + 1]
            defaults = load_config(cfg_path)
        except (IndexError, OSError, DomainError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for sp in parser._subparsers._group_actions[0].choices.values():  # noqa: SLF001
            known = {a.dest for a in sp._actions}  # noqa: SLF001
            sp.set_defaults(**{k: v for k, v in defaults.items() if k in known})
            for action in sp._actions:  # noqa: SLF001
                if action.dest in defaults:
                    action.required = False
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, DomainError, KindMismatch) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TwizzleError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
