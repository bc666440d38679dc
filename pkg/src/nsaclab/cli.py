"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 structure or convergence failure.
Structured results are JSON, arrays are CSV, figures are SVG.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import landscape, maxwell, pde1d, profile, thermo, twave
from .errors import ConvergenceError, DomainError, MeasureError, StateError, StructureError
from .figure import PI_OFFSETS, THETA_OFFSETS, count_panels, render_figure
from .thermo import ModelParams

EXIT_OK, EXIT_INPUT, EXIT_SOLVE = 0, 2, 3


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    top = argparse.ArgumentParser(prog="nsaclab", description=__doc__.splitlines()[0])
    top.add_argument("--config", type=Path, help="JSON file with a 'model' block and option overrides")
    top.add_argument("--out", type=Path, default=Path("."), help="output directory")
    top.add_argument("-v", "--verbose", action="store_true")
    sub = top.add_subparsers(dest="command", required=True)
    subs = {}

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        subs[name] = p
        return p

    p = add("crit", "critical pressure p*")
    p.add_argument("--tau1", type=float)

    p = add("maxwell", "Maxwell states at one temperature")
    p.add_argument("--theta-offset", type=float, default=-0.08)

    p = add("pistar-sweep", "pi*(theta) over a list of temperature offsets")
    p.add_argument("--theta-offsets", type=_floats, default=[-0.16, -0.12, -0.08, -0.04, -0.02, 0.0])

    p = add("profile", "no-flux phase boundary profile")
    p.add_argument("--theta-offset", type=float, default=-0.08)
    p.add_argument("--n-samples", type=int, default=2001)
    p.add_argument("--mirror", action="store_true", help="emit the backward profile")

    p = add("landscape", "Gamma level lines and critical points")
    p.add_argument("--figure", action="store_true", help="render the 3x5 panel figure")
    p.add_argument("--theta-offset", type=float, default=-0.08)
    p.add_argument("--pi-offset", type=float, default=0.0)
    p.add_argument("--theta-offsets", type=_floats, default=list(THETA_OFFSETS))
    p.add_argument("--pi-offsets", type=_floats, default=list(PI_OFFSETS))
    p.add_argument("--window", type=_floats, default=list(landscape.DEFAULT_WINDOW),
                   help="c_min,c_max,y_min,y_max")
    p.add_argument("--cells", type=int, default=landscape.DEFAULT_CELLS)

    p = add("travel", "traveling phase boundary for mass flux m")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--theta-offset", type=float, default=-0.08)
    p.add_argument("--family", choices=["fwd", "bwd"], default="fwd")

    p = add("simulate", "time-dependent 1D run")
    p.add_argument("--init", required=True, help="profile CSV path or 'constant'")
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--cells", type=int, default=1024)
    p.add_argument("--bc", choices=[pde1d.PERIODIC, pde1d.ZERO_GRADIENT], default=pde1d.ZERO_GRADIENT)
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--cfl", type=float, default=0.5)
    p.add_argument("--snapshot-every", type=float, default=1.0)
    p.add_argument("--theta-offset", type=float, default=-0.08, help="used by constant init")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--c", type=float, default=0.5)
    return top, subs


def load_config(path: Path) -> tuple[ModelParams, dict]:
    """Model parameters plus command options from a JSON file."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise DomainError("config must be a JSON object")
    data = dict(data)
    model = data.pop("model", {})
    if not isinstance(model, dict):
        raise DomainError("'model' must be a JSON object")
    return ModelParams.from_dict(model), data


def _apply_options(sub: argparse.ArgumentParser, options: dict):
    dests = {a.dest for a in sub._actions if a.dest != "help"}
    unknown = sorted(k for k in options if k.replace("-", "_") not in dests)
    if unknown:
        raise DomainError(f"unknown config keys: {unknown}")
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in options.items()})


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


# -- commands --------------------------------------------------------------------


def cmd_crit(args, params: ModelParams) -> int:
    if args.tau1 is not None:
        params = replace(params, tau1=args.tau1)
    p_star = thermo.critical_pressure(params)
    text = dumps({"p_star": p_star, "tau1": params.tau1,
                  "residual": params.tau1 * p_star - np.log(p_star) - 1.0})
    sys.stdout.write(text)
    return EXIT_OK


def cmd_maxwell(args, params: ModelParams) -> int:
    theta = params.theta_star + args.theta_offset
    pair = maxwell.maxwell_pair(theta, params)
    text = dumps(pair.to_dict())
    _write(args.out, "maxwell.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_pistar_sweep(args, params: ModelParams) -> int:
    rows = []
    for off in args.theta_offsets:
        try:
            _, pair = maxwell.pi_star(params.theta_star + off, params)
            rows.append({"theta_offset": off, **pair.to_dict()})
        except StructureError as exc:
            rows.append({"theta_offset": off, "error": str(exc)})
    text = dumps({"p_star": thermo.critical_pressure(params), "sweep": rows})
    _write(args.out, "pistar_sweep.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_profile(args, params: ModelParams) -> int:
    prof = profile.build_profile(params.theta_star + args.theta_offset, params, n_samples=args.n_samples)
    if args.mirror:
        prof = profile.mirror(prof)
    path = _write(args.out, "profile.csv", prof.to_csv())
    r_mom, r_ac = profile.residual_check(prof, params)
    sys.stdout.write(dumps({"path": str(path), "pi_star": prof.pi_star, "direction": prof.direction,
                            "residuals": [r_mom, r_ac], "x_range": [prof.x[0], prof.x[-1]]}))
    return EXIT_OK


def _crit_dict(cp: landscape.CriticalPoint) -> dict:
    return {"c": cp.point.c, "y": cp.point.y, "kind": cp.kind, "level": cp.level,
            "eigenvalues": list(cp.eigenvalues)}


def cmd_landscape(args, params: ModelParams) -> int:
    if len(args.window) != 4:
        raise DomainError("window needs four numbers")
    window = tuple(args.window)
    p_star = thermo.critical_pressure(params)
    if args.figure:
        from .figure import FigureStyle

        svg = render_figure(args.theta_offsets, args.pi_offsets, params, FigureStyle(window=window))
        path = _write(args.out, "figure.svg", svg)
        sys.stdout.write(dumps({"path": str(path), "panels": count_panels(svg)}))
        return EXIT_OK
    lp = landscape.LandscapeParams(params.theta_star + args.theta_offset, p_star + args.pi_offset)
    crit = landscape.find_critical_points(lp, params)
    lines = landscape.contours(lp, params, window, args.cells, landscape.panel_levels(crit))
    _write(args.out, "contours.csv", landscape.contours_csv(lines))
    text = dumps({"theta": lp.theta, "pi": lp.pi, "critical_points": [_crit_dict(cp) for cp in crit]})
    _write(args.out, "critical_points.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_travel(args, params: ModelParams) -> int:
    family = profile.FORWARD if args.family == "fwd" else profile.BACKWARD
    wave = twave.connect(args.m, params.theta_star + args.theta_offset, params, family=family)
    _write(args.out, "wave.csv", wave.to_csv())
    text = dumps(wave.summary())
    _write(args.out, "wave.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args, params: ModelParams) -> int:
    if args.init == "constant":
        theta = params.theta_star + args.theta_offset
        x_min = -40.0 if args.x_min is None else args.x_min
        x_max = 40.0 if args.x_max is None else args.x_max
        grid = pde1d.Grid1D.spanning(x_min, x_max, args.cells, args.bc)
        state = pde1d.init_constant(args.rho, args.u, args.c, grid)
    else:
        try:
            text = Path(args.init).read_text()
        except OSError as exc:
            raise DomainError(f"cannot read profile {args.init}: {exc}") from None
        prof = profile.read_profile_csv(text, params)
        theta = prof.theta
        periodic = args.bc == pde1d.PERIODIC
        x_min = (-80.0 if periodic else -40.0) if args.x_min is None else args.x_min
        x_max = (80.0 if periodic else 40.0) if args.x_max is None else args.x_max
        grid = pde1d.Grid1D.spanning(x_min, x_max, args.cells, args.bc)
        state = pde1d.init_double_profile(prof, grid) if periodic else pde1d.init_from_profile(prof, grid)
    pde1d.validate(state, params)
    res = pde1d.run(state, grid, params, theta, args.T, cfl=args.cfl, snapshot_every=args.snapshot_every)
    for k, snap in enumerate(res.snapshots or [res.state]):
        _write(args.out, f"snapshot_{k:04d}.csv", pde1d.snapshot_csv(snap, grid))
    try:
        speed = pde1d.measure_drift(res.snapshots, grid, 0.5) if len(res.snapshots) >= 2 else None
    except MeasureError:
        speed = None
    m0 = state.mass(grid)
    text = dumps({
        "steps": res.steps,
        "t_end": res.state.t,
        "mass_drift": (res.state.mass(grid) - m0) / m0,
        "interface_speed": speed,
        "free_energy": [[t, e] for t, e in res.free_energy],
    })
    _write(args.out, "summary.json", text)
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "crit": cmd_crit,
    "maxwell": cmd_maxwell,
    "pistar-sweep": cmd_pistar_sweep,
    "profile": cmd_profile,
    "landscape": cmd_landscape,
    "travel": cmd_travel,
    "simulate": cmd_simulate,
}


def dispatch(argv: list[str] | None = None) -> int:
    top, subs = _parser()
    try:
        args = top.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        params = ModelParams()
        if args.config is not None:
            params, options = load_config(args.config)
            if options:
                _apply_options(subs[args.command], options)
                args = top.parse_args(argv)
        return COMMANDS[args.command](args, params)
    except (StructureError, ConvergenceError, StateError, MeasureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    except (DomainError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
