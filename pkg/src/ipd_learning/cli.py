"""Command-line interface.

Every report subcommand writes its delimited output, a figure rendered from
the same in-memory result (unless --no-figure), and a RunManifest JSON; any
manifest can be replayed with ``ipd-learn --manifest <file>`` and reproduces
the data files byte for byte.  Exit codes: 0 success, 1 invalid input or
usage, 2 runtime/I-O failure.
"""

import argparse
import os
import sys
from collections import Counter

from . import io as iomod
from . import plotting
from ._version import __version__
from .dynamics import (
    DEFAULT_CONFIG,
    IntegratorConfig,
    LearningSpeeds,
    integrate,
)
from .errors import IPDLearnError, ValidationError
from .fixed_points import dynamic_stability_probe, most_exploitative
from .game import JointStrategy, equilibrium, validate_payoff
from .sweep import (
    GridAxis,
    STRATEGY_COMPONENTS,
    basin_map,
    grid4d_map,
    stability_region,
    tft_monotonicity_check,
)


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    runtime failures, so usage problems are raised and mapped to 1."""

    def error(self, message):
        raise ValidationError(message)


def _fmt6(v) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return s if s else "0"


def _floats(text, n, what):
    parts = text.split(",")
    if len(parts) != n:
        raise ValidationError(
            f"{what} must be {n} comma-separated numbers, got {text!r}")
    try:
        return [float(v) for v in parts]
    except ValueError:
        raise ValidationError(f"{what} contains a malformed number: {text!r}")


def _parse_axis(text):
    parts = text.split(":")
    if len(parts) != 4:
        raise ValidationError(
            f"axis must look like name:lo:hi:n (e.g. x_D:0.01:0.99:50), got {text!r}")
    name = parts[0]
    try:
        lo, hi = float(parts[1]), float(parts[2])
        n = int(parts[3])
    except ValueError:
        raise ValidationError(f"axis {text!r} has a malformed number")
    return {"name": name, "lo": lo, "hi": hi, "n": n}


def _parse_fixed(text):
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValidationError(
                f"fixed components must look like y_C=0.8,y_D=0.2, got {text!r}")
        name, _, val = part.partition("=")
        name = name.strip()
        try:
            out[name] = float(val)
        except ValueError:
            raise ValidationError(f"fixed component {part!r} has a malformed number")
    return out


def _add_payoff(sp, required=True):
    sp.add_argument("--payoff", required=required, metavar="T,R,P,S",
                    help="one-shot payoffs, e.g. 5,3,1,0")


def _add_dynamics_options(sp):
    sp.add_argument("--speeds", default="1,1,1,1", metavar="S1C,S1D,S2C,S2D",
                    help="learning-speed multipliers (default 1,1,1,1)")
    sp.add_argument("--dt", type=float, default=DEFAULT_CONFIG.dt,
                    help="integration step (default %(default)s)")
    sp.add_argument("--t-max", type=float, default=DEFAULT_CONFIG.t_max,
                    help="time horizon (default %(default)s)")
    sp.add_argument("--converge-tol", type=float,
                    default=DEFAULT_CONFIG.converge_tol,
                    help="field sup-norm convergence tolerance (default %(default)s)")
    sp.add_argument("--sample-interval", type=float,
                    default=DEFAULT_CONFIG.sample_interval,
                    help="time between recorded samples (default %(default)s)")


def _add_output_options(sp, script_kind=None):
    sp.add_argument("--output", required=True, help="output data file")
    sp.add_argument("--no-figure", action="store_true",
                    help="skip rendering the PNG next to the data file")
    if script_kind:
        sp.add_argument("--plot-script", default=None, metavar="PATH",
                        help="also emit a standalone matplotlib script")


def build_parser() -> _Parser:
    parser = _Parser(prog="ipd-learn",
                     description="Learning dynamics of memory-one players "
                                 "in the iterated prisoner's dilemma")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--manifest", metavar="FILE",
                        help="replay a recorded run from its manifest")
    parser.add_argument("--output-dir", metavar="DIR",
                        help="with --manifest: write outputs into DIR instead")
    sub = parser.add_subparsers(dest="command")

    sp = sub.add_parser("equilibrium", help="stationary point of one strategy pair")
    _add_payoff(sp)
    sp.add_argument("--strategy", required=True, metavar="XC,XD,YC,YD",
                    help="joint strategy, e.g. 0.9,0.1,0.9,0.1")

    sp = sub.add_parser("trajectory", help="integrate one learning trajectory")
    _add_payoff(sp)
    sp.add_argument("--init", required=True, metavar="XC,XD,YC,YD",
                    help="initial joint strategy")
    _add_dynamics_options(sp)
    _add_output_options(sp, script_kind="trajectory")

    sp = sub.add_parser("fixed-points",
                        help="stability map of interior rest points")
    _add_payoff(sp)
    sp.add_argument("--speeds", default="1,1,1,1", metavar="S1C,S1D,S2C,S2D")
    sp.add_argument("--grid-n", type=int, default=50,
                    help="grid resolution per axis (default %(default)s)")
    sp.add_argument("--probe", action="store_true",
                    help="cross-check the extreme rest point by perturb-and-integrate")
    _add_output_options(sp)

    sp = sub.add_parser("basin", help="terminal outcomes over a 2-d start grid")
    _add_payoff(sp)
    sp.add_argument("--axis1", required=True, metavar="NAME:LO:HI:N",
                    help=f"outer swept component, one of {', '.join(STRATEGY_COMPONENTS)}")
    sp.add_argument("--axis2", required=True, metavar="NAME:LO:HI:N",
                    help="inner swept component")
    sp.add_argument("--fixed", required=True, metavar="NAME=V,NAME=V",
                    help="the two remaining components, e.g. y_C=0.8,y_D=0.2")
    _add_dynamics_options(sp)
    sp.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: machine core count)")
    _add_output_options(sp, script_kind="basin")

    sp = sub.add_parser("most-exploitative",
                        help="extreme stable exploitation point")
    _add_payoff(sp)

    sp = sub.add_parser("monotonicity",
                        help="closer-to-TFT cooperation robustness check")
    _add_payoff(sp)
    sp.add_argument("--opponent", required=True, metavar="YC,YD",
                    help="fixed opponent start, e.g. 0.8,0.2")
    sp.add_argument("--samples", type=int, default=100,
                    help="cooperating starts to perturb (default %(default)s)")
    sp.add_argument("--seed", type=int, default=0,
                    help="RNG seed (default %(default)s)")
    sp.add_argument("--perturbation", type=float, default=0.5,
                    help="TFT-ward kick as a fraction of headroom (default %(default)s)")
    _add_dynamics_options(sp)
    sp.add_argument("--output", required=True, help="JSON report path")

    sp = sub.add_parser("grid4d",
                        help="terminal outcomes from a 4-d midpoint lattice")
    _add_payoff(sp)
    sp.add_argument("--grid-n", type=int, default=4,
                    help="lattice points per axis (default %(default)s)")
    _add_dynamics_options(sp)
    sp.add_argument("--threads", type=int, default=None)
    _add_output_options(sp, script_kind="scatter")

    return parser


def _config_from(params) -> IntegratorConfig:
    return IntegratorConfig(dt=params["dt"], t_max=params["t_max"],
                            converge_tol=params["converge_tol"],
                            sample_interval=params["sample_interval"])


def _speeds_from(params) -> LearningSpeeds:
    return LearningSpeeds(*params["speeds"])


def _figure_path(output):
    return os.path.splitext(output)[0] + ".png"


def _planned_outputs(params):
    outs = [params["output"]]
    if not params.get("no_figure"):
        outs.append(_figure_path(params["output"]))
    if params.get("plot_script"):
        outs.append(params["plot_script"])
    return outs


def _dynamics_params(args):
    return {
        "speeds": _floats(args.speeds, 4, "--speeds"),
        "dt": args.dt,
        "t_max": args.t_max,
        "converge_tol": args.converge_tol,
        "sample_interval": args.sample_interval,
    }


def _run_equilibrium(params):
    pay = validate_payoff(*params["payoff"])
    eq = equilibrium(pay, JointStrategy(*params["strategy"]))
    print(f"x_e={_fmt6(eq.x_e)} y_e={_fmt6(eq.y_e)} "
          f"u_e={_fmt6(eq.u_e)} v_e={_fmt6(eq.v_e)}")


def _run_most_exploitative(params):
    pay = validate_payoff(*params["payoff"])
    x_e, y_e, u_e, v_e = most_exploitative(pay)
    print(f"{_fmt6(x_e)} {_fmt6(y_e)} {_fmt6(u_e)} {_fmt6(v_e)}")


def _run_trajectory(params):
    pay = validate_payoff(*params["payoff"])
    rec = integrate(pay, JointStrategy(*params["init"]),
                    _speeds_from(params), _config_from(params))
    manifest = iomod.RunManifest("trajectory", params,
                                 outputs=_planned_outputs(params))
    iomod.write_trajectory_csv(rec, params["output"], manifest)
    if not params.get("no_figure"):
        plotting.plot_trajectory(rec, _figure_path(params["output"]))
    if params.get("plot_script"):
        iomod.emit_plot_script(params["output"], "trajectory",
                               params["plot_script"])
    print(f"terminal={rec.terminal} case={rec.case_label} "
          f"t_end={_fmt6(rec.times[-1])} samples={rec.times.shape[0]} "
          f"-> {params['output']}")


def _run_fixed_points(params):
    pay = validate_payoff(*params["payoff"])
    speeds = LearningSpeeds(*params["speeds"])
    smap = stability_region(pay, params["grid_n"], speeds)
    manifest = iomod.RunManifest("fixed-points", params,
                                 outputs=_planned_outputs(params))
    iomod.write_stability_csv(smap, params["output"], manifest)
    if not params.get("no_figure"):
        plotting.plot_stability(smap, _figure_path(params["output"]))
    n_feas = int(smap.feasible.sum())
    n_osc = int(smap.oscillatory.sum())
    n_amb = sum(row.count("ambiguous") for row in smap.status)
    print(f"feasible={n_feas} stable={smap.n_stable} oscillatory={n_osc} "
          f"ambiguous={n_amb} -> {params['output']}")
    if params.get("probe"):
        if not pay.submodular:
            print("probe: skipped (no stable interior rest points without "
                  "submodular gains)")
            return
        x_e, y_e, _, _ = most_exploitative(pay)
        agree = dynamic_stability_probe(pay, x_e, y_e, speeds)
        print(f"probe: extreme point ({_fmt6(x_e)}, {_fmt6(y_e)}) "
              f"perturb-and-integrate stable={agree}")


def _run_basin(params):
    pay = validate_payoff(*params["payoff"])
    axis1 = GridAxis(**params["axis1"])
    axis2 = GridAxis(**params["axis2"])
    res = basin_map(pay, axis1, axis2, params["fixed"],
                    _speeds_from(params), _config_from(params),
                    threads=params.get("threads"))
    manifest = iomod.RunManifest("basin", params,
                                 outputs=_planned_outputs(params))
    iomod.write_sweep_csv(res, params["output"], manifest)
    if not params.get("no_figure"):
        plotting.plot_sweep(res, _figure_path(params["output"]))
    if params.get("plot_script"):
        iomod.emit_plot_script(params["output"], "basin", params["plot_script"])
    counts = Counter(res.terminal)
    summary = " ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    print(f"cells={res.n_cells} {summary} -> {params['output']}")


def _run_monotonicity(params):
    pay = validate_payoff(*params["payoff"])
    report = tft_monotonicity_check(
        pay, tuple(params["opponent"]), params["samples"],
        _speeds_from(params), _config_from(params),
        seed=params["seed"], perturbation=params["perturbation"])
    manifest = iomod.RunManifest("monotonicity", params,
                                 outputs=[params["output"]])
    iomod.write_monotonicity_json(report, params["output"], manifest)
    print(f"violations={report.n_violations}/{report.n_samples} "
          f"attempts={report.n_attempts} -> {params['output']}")


def _run_grid4d(params):
    pay = validate_payoff(*params["payoff"])
    res = grid4d_map(pay, params["grid_n"], _speeds_from(params),
                     _config_from(params), threads=params.get("threads"))
    manifest = iomod.RunManifest("grid4d", params,
                                 outputs=_planned_outputs(params))
    iomod.write_grid4d_csv(res, params["output"], manifest)
    if not params.get("no_figure"):
        plotting.plot_terminal_scatter(res, _figure_path(params["output"]))
    if params.get("plot_script"):
        iomod.emit_plot_script(params["output"], "scatter",
                               params["plot_script"])
    counts = Counter(res.terminal)
    summary = " ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    print(f"starts={res.init.shape[0]} {summary} -> {params['output']}")


_HANDLERS = {
    "equilibrium": _run_equilibrium,
    "most-exploitative": _run_most_exploitative,
    "trajectory": _run_trajectory,
    "fixed-points": _run_fixed_points,
    "basin": _run_basin,
    "monotonicity": _run_monotonicity,
    "grid4d": _run_grid4d,
}


def _params_from_args(args):
    cmd = args.command
    params = {"payoff": _floats(args.payoff, 4, "--payoff")}
    if cmd == "equilibrium":
        params["strategy"] = _floats(args.strategy, 4, "--strategy")
    elif cmd == "most-exploitative":
        pass
    elif cmd == "trajectory":
        params.update(_dynamics_params(args))
        params.update(init=_floats(args.init, 4, "--init"),
                      output=args.output, no_figure=args.no_figure,
                      plot_script=args.plot_script)
    elif cmd == "fixed-points":
        params.update(speeds=_floats(args.speeds, 4, "--speeds"),
                      grid_n=args.grid_n, probe=args.probe,
                      output=args.output, no_figure=args.no_figure)
    elif cmd == "basin":
        params.update(_dynamics_params(args))
        params.update(axis1=_parse_axis(args.axis1),
                      axis2=_parse_axis(args.axis2),
                      fixed=_parse_fixed(args.fixed),
                      threads=args.threads, output=args.output,
                      no_figure=args.no_figure, plot_script=args.plot_script)
    elif cmd == "monotonicity":
        params.update(_dynamics_params(args))
        params.update(opponent=_floats(args.opponent, 2, "--opponent"),
                      samples=args.samples, seed=args.seed,
                      perturbation=args.perturbation, output=args.output)
    elif cmd == "grid4d":
        params.update(_dynamics_params(args))
        params.update(grid_n=args.grid_n, threads=args.threads,
                      output=args.output, no_figure=args.no_figure,
                      plot_script=args.plot_script)
    return params


def _rebase(path, out_dir):
    return os.path.join(out_dir, os.path.basename(path))


def _replay(manifest_path, output_dir=None):
    man = iomod.RunManifest.read(manifest_path)
    if man.command not in _HANDLERS:
        raise ValidationError(
            f"manifest names unknown command {man.command!r}")
    params = dict(man.params)
    if output_dir:
        os.makedirs(output_dir, exist_ok=True)
        for key in ("output", "plot_script"):
            if params.get(key):
                params[key] = _rebase(params[key], output_dir)
    _HANDLERS[man.command](params)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.manifest:
            _replay(args.manifest, args.output_dir)
            return 0
        if not args.command:
            parser.error("a subcommand (or --manifest FILE) is required")
        _HANDLERS[args.command](_params_from_args(args))
        return 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IPDLearnError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
