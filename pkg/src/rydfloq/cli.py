"""Command-line interface: dynamics, Floquet sweeps, IPR maps, resonance
atlases, entropy dynamics, and figure-data generation.

All energies are in units of the Rabi coupling and all times in its inverse
(rescale with --rabi for laboratory units).  Every run writes a CSV plus a
JSON sidecar; identical invocations produce byte-identical CSV (timestamps
live only in the sidecar).  Exit codes: 0 success, 2 usage error, 3 numerical
failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .figures import FIGURES, build_figure
from .model import (
    STATE_TOKENS,
    DriveParams,
    basis_for,
    state_from_token,
)
from .propagation import ADAPTIVE, FIXED_STEP, IntegratorConfig, StepSizeError, propagate
from .sweep import (
    FLOAT_FORMAT,
    SweepAxis,
    locate_resonances,
    run_sweep,
    write_timeseries_csv,
)

_STATE_CHOICES = ("g", "e", "gg", "ge", "eg", "ee", "plus", "bell")


def _axis_spec(text: str) -> SweepAxis:
    """Parse 'name=start:stop:count' into a sweep axis."""
    try:
        name, rest = text.split("=", 1)
        start, stop, count = rest.split(":")
        return SweepAxis.linspace(name.strip(), float(start), float(stop), int(count))
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(
            f"invalid axis {text!r}; expected name=start:stop:count "
            f"with name in delta0|alpha|v0|omega"
        ) from exc


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rabi", type=float, default=1.0,
                   help="Rabi coupling, the energy unit (default 1)")
    p.add_argument("--delta0", type=float, default=0.0,
                   help="static detuning, units of the Rabi coupling (default 0)")
    p.add_argument("--delta", type=float, default=15.0,
                   help="detuning modulation amplitude, units of the Rabi coupling (default 15)")
    p.add_argument("--alpha", type=float, default=None,
                   help="modulation index delta/omega; overrides --delta when given")
    p.add_argument("--omega", type=float, default=8.0,
                   help="modulation frequency, units of the Rabi coupling (default 8)")
    p.add_argument("--v0", type=float, default=0.0,
                   help="van der Waals shift of the doubly excited state (default 0)")
    p.add_argument("--n", type=int, choices=(1, 2), default=2,
                   help="number of atoms (default 2)")
    p.add_argument("--basis", choices=("full", "symmetric"), default="full",
                   help="two-atom basis: full 4-state or symmetric 3-state (default full)")


def _add_integrator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=(ADAPTIVE, FIXED_STEP), default=None,
                   help="integrator (default: adaptive for trajectories, fixed-step for sweeps)")
    p.add_argument("--rel-tol", type=float, default=1e-10, help="relative tolerance")
    p.add_argument("--abs-tol", type=float, default=1e-12, help="absolute tolerance")
    p.add_argument("--max-step", type=float, default=None,
                   help="max integrator step, units of inverse Rabi coupling (default period/200)")
    p.add_argument("--threads", type=int, default=None,
                   help="sweep worker threads (default: RYDFLOQ_THREADS or 1)")


def _params_from(args) -> DriveParams:
    delta_mod = args.delta if args.alpha is None else args.alpha * args.omega
    return DriveParams(rabi=args.rabi, delta0=args.delta0, delta_mod=delta_mod,
                       omega=args.omega, v0=args.v0)


def _cfg_from(args, default_method: str) -> IntegratorConfig:
    return IntegratorConfig(
        method=args.method or default_method,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        max_step=args.max_step,
    )


def _resolved_args(args, keys: list[str]) -> dict:
    return {k: getattr(args, k.replace("-", "_")) for k in keys}


def _validate_state(token: str, basis) -> None:
    if token not in STATE_TOKENS[basis.name]:
        print(
            f"state {token!r} is not defined in the {basis.name} basis "
            f"(valid: {', '.join(STATE_TOKENS[basis.name])})",
            file=sys.stderr,
        )
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydfloq",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("dynamics", help="propagate one trajectory and write populations over time")
    _add_param_flags(p)
    _add_integrator_flags(p)
    p.add_argument("--initial", choices=_STATE_CHOICES, default="gg",
                   help="initial state token (default gg)")
    p.add_argument("--frame", choices=("lab", "rotating", "effective"), default="lab")
    p.add_argument("--tmax", type=float, default=20.0,
                   help="final time, units of inverse Rabi coupling (default 20)")
    p.add_argument("--sample-every", type=float, default=0.02,
                   help="output cadence (default 0.02)")
    p.add_argument("--entropy", action="store_true",
                   help="add the entanglement-entropy column (two atoms, full basis)")
    p.add_argument("--output", "-o", type=Path, default=Path("dynamics.csv"))

    p = sub.add_parser("entropy", help="propagate a two-atom trajectory with the entropy column")
    _add_param_flags(p)
    _add_integrator_flags(p)
    p.add_argument("--initial", choices=("gg", "ge", "eg", "ee", "plus", "bell"), default="plus")
    p.add_argument("--tmax", type=float, default=40.0)
    p.add_argument("--sample-every", type=float, default=0.02)
    p.add_argument("--output", "-o", type=Path, default=Path("entropy.csv"))

    p = sub.add_parser("floquet", help="1D sweep of quasi-energies, IPR, and mode characters")
    _add_param_flags(p)
    _add_integrator_flags(p)
    p.add_argument("--axis", type=_axis_spec, required=True,
                   help="sweep axis, name=start:stop:count (name: delta0|alpha|v0|omega)")
    p.add_argument("--states", default="gg,ee",
                   help="comma-separated initial states for the IPR columns")
    p.add_argument("--chars", default="",
                   help="comma-separated basis labels for mode-character columns")
    p.add_argument("--output", "-o", type=Path, default=Path("floquet.csv"))

    p = sub.add_parser("ipr-map", help="2D sweep of IPR and regime labels")
    _add_param_flags(p)
    _add_integrator_flags(p)
    p.add_argument("--axis", type=_axis_spec, action="append", required=True,
                   help="sweep axis (give twice for a 2D grid)")
    p.add_argument("--states", default="gg,ee")
    p.add_argument("--chars", default="")
    p.add_argument("--output", "-o", type=Path, default=Path("ipr-map.csv"))

    p = sub.add_parser("resonances", help="locate drive-induced resonances analytically")
    _add_param_flags(p)
    p.add_argument("--scan", choices=("delta0", "v0"), default="delta0")
    p.add_argument("--range", dest="scan_range", default="0:20",
                   help="scan interval start:stop (default 0:20)")
    p.add_argument("--max-index", type=int, default=3,
                   help="largest |harmonic index| to report (default 3)")
    p.add_argument("--output", "-o", type=Path, default=Path("resonances.csv"))

    p = sub.add_parser("figure", help="emit the CSV data behind one bundled reference panel")
    p.add_argument("figure_id", choices=sorted(FIGURES), metavar="figure_id",
                   help=f"one of: {', '.join(sorted(FIGURES))}")
    _add_param_flags(p)
    _add_integrator_flags(p)
    p.add_argument("--output", "-o", type=Path, default=None,
                   help="output CSV path (default figure-<id>.csv)")
    return parser


def _cmd_dynamics(args) -> int:
    params = _params_from(args)
    basis = basis_for(args.n, symmetric=args.basis == "symmetric")
    _validate_state(args.initial, basis)
    if args.entropy and basis.name != "two-atom":
        print("entropy requires --n 2 --basis full", file=sys.stderr)
        return 2
    series = propagate(
        state_from_token(args.initial, basis), params, frame=args.frame,
        t_final=args.tmax, sample_every=args.sample_every,
        cfg=_cfg_from(args, ADAPTIVE), with_entropy=args.entropy,
    )
    write_timeseries_csv(series, args.output, command="dynamics", sidecar_extra={
        "initial_state": args.initial,
        "resolved_args": _resolved_args(args, [
            "rabi", "delta0", "delta", "alpha", "omega", "v0", "n", "basis",
            "initial", "frame", "tmax", "sample_every", "entropy",
        ]),
    })
    return 0


def _cmd_entropy(args) -> int:
    params = _params_from(args)
    basis = basis_for(2)
    _validate_state(args.initial, basis)
    series = propagate(
        state_from_token(args.initial, basis), params,
        t_final=args.tmax, sample_every=args.sample_every,
        cfg=_cfg_from(args, ADAPTIVE), with_entropy=True,
    )
    write_timeseries_csv(series, args.output, command="entropy", sidecar_extra={
        "initial_state": args.initial,
        "resolved_args": _resolved_args(args, [
            "rabi", "delta0", "delta", "alpha", "omega", "v0",
            "initial", "tmax", "sample_every",
        ]),
    })
    return 0


def _cmd_sweep(args, two_d: bool) -> int:
    params = _params_from(args)
    axes = args.axis if isinstance(args.axis, list) else [args.axis]
    states = tuple(s for s in args.states.split(",") if s)
    chars = tuple(c for c in args.chars.split(",") if c)
    basis = basis_for(args.n, symmetric=args.basis == "symmetric")
    for token in states:
        _validate_state(token, basis)
    result = run_sweep(
        params, axes, n_atoms=args.n, initial_states=states, char_labels=chars,
        symmetric=args.basis == "symmetric",
        cfg=_cfg_from(args, FIXED_STEP), threads=args.threads,
    )
    result.write(args.output, command="ipr-map" if two_d else "floquet", sidecar_extra={
        "resolved_args": _resolved_args(args, [
            "rabi", "delta0", "delta", "alpha", "omega", "v0", "n", "basis",
            "states", "chars",
        ]),
    })
    return 0


def _cmd_resonances(args) -> int:
    params = _params_from(args)
    lo, hi = (float(x) for x in args.scan_range.split(":"))
    hits = locate_resonances(params, args.scan, (lo, hi), args.max_index)
    from . import __version__

    with open(args.output, "w", newline="\n") as fh:
        fh.write("kind,index,location,residual\n")
        for h in hits:
            fh.write(f"{h.kind},{h.index},{FLOAT_FORMAT % h.location},{FLOAT_FORMAT % h.residual}\n")
    with open(args.output.with_suffix(".json"), "w", newline="\n") as fh:
        json.dump({
            "format": "rydfloq-resonances",
            "version": __version__,
            "command": "resonances",
            "params": params.as_dict(),
            "scan": args.scan,
            "range": [lo, hi],
            "max_index": args.max_index,
            "columns": ["kind", "index", "location", "residual"],
            "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


_FLAG_DEFAULTS = {
    "rabi": 1.0, "delta0": 0.0, "delta": 15.0, "alpha": None, "omega": 8.0, "v0": 0.0,
}


def _cmd_figure(args) -> int:
    out = args.output or Path(f"figure-{args.figure_id}.csv")
    # Only flags the user moved off their defaults override the panel binding.
    overrides = {}
    for key, default in _FLAG_DEFAULTS.items():
        value = getattr(args, key)
        if value != default:
            overrides["delta_mod" if key == "delta" else key] = value
    cfg = None
    if args.method or args.max_step or args.rel_tol != 1e-10 or args.abs_tol != 1e-12:
        cfg = _cfg_from(args, FIXED_STEP)
    files = build_figure(args.figure_id, out, cfg=cfg, threads=args.threads, **overrides)
    for f in files:
        print(f)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "dynamics":
            return _cmd_dynamics(args)
        if args.subcommand == "entropy":
            return _cmd_entropy(args)
        if args.subcommand == "floquet":
            return _cmd_sweep(args, two_d=False)
        if args.subcommand == "ipr-map":
            return _cmd_sweep(args, two_d=True)
        if args.subcommand == "resonances":
            return _cmd_resonances(args)
        if args.subcommand == "figure":
            return _cmd_figure(args)
        parser.error(f"unknown subcommand {args.subcommand!r}")
    except StepSizeError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"invalid request: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
