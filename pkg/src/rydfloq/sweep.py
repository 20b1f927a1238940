"""Resonance location, trapping prediction, and the parameter sweep engine.

The sweep engine evaluates, on a rectangular 1D or 2D grid of drive
parameters, the one-period propagator, its Floquet decomposition, the inverse
participation ratio for requested initial states, per-mode basis characters,
and the dynamical-regime label.  Points are independent, evaluated in
deterministic order-insensitive batches, and assembled by grid index; 1D
sweeps additionally track branches by mode overlap so spectra plot as
continuous curves.

Serialization: one CSV row per grid point (axis values, quasi-energies in
tracked order, IPR per initial state, mode characters, optional overlay
columns, regime label) plus a JSON sidecar carrying the full parameter set,
integrator configuration, failures, and timings.  Numbers are written with 17
significant digits in scientific notation, locale-independent, so re-runs are
byte-identical.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bessel import bessel_zero_table
from .floquet import FloquetDecomposition, floquet_decompose, ipr, mode_character, track_modes
from .model import Basis, DriveParams, basis_for, state_from_token
from .observables import classify_regime
from .propagation import (
    FIXED_STEP,
    IntegratorConfig,
    StepSizeError,
    monodromy,
    monodromy_grid,
)

AXIS_NAMES = ("delta0", "alpha", "v0", "omega")

#: Environment variable consulted for the default sweep worker count.
THREADS_ENV_VAR = "RYDFLOQ_THREADS"

#: Numeric cell format: 17 significant digits, scientific notation.
FLOAT_FORMAT = "%.16e"

_MAX_POINTS = 10**7
_MAX_FAILURE_FRACTION = 0.01


# ---------------------------------------------------------------------------
# Resonances and trapping predictions


@dataclass(frozen=True)
class ResonanceHit:
    """A drive-induced resonance: kind R1/R2/R3, harmonic index, and the
    scanned-parameter value solving its condition."""

    kind: str
    index: int
    location: float
    residual: float


def _resonance_target(kind: str, delta0: float, v0: float) -> float:
    if kind == "R1":
        return delta0
    if kind == "R2":
        return delta0 - v0
    if kind == "R3":
        return 2.0 * delta0 - v0
    raise ValueError(f"unknown resonance kind {kind!r}")


def locate_resonances(
    params: DriveParams,
    scan: str,
    interval: tuple[float, float],
    max_index: int,
) -> list[ResonanceHit]:
    """All resonance solutions with |harmonic index| <= max_index in range.

    ``scan="delta0"`` solves the three conditions for the static detuning at
    fixed v0; ``scan="v0"`` solves for the interaction at fixed detuning and
    returns only R2/R3 hits (the single-atom condition R1 does not constrain
    the interaction: it would hold on the whole axis or nowhere).
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ValueError(f"invalid scan interval {interval}")
    if max_index < 0:
        raise ValueError("max_index must be >= 0")
    omega = params.omega
    hits: list[ResonanceHit] = []
    tol = 1e-12 * max(1.0, abs(hi), abs(lo))
    for n in range(-max_index, max_index + 1):
        if scan == "delta0":
            candidates = (
                ("R1", n * omega),
                ("R2", n * omega + params.v0),
                ("R3", 0.5 * (n * omega + params.v0)),
            )
            for kind, loc in candidates:
                if lo - tol <= loc <= hi + tol:
                    d0, v0 = loc, params.v0
                    residual = abs(n * omega - _resonance_target(kind, d0, v0))
                    hits.append(ResonanceHit(kind, n, float(loc), float(residual)))
        elif scan == "v0":
            candidates = (
                ("R2", params.delta0 - n * omega),
                ("R3", 2.0 * params.delta0 - n * omega),
            )
            for kind, loc in candidates:
                if lo - tol <= loc <= hi + tol:
                    residual = abs(n * omega - _resonance_target(kind, params.delta0, loc))
                    hits.append(ResonanceHit(kind, n, float(loc), float(residual)))
        else:
            raise ValueError(f"scan must be 'delta0' or 'v0', got {scan!r}")
    hits.sort(key=lambda h: (h.location, h.kind, h.index))
    return hits


@dataclass(frozen=True)
class TrappingPrediction:
    """Modulation indices at which a resonance's dynamics freezes."""

    kind: str
    index: int
    bessel_order: int
    alphas: tuple[float, ...]
    state: str
    reliable: bool


def predict_trapping(
    params: DriveParams, resonance: ResonanceHit, k_max: int
) -> TrappingPrediction:
    """Trapping values of alpha for a resonance the parameters satisfy.

    The governing Bessel order is the harmonic index: its zeros freeze gg for
    R1 and ee for R2.  For the two-photon family R3 only the primary case
    (index 0, governed by the zeroth order) is supported, and the prediction
    is flagged unreliable once v0/omega > 0.25, where the sharp minima wash
    out.
    """
    target = _resonance_target(resonance.kind, params.delta0, params.v0)
    if abs(resonance.index * params.omega - target) > 1e-9 * params.omega:
        raise ValueError(
            f"parameters do not satisfy {resonance.kind} with index {resonance.index}"
        )
    if resonance.kind == "R3" and resonance.index != 0:
        raise ValueError("only the primary (index 0) case of R3 is supported")
    order = 0 if resonance.kind == "R3" else resonance.index
    state = "ee" if resonance.kind == "R2" else "gg"
    reliable = not (resonance.kind == "R3" and params.v0 / params.omega > 0.25)
    zeros = bessel_zero_table(order, k_max).zeros
    return TrappingPrediction(
        kind=resonance.kind,
        index=resonance.index,
        bessel_order=abs(order),
        alphas=zeros,
        state=state,
        reliable=reliable,
    )


def find_local_minima(values: np.ndarray) -> np.ndarray:
    """Indices of interior local minima (strictly below the left neighbor,
    not above the right one)."""
    y = np.asarray(values, dtype=float)
    if y.size < 3:
        return np.array([], dtype=int)
    left = y[1:-1] < y[:-2]
    right = y[1:-1] <= y[2:]
    return np.nonzero(left & right)[0] + 1


# ---------------------------------------------------------------------------
# Sweep engine


@dataclass(frozen=True)
class SweepAxis:
    """One named, rectangular sweep axis."""

    name: str
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError(f"axis {self.name!r} needs at least 2 grid points")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"axis {self.name!r} contains non-finite values")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def linspace(cls, name: str, start: float, stop: float, count: int) -> "SweepAxis":
        return cls(name, np.linspace(start, stop, count))


@dataclass
class SweepResult:
    """Grid of per-point Floquet observables with provenance metadata."""

    axes: tuple[SweepAxis, ...]
    basis: Basis
    base: DriveParams
    initial_states: tuple[str, ...]
    char_labels: tuple[str, ...]
    quasi_energies: np.ndarray  # (points, dim), tracked order on 1D sweeps
    iprs: dict[str, np.ndarray]
    characters: dict[str, np.ndarray]
    regime: np.ndarray | None
    cfg: IntegratorConfig
    failures: tuple[tuple[int, str], ...] = ()
    extra_columns: dict[str, np.ndarray] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return tuple(axis.values.size for axis in self.axes)

    @property
    def n_points(self) -> int:
        return int(np.prod(self.grid_shape))

    @property
    def dim(self) -> int:
        return int(self.quasi_energies.shape[1])

    def axis_columns(self) -> dict[str, np.ndarray]:
        grids = np.meshgrid(*(axis.values for axis in self.axes), indexing="ij")
        return {axis.name: g.reshape(-1) for axis, g in zip(self.axes, grids)}

    def column_names(self) -> list[str]:
        cols = [axis.name for axis in self.axes]
        cols += [f"eps_{k + 1}" for k in range(self.dim)]
        cols += [f"ipr_{token}" for token in self.initial_states]
        for label in self.char_labels:
            cols += [f"char_{label}_{k + 1}" for k in range(self.dim)]
        cols += list(self.extra_columns)
        if self.regime is not None:
            cols.append("regime")
        return cols

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        axis_cols = self.axis_columns()
        numeric: list[np.ndarray] = list(axis_cols.values())
        numeric += [self.quasi_energies[:, k] for k in range(self.dim)]
        numeric += [self.iprs[token] for token in self.initial_states]
        for label in self.char_labels:
            numeric += [self.characters[label][:, k] for k in range(self.dim)]
        numeric += [np.asarray(col, dtype=float) for col in self.extra_columns.values()]
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(self.column_names()) + "\n")
            for i in range(self.n_points):
                cells = [FLOAT_FORMAT % col[i] for col in numeric]
                if self.regime is not None:
                    cells.append(str(self.regime[i]))
                fh.write(",".join(cells) + "\n")
        return path

    def sidecar_dict(self, command: str | None = None) -> dict:
        return {
            "format": "rydfloq-sweep",
            "version": __version__,
            "command": command,
            "params": self.base.as_dict(),
            "n_atoms": self.basis.n_atoms,
            "basis": self.basis.name,
            "axes": [
                {
                    "name": axis.name,
                    "start": float(axis.values[0]),
                    "stop": float(axis.values[-1]),
                    "count": int(axis.values.size),
                    "uniform": bool(
                        np.allclose(np.diff(axis.values), np.diff(axis.values)[0])
                    ),
                }
                for axis in self.axes
            ],
            "initial_states": list(self.initial_states),
            "char_labels": list(self.char_labels),
            "integrator": self.cfg.as_dict(),
            "columns": self.column_names(),
            "failures": [
                {"point": int(i), "message": msg} for i, msg in self.failures
            ],
            "timings": self.timings,
            "notes": self.notes,
            "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }

    def write(self, csv_path: str | Path, command: str | None = None,
              sidecar_extra: dict | None = None) -> tuple[Path, Path]:
        csv_path = Path(csv_path)
        self.to_csv(csv_path)
        meta = self.sidecar_dict(command)
        if sidecar_extra:
            meta.update(sidecar_extra)
        sidecar_path = csv_path.with_suffix(".json")
        with open(sidecar_path, "w", newline="\n") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return csv_path, sidecar_path


def write_timeseries_csv(
    series,
    path: str | Path,
    command: str | None = None,
    sidecar_extra: dict | None = None,
) -> tuple[Path, Path]:
    """Write a trajectory CSV (time, populations, norm, optional entropy) plus
    its JSON sidecar, in the same fixed numeric format as sweep CSVs."""
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(series.column_names()) + "\n")
        for row in series.rows():
            fh.write(",".join(FLOAT_FORMAT % x for x in row) + "\n")
    meta = {
        "format": "rydfloq-timeseries",
        "version": __version__,
        "command": command,
        "params": series.params.as_dict(),
        "n_atoms": series.basis.n_atoms,
        "basis": series.basis.name,
        "frame": series.frame,
        "columns": series.column_names(),
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if sidecar_extra:
        meta.update(sidecar_extra)
    sidecar_path = path.with_suffix(".json")
    with open(sidecar_path, "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path, sidecar_path


def default_thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _grid_params(base: DriveParams, axes: tuple[SweepAxis, ...]):
    """Flattened per-point parameter arrays (row-major over the axes)."""
    grids = np.meshgrid(*(axis.values for axis in axes), indexing="ij")
    table = {axis.name: g.reshape(-1) for axis, g in zip(axes, grids)}
    n = grids[0].size
    omega = table.get("omega", np.full(n, base.omega))
    delta0 = table.get("delta0", np.full(n, base.delta0))
    v0 = table.get("v0", np.full(n, base.v0))
    if "alpha" in table:
        # Alpha sweeps vary the modulation amplitude at fixed frequency.
        delta_mod = table["alpha"] * omega
    else:
        delta_mod = np.full(n, base.delta_mod)
    rabi = np.full(n, base.rabi)
    return rabi, delta0, delta_mod, v0, omega


def _point_params(base: DriveParams, arrays, i: int) -> DriveParams:
    rabi, delta0, delta_mod, v0, omega = arrays
    return base.replace(
        rabi=float(rabi[i]),
        delta0=float(delta0[i]),
        delta_mod=float(delta_mod[i]),
        v0=float(v0[i]),
        omega=float(omega[i]),
    )


def _monodromies(arrays, basis: Basis, cfg: IntegratorConfig, threads: int,
                 base: DriveParams):
    """Per-point one-period propagators plus a list of (index, message) failures."""
    rabi, delta0, delta_mod, v0, omega = arrays
    n = rabi.size
    d = basis.dim
    symmetric = basis.name == "two-atom-symmetric"
    failures: list[tuple[int, str]] = []
    if cfg.method == FIXED_STEP:
        # Resolve the step count against the longest period on the grid.
        steps = cfg.steps_per_period(2.0 * math.pi / float(np.min(omega)))
        n_chunks = max(threads, math.ceil(n / 4096))
        chunks = np.array_split(np.arange(n), min(n_chunks, n))

        def work(idx: np.ndarray) -> np.ndarray:
            return monodromy_grid(
                rabi[idx], delta0[idx], delta_mod[idx], v0[idx], omega[idx],
                basis.n_atoms, symmetric, steps,
            )

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(work, chunks))
        else:
            parts = [work(idx) for idx in chunks]
        return np.concatenate(parts, axis=0), failures
    # Adaptive method, point by point; failures recorded in place.
    out = np.empty((n, d, d), dtype=complex)
    for i in range(n):
        try:
            out[i] = monodromy(_point_params(base, arrays, i), basis.n_atoms, cfg, symmetric).matrix
        except (StepSizeError, ValueError) as exc:
            out[i] = np.nan
            failures.append((i, str(exc)))
    return out, failures


def run_sweep(
    base: DriveParams,
    axes: list[SweepAxis] | tuple[SweepAxis, ...],
    n_atoms: int = 2,
    initial_states: tuple[str, ...] = ("gg", "ee"),
    char_labels: tuple[str, ...] = (),
    symmetric: bool = False,
    cfg: IntegratorConfig | None = None,
    threads: int | None = None,
) -> SweepResult:
    """Floquet observables over a rectangular 1D or 2D parameter grid.

    For every grid point the lab-frame one-period propagator is decomposed
    into quasi-energies and modes; the IPR is evaluated for each requested
    initial state and the mode characters for each requested label.  On 1D
    sweeps branches are tracked by maximum overlap along the axis; 2D maps
    report folded quasi-energies in ascending order.  The regime label is
    attached when both gg and ee IPRs are available.

    Per-point integrator failures are recorded in place (NaN rows) without
    aborting; the sweep itself fails only if more than 1% of points fail.
    """
    axes = tuple(axes)
    if len(axes) not in (1, 2):
        raise ValueError("run_sweep takes 1 or 2 axes")
    names = [axis.name for axis in axes]
    if len(set(names)) != len(names):
        raise ValueError("axis names must be distinct")
    n_points = int(np.prod([axis.values.size for axis in axes]))
    if n_points > _MAX_POINTS:
        raise ValueError(f"grid has {n_points} points, above the {_MAX_POINTS} cap")
    basis = basis_for(n_atoms, symmetric)
    d = basis.dim
    state_vectors = {
        token: state_from_token(token, basis).amplitudes for token in initial_states
    }
    for label in char_labels:
        basis.index(label)  # validates
    cfg = cfg or IntegratorConfig(method=FIXED_STEP)
    threads = default_thread_count() if threads is None else max(1, int(threads))

    t_start = time.perf_counter()
    arrays = _grid_params(base, axes)
    mats, failures = _monodromies(arrays, basis, cfg, threads, base)
    t_monodromy = time.perf_counter()

    failed = {i for i, _ in failures}
    if len(failed) > _MAX_FAILURE_FRACTION * n_points:
        raise RuntimeError(
            f"{len(failed)} of {n_points} sweep points failed (> 1%); first: "
            f"{failures[0][1]}"
        )

    eps = np.full((n_points, d), np.nan)
    iprs = {token: np.full(n_points, np.nan) for token in initial_states}
    chars = {label: np.full((n_points, d), np.nan) for label in char_labels}
    omega_col = arrays[4]

    track = len(axes) == 1
    prev_dec: FloquetDecomposition | None = None
    order = np.arange(d)
    for i in range(n_points):
        if i in failed:
            prev_dec = None
            order = np.arange(d)
            continue
        dec = floquet_decompose(mats[i], float(omega_col[i]))
        if track:
            if prev_dec is not None:
                perm = track_modes(prev_dec, dec)
                order = perm[order]
            prev_dec = dec
            eps[i] = dec.quasi_energies[order]
        else:
            eps[i] = dec.quasi_energies
        for token, vec in state_vectors.items():
            iprs[token][i] = ipr(vec, dec)
        for label in char_labels:
            values = mode_character(dec, label)
            chars[label][i] = values[order] if track else values
    t_floquet = time.perf_counter()

    regime = None
    if "gg" in iprs and "ee" in iprs:
        regime = np.array(
            [
                classify_regime(
                    float(np.clip(iprs["gg"][i], 0.0, 3.0)),
                    float(np.clip(iprs["ee"][i], 0.0, 3.0)),
                ).value
                if i not in failed
                else "failed"
                for i in range(n_points)
            ],
            dtype=object,
        )

    return SweepResult(
        axes=axes,
        basis=basis,
        base=base,
        initial_states=tuple(initial_states),
        char_labels=tuple(char_labels),
        quasi_energies=eps,
        iprs=iprs,
        characters=chars,
        regime=regime,
        cfg=cfg,
        failures=tuple(failures),
        timings={
            "monodromy_s": t_monodromy - t_start,
            "floquet_s": t_floquet - t_monodromy,
            "total_s": time.perf_counter() - t_start,
        },
    )
