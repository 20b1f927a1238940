"""Shared vocabulary types: drive parameters, bases, states, operators, time series.

Conventions used throughout the package:

* Energies are expressed in units of the Rabi frequency and times in its
  inverse.  The Rabi frequency itself is stored explicitly so that unit
  rescaling can be exercised in tests.
* Basis ordering is fixed: ``(g, e)`` for one atom, ``(gg, ge, eg, ee)`` for
  two (first letter = atom 1, Kronecker order), and ``(gg, plus, ee)`` for the
  swap-symmetric subspace, with ``plus = (|eg> + |ge>)/sqrt(2)``.
* All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

TWO_PI = 2.0 * math.pi

#: Tolerance on the norm of a state vector at construction time.
NORM_TOL = 1e-9

#: Entrywise tolerance for Hermiticity of constructed Hamiltonians.
HERMITICITY_TOL = 1e-12

#: Max-norm tolerance for unitarity of propagators.
UNITARITY_TOL = 1e-9


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DriveParams:
    """Physical parameters of the driven system, in Rabi-frequency units.

    The detuning is modulated sinusoidally,
    ``detuning(t) = delta0 + delta_mod * sin(omega * t)``, and the two
    excited atoms shift each other by the van der Waals energy ``v0``.

    Attributes
    ----------
    rabi : float
        Rabi coupling strength, the nominal energy unit.  Zero is accepted
        so undriven-coupling limits can be exercised directly.
    delta0 : float
        Static detuning, in units of ``rabi``.
    delta_mod : float
        Modulation amplitude of the detuning (>= 0).
    omega : float
        Modulation frequency (> 0).
    v0 : float
        Van der Waals shift of the doubly excited state (>= 0).
    """

    rabi: float = 1.0
    delta0: float = 0.0
    delta_mod: float = 0.0
    omega: float = 8.0
    v0: float = 0.0

    def __post_init__(self) -> None:
        for name in ("rabi", "delta0", "delta_mod", "omega", "v0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.rabi < 0:
            raise ValueError(f"rabi must be >= 0, got {self.rabi}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.delta_mod < 0:
            raise ValueError(f"delta_mod must be >= 0, got {self.delta_mod}")
        if self.v0 < 0:
            raise ValueError(f"v0 must be >= 0, got {self.v0}")
        # Derived quantities must themselves be finite and in range.
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError("modulation index delta_mod/omega out of range")
        if not math.isfinite(self.period) or self.period <= 0:
            raise ValueError("drive period 2*pi/omega out of range")

    @property
    def alpha(self) -> float:
        """Modulation index ``delta_mod / omega``."""
        return self.delta_mod / self.omega

    @property
    def period(self) -> float:
        """Drive period ``2*pi / omega``."""
        return TWO_PI / self.omega

    def replace(self, **changes) -> "DriveParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "rabi": self.rabi,
            "delta0": self.delta0,
            "delta_mod": self.delta_mod,
            "omega": self.omega,
            "v0": self.v0,
        }


def detuning_at(params: DriveParams, t) -> float | np.ndarray:
    """Instantaneous detuning ``delta0 + delta_mod * sin(omega * t)``."""
    return params.delta0 + params.delta_mod * np.sin(params.omega * np.asarray(t))


@dataclass(frozen=True)
class Basis:
    """A labeled computational basis."""

    name: str
    labels: tuple[str, ...]
    n_atoms: int

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"label {label!r} not in basis {self.name}") from None


BASIS_ATOM = Basis("single-atom", ("g", "e"), 1)
BASIS_PAIR = Basis("two-atom", ("gg", "ge", "eg", "ee"), 2)
BASIS_PAIR_SYM = Basis("two-atom-symmetric", ("gg", "plus", "ee"), 2)


def basis_for(n_atoms: int, symmetric: bool = False) -> Basis:
    if n_atoms == 1:
        return BASIS_ATOM
    if n_atoms == 2:
        return BASIS_PAIR_SYM if symmetric else BASIS_PAIR
    raise ValueError(f"n_atoms must be 1 or 2, got {n_atoms}")


# Rows are <gg|, <plus|, <ee| expressed in the (gg, ge, eg, ee) basis.
_SQ2 = 1.0 / math.sqrt(2.0)
SYMMETRIC_PROJECTION = _as_readonly(
    np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, _SQ2, _SQ2, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        dtype=complex,
    )
)

#: The antisymmetric state (|eg> - |ge>)/sqrt(2) in the full two-atom basis.
ANTISYMMETRIC_STATE = _as_readonly(np.array([0.0, -_SQ2, _SQ2, 0.0], dtype=complex))


@dataclass(frozen=True)
class StateVector:
    """Unit-norm complex amplitudes over a labeled basis."""

    amplitudes: np.ndarray
    basis: Basis

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.shape != (self.basis.dim,):
            raise ValueError(
                f"expected {self.basis.dim} amplitudes for basis "
                f"{self.basis.name}, got {amp.shape}"
            )
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "amplitudes", _as_readonly(amp))

    @property
    def dim(self) -> int:
        return self.basis.dim

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[self.basis.index(label)])


#: Initial-state tokens accepted by the CLI and the sweep engine, per basis.
STATE_TOKENS = {
    BASIS_ATOM.name: ("g", "e"),
    BASIS_PAIR.name: ("gg", "ge", "eg", "ee", "plus", "bell"),
    BASIS_PAIR_SYM.name: ("gg", "plus", "ee", "bell"),
}


def state_from_token(token: str, basis: Basis) -> StateVector:
    """Build a named initial state.

    ``plus`` is the symmetric Bell state (|eg>+|ge>)/sqrt(2) and ``bell`` is
    (|gg>+|ee>)/sqrt(2); both exist in the full and symmetric two-atom bases.
    """
    amp = np.zeros(basis.dim, dtype=complex)
    if token in basis.labels:
        amp[basis.index(token)] = 1.0
    elif token == "plus" and basis is BASIS_PAIR:
        amp[1] = amp[2] = _SQ2
    elif token == "bell" and basis is BASIS_PAIR:
        amp[0] = amp[3] = _SQ2
    elif token == "bell" and basis is BASIS_PAIR_SYM:
        amp[0] = amp[2] = _SQ2
    else:
        raise ValueError(f"unknown state token {token!r} for basis {basis.name}")
    return StateVector(amp, basis)


def basis_transform_full_to_symmetric(state: StateVector) -> tuple[StateVector, float]:
    """Project a full two-atom state onto the symmetric subspace.

    Returns the renormalized projection in the (gg, plus, ee) basis together
    with the leakage, i.e. the squared amplitude on the antisymmetric state.
    Fails when the input has no symmetric content (leakage > 1 - 1e-12).
    """
    if state.basis is not BASIS_PAIR:
        raise ValueError("expected a state in the full two-atom basis")
    projected = SYMMETRIC_PROJECTION @ state.amplitudes
    weight = float(np.vdot(projected, projected).real)
    leakage = float(abs(np.vdot(ANTISYMMETRIC_STATE, state.amplitudes)) ** 2)
    if leakage > 1.0 - 1e-12:
        raise ValueError(f"state is entirely antisymmetric (leakage {leakage})")
    return StateVector(projected / math.sqrt(weight), BASIS_PAIR_SYM), leakage


def basis_transform_symmetric_to_full(state: StateVector) -> StateVector:
    """Embed a symmetric-subspace state back into the full two-atom basis."""
    if state.basis is not BASIS_PAIR_SYM:
        raise ValueError("expected a state in the symmetric two-atom basis")
    return StateVector(SYMMETRIC_PROJECTION.conj().T @ state.amplitudes, BASIS_PAIR)


def project_operator_to_symmetric(matrix: np.ndarray) -> np.ndarray:
    """Compress a swap-symmetric 4x4 operator to its 3x3 symmetric block."""
    m = np.asarray(matrix)
    if m.shape[-2:] != (4, 4):
        raise ValueError(f"expected a (...,4,4) operator, got shape {m.shape}")
    return SYMMETRIC_PROJECTION @ m @ SYMMETRIC_PROJECTION.conj().T


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense complex square matrix over a labeled basis."""

    matrix: np.ndarray
    basis: Basis

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        d = self.basis.dim
        if m.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", _as_readonly(m))

    @property
    def dim(self) -> int:
        return self.basis.dim

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def unitarity_defect(self) -> float:
        d = self.matrix.conj().T @ self.matrix - np.eye(self.dim)
        return float(np.max(np.abs(d)))

    def require_hermitian(self, tol: float = HERMITICITY_TOL) -> "OperatorMatrix":
        defect = self.hermiticity_defect()
        if defect > tol:
            raise ValueError(f"operator is not Hermitian (defect {defect:.3e} > {tol:.1e})")
        return self

    def require_unitary(self, tol: float = UNITARITY_TOL) -> "OperatorMatrix":
        defect = self.unitarity_defect()
        if defect > tol:
            raise ValueError(f"operator is not unitary (defect {defect:.3e} > {tol:.1e})")
        return self


@dataclass(frozen=True)
class TimeSeries:
    """Sampled trajectory: populations per basis label, norm, optional entropy.

    Times are in units of the inverse Rabi frequency and strictly increasing;
    populations are taken from the raw (un-renormalized) propagated state, so
    their sum tracks the squared norm and doubles as an accuracy monitor.
    """

    times: np.ndarray
    populations: np.ndarray  # shape (n_times, basis.dim)
    norm: np.ndarray
    basis: Basis
    params: DriveParams
    frame: str
    entropy: np.ndarray | None = None

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.populations, dtype=float)
        n = np.asarray(self.norm, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if p.shape != (t.size, self.basis.dim):
            raise ValueError("populations shape does not match times/basis")
        if n.shape != t.shape:
            raise ValueError("norm shape does not match times")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-8:
            raise ValueError("per-time populations do not sum to 1 within 1e-8")
        object.__setattr__(self, "times", _as_readonly(t))
        object.__setattr__(self, "populations", _as_readonly(p))
        object.__setattr__(self, "norm", _as_readonly(n))
        if self.entropy is not None:
            s = np.asarray(self.entropy, dtype=float)
            if s.shape != t.shape:
                raise ValueError("entropy shape does not match times")
            object.__setattr__(self, "entropy", _as_readonly(s))

    @property
    def n_times(self) -> int:
        return int(self.times.size)

    def population(self, label: str) -> np.ndarray:
        return self.populations[:, self.basis.index(label)]

    def column_names(self) -> list[str]:
        cols = ["time"] + [f"pop_{label}" for label in self.basis.labels] + ["norm"]
        if self.entropy is not None:
            cols.append("entropy")
        return cols

    def rows(self) -> Iterable[tuple[float, ...]]:
        for i in range(self.n_times):
            row = [self.times[i], *self.populations[i], self.norm[i]]
            if self.entropy is not None:
                row.append(self.entropy[i])
            yield tuple(row)
