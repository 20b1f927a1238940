"""Scalar diagnostics: populations, entanglement entropy, regime classifier."""

from __future__ import annotations

import enum

import numpy as np

from .model import BASIS_PAIR, StateVector, TimeSeries


class RegimeLabel(str, enum.Enum):
    """Dynamical regime read off the pair of IPR values for gg and ee."""

    FREEZING = "freezing"
    BLOCKADE = "blockade"
    ANTI_BLOCKADE = "anti_blockade"
    MIXED = "mixed"


#: Fixed classification thresholds; chosen to reproduce the labeled regions of
#: the interaction/modulation regime map at the workhorse drive frequency.
FREEZING_MAX = 0.1
BLOCKADE_BAND = 0.25
ANTI_BLOCKADE_MIN = 1.75


def populations(state: StateVector) -> np.ndarray:
    """Squared amplitudes per basis label; sums to 1 within 1e-10."""
    return np.abs(state.amplitudes) ** 2


def entanglement_entropy(state: StateVector | np.ndarray) -> float:
    """Von Neumann entropy (base 2) of one atom's reduced density matrix.

    Defined for pure two-atom states in the full basis; ranges from 0 for
    product states to 1 for maximally entangled ones.  Eigenvalues of the
    reduced matrix are clamped to [0, 1] before the logarithm so that
    roundoff-scale negatives cannot produce NaN.
    """
    if isinstance(state, StateVector):
        if state.basis is not BASIS_PAIR:
            raise ValueError("entropy requires the full two-atom basis")
        amp = state.amplitudes
    else:
        amp = np.asarray(state, dtype=complex).reshape(-1)
        if amp.shape != (4,):
            raise ValueError("entropy requires a 4-component two-atom state")
    m = amp.reshape(2, 2)  # rows: atom A, columns: atom B
    rho_a = m @ m.conj().T
    lam = np.clip(np.linalg.eigvalsh(rho_a).real, 0.0, 1.0)
    nonzero = lam[lam > 0.0]
    return float(-(nonzero * np.log2(nonzero)).sum())


def entropy_series(amplitudes: np.ndarray) -> np.ndarray:
    """Entanglement entropy for each row of an (n_times, 4) amplitude array."""
    amps = np.asarray(amplitudes, dtype=complex)
    m = amps.reshape(-1, 2, 2)
    rho = m @ np.conj(np.swapaxes(m, -1, -2))
    # Normalize per sample: propagated states may carry ~1e-10 norm drift.
    tr = np.trace(rho, axis1=-2, axis2=-1).real
    lam = np.clip(np.linalg.eigvalsh(rho).real / tr[:, None], 0.0, 1.0)
    safe = np.where(lam > 0.0, lam, 1.0)
    return -(safe * np.log2(safe)).sum(axis=1)


def classify_regime(pi_gg: float, pi_ee: float) -> RegimeLabel:
    """Classify a grid point from its gg and ee inverse participation ratios.

    freezing when the gg channel is a single Floquet mode (pi_gg <= 0.1);
    blockade when gg participates in two modes while ee stays frozen
    (|pi_gg - 1| <= 0.25 and pi_ee <= 0.1); anti-blockade when gg spreads over
    three (pi_gg >= 1.75); mixed otherwise.
    """
    for name, value in (("pi_gg", pi_gg), ("pi_ee", pi_ee)):
        if not (-1e-9 <= value <= 3.0 + 1e-9):
            raise ValueError(f"{name} = {value} outside [0, 3]")
    if pi_gg <= FREEZING_MAX:
        return RegimeLabel.FREEZING
    if abs(pi_gg - 1.0) <= BLOCKADE_BAND and pi_ee <= FREEZING_MAX:
        return RegimeLabel.BLOCKADE
    if pi_gg >= ANTI_BLOCKADE_MIN:
        return RegimeLabel.ANTI_BLOCKADE
    return RegimeLabel.MIXED


def trapping_score(series: TimeSeries, label: str) -> float:
    """Worst-case retention of a label's population over the sampled window.

    1.0 means perfectly trapped.  The window must span at least 10 drive
    periods for the score to be meaningful; shorter series are rejected.
    """
    span = float(series.times[-1] - series.times[0])
    if span < 10.0 * series.params.period:
        raise ValueError(
            f"series spans {span:.3g}, need >= 10 drive periods "
            f"({10.0 * series.params.period:.3g})"
        )
    return float(series.population(label).min())
