"""Floquet spectra, population trapping, and entanglement dynamics of one and
two periodically driven Rydberg atoms."""

__version__ = "0.1.0"

from .model import (
    BASIS_ATOM,
    BASIS_PAIR,
    BASIS_PAIR_SYM,
    Basis,
    DriveParams,
    OperatorMatrix,
    StateVector,
    TimeSeries,
    basis_for,
    basis_transform_full_to_symmetric,
    basis_transform_symmetric_to_full,
    detuning_at,
    state_from_token,
)
from .bessel import BesselZeroTable, bessel_j, bessel_zero, bessel_zero_table
from .hamiltonians import (
    EffectiveCoefficients,
    coupling_envelope_averages,
    coupling_envelopes,
    effective_coefficients,
    effective_hamiltonian,
    effective_hamiltonian_small_delta,
    effective_hamiltonian_small_v0,
    frame_unitary,
    lab_hamiltonian,
    rotating_hamiltonian,
)
from .propagation import (
    IntegratorConfig,
    StepSizeError,
    monodromy,
    propagate,
    propagate_amplitudes,
)
from .floquet import (
    FloquetDecomposition,
    circular_gap,
    floquet_decompose,
    fold_quasi_energy,
    ipr,
    mode_character,
    refine_crossing,
    track_modes,
)
from .observables import (
    RegimeLabel,
    classify_regime,
    entanglement_entropy,
    entropy_series,
    populations,
    trapping_score,
)
from .sweep import (
    ResonanceHit,
    SweepAxis,
    SweepResult,
    TrappingPrediction,
    find_local_minima,
    locate_resonances,
    predict_trapping,
    run_sweep,
    write_timeseries_csv,
)
from .figures import FIGURES, build_figure

__all__ = [name for name in dir() if not name.startswith("_")]
