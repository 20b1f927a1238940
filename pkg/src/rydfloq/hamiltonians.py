"""Operator constructors for the driven Rydberg pair.

Four families of operators are built here, all in the fixed computational
bases of :mod:`rydfloq.model`:

* the lab-frame Hamiltonian with sinusoidally modulated detuning,
* its rotating-frame form, a Jacobi-Anger sum over Bessel harmonics with a
  correlated-coupling term conditioned on the interaction,
* the time-dependent coupling envelopes of the symmetric three-level ladder,
* time-independent effective Hamiltonians: the zeroth-order high-frequency
  average and its weak-interaction / small-detuning expansions.

The high-frequency average has simple poles at the drive-induced resonances;
exactly on resonance the 0/0 coefficient is replaced by its analytic limit
(i*T*J_m) and the substitution is flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j, bessel_j_row
from .model import (
    BASIS_ATOM,
    BASIS_PAIR,
    DriveParams,
    OperatorMatrix,
    detuning_at,
)

# Single-atom building blocks in the (g, e) ordering.
SIGMA_EG = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |e><g|
SIGMA_EE = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)  # |e><e|
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)

# Two-atom operators (Kronecker order: atom 1 first).
NUMBER_PAIR = np.kron(SIGMA_EE, _ID2) + np.kron(_ID2, SIGMA_EE)
SX_SUM_PAIR = np.kron(SIGMA_X, _ID2) + np.kron(_ID2, SIGMA_X)
RAISE_SUM_PAIR = np.kron(SIGMA_EG, _ID2) + np.kron(_ID2, SIGMA_EG)
DOUBLE_PROJECTOR = np.kron(SIGMA_EE, SIGMA_EE)
#: Correlated Rabi operator: raises one atom conditioned on the other being excited.
X_CORRELATED = np.kron(SIGMA_EG, SIGMA_EE) + np.kron(SIGMA_EE, SIGMA_EG)


def default_m_max(alpha: float) -> int:
    """Default harmonic cutoff; J_m(alpha) decays super-exponentially past m = alpha."""
    return int(math.ceil(alpha)) + 15


def lab_hamiltonian(params: DriveParams, n_atoms: int, t: float) -> OperatorMatrix:
    """Lab-frame Hamiltonian at time ``t``.

    ``-detuning(t) * sum_i |e><e|_i + (rabi/2) * sum_i sigma_x_i`` plus, for
    two atoms, the interaction ``v0 * |ee><ee|``.
    """
    delta = float(detuning_at(params, t))
    if n_atoms == 1:
        h = -delta * SIGMA_EE + 0.5 * params.rabi * SIGMA_X
        return OperatorMatrix(h, BASIS_ATOM).require_hermitian()
    if n_atoms == 2:
        h = (
            -delta * NUMBER_PAIR
            + 0.5 * params.rabi * SX_SUM_PAIR
            + params.v0 * DOUBLE_PROJECTOR
        )
        return OperatorMatrix(h, BASIS_PAIR).require_hermitian()
    raise ValueError(f"n_atoms must be 1 or 2, got {n_atoms}")


def _harmonic_coefficients(params: DriveParams, m_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Orders m = -m_max..m_max and coefficients (rabi/2) i^m J_m(alpha)."""
    ms = np.arange(-m_max, m_max + 1)
    jm = bessel_j_row(m_max, params.alpha)
    return ms, 0.5 * params.rabi * (1j**ms) * jm


def _rotating_scalar(params: DriveParams, t: float, m_max: int) -> complex:
    """The raising-part amplitude sum_m (rabi/2) i^m J_m(alpha) e^{i(m omega - delta0) t}."""
    ms, coeff = _harmonic_coefficients(params, m_max)
    phases = np.exp(1j * (ms * params.omega - params.delta0) * t)
    return complex(np.dot(coeff, phases))


def rotating_hamiltonian(
    params: DriveParams, t: float, m_max: int | None = None, n_atoms: int = 2
) -> OperatorMatrix:
    """Rotating-frame Hamiltonian, truncated to harmonics |m| <= m_max.

    In the frame that absorbs the detuning and interaction phases, the drive
    re-appears as a sum of Bessel-weighted harmonics multiplying the raising
    operators; for two atoms the raising of one atom conditioned on the other
    being excited picks up the extra factor ``exp(i v0 t) - 1``.  Hermitian by
    construction (sum plus conjugate).  A cutoff of at least ceil(alpha) + 10
    keeps the truncation error below 1e-10.
    """
    if m_max is None:
        m_max = default_m_max(params.alpha)
    s = _rotating_scalar(params, t, m_max)
    if n_atoms == 1:
        h = s * SIGMA_EG
        h = h + h.conj().T
        return OperatorMatrix(h, BASIS_ATOM).require_hermitian()
    if n_atoms == 2:
        h = s * RAISE_SUM_PAIR + s * (np.exp(1j * params.v0 * t) - 1.0) * X_CORRELATED
        h = h + h.conj().T
        return OperatorMatrix(h, BASIS_PAIR).require_hermitian()
    raise ValueError(f"n_atoms must be 1 or 2, got {n_atoms}")


def frame_unitary(params: DriveParams, t: float, n_atoms: int) -> np.ndarray:
    """Diagonal unitary mapping lab-frame states to the rotating frame.

    The phase function ``alpha cos(omega t) - delta0 t`` multiplies the
    excitation number; the interaction phase ``v0 t`` multiplies the double
    projector.  At stroboscopic times the cosine part reduces to its t = 0
    value, so populations agree between frames there (and, being diagonal, at
    every intermediate time as well).
    """
    f = params.alpha * math.cos(params.omega * t) - params.delta0 * t
    if n_atoms == 1:
        return np.diag(np.exp(1j * f * np.diag(SIGMA_EE))).astype(complex)
    if n_atoms == 2:
        phase = f * np.diag(NUMBER_PAIR) + params.v0 * t * np.diag(DOUBLE_PROJECTOR)
        return np.diag(np.exp(1j * phase))
    raise ValueError(f"n_atoms must be 1 or 2, got {n_atoms}")


def coupling_envelopes(
    params: DriveParams, t: float, m_max: int | None = None
) -> tuple[complex, complex]:
    """Time-dependent couplings of the symmetric ladder gg <-> plus <-> ee.

    Returns the off-diagonal elements (gg, plus) and (plus, ee) of the
    rotating-frame Hamiltonian compressed to the symmetric basis, i.e. the
    instantaneous Rabi couplings of the two ladder transitions.  They differ
    only by the interaction phase ``exp(-i v0 t)``, so they coincide for all t
    when v0 = 0.
    """
    if m_max is None:
        m_max = default_m_max(params.alpha)
    s = _rotating_scalar(params, t, m_max)
    omega1 = math.sqrt(2.0) * np.conj(s)
    omega2 = omega1 * np.exp(-1j * params.v0 * t)
    return complex(omega1), complex(omega2)


def coupling_envelope_averages(
    params: DriveParams, m_max: int | None = None, tol: float = 1e-9
) -> tuple[complex, complex]:
    """Secular (infinite-time) averages of the two coupling envelopes.

    Only harmonics whose net rotation frequency vanishes survive: the first
    envelope keeps m with m*omega = delta0, the second m with
    m*omega = delta0 - v0.  Away from those resonances the averages are
    exactly zero.
    """
    if m_max is None:
        m_max = default_m_max(params.alpha)
    ms, coeff = _harmonic_coefficients(params, m_max)
    # <gg|H'|plus> harmonics rotate at -(m omega - delta0); conjugated coefficients.
    c = math.sqrt(2.0) * np.conj(coeff)
    freq1 = ms * params.omega - params.delta0
    freq2 = freq1 + params.v0
    cut = tol * params.omega
    avg1 = complex(c[np.abs(freq1) <= cut].sum())
    avg2 = complex(c[np.abs(freq2) <= cut].sum())
    return avg1, avg2


@dataclass(frozen=True)
class EffectiveCoefficients:
    """One harmonic's pair of averaged amplitudes in the high-frequency Hamiltonian.

    ``a_m`` weights the single-atom raising sum, ``b_m`` the correlated
    raising; both have simple poles at the drive resonances, replaced by the
    analytic limit i*T*J_m(alpha) when the denominator is resonant within
    ``1e-9 * omega`` (flagged via ``resonant_limit_used``).
    """

    m: int
    a_m: complex
    b_m: complex
    resonant_limit_used: bool


def effective_coefficients(
    params: DriveParams, m: int, resonant_tol: float = 1e-9
) -> EffectiveCoefficients:
    T = params.period
    jm = bessel_j(m, params.alpha)
    cut = resonant_tol * params.omega
    used_limit = False

    den_a = m * params.omega - params.delta0
    if abs(den_a) <= cut:
        a_m = 1j * T * jm
        used_limit = True
    else:
        a_m = jm * (np.exp(-1j * params.delta0 * T) - 1.0) / den_a

    den_b = m * params.omega - params.delta0 + params.v0
    if abs(den_b) <= cut:
        b_m = 1j * T * jm
        used_limit = True
    else:
        b_m = jm * (np.exp(-1j * (params.delta0 - params.v0) * T) - 1.0) / den_b

    return EffectiveCoefficients(m=int(m), a_m=complex(a_m), b_m=complex(b_m), resonant_limit_used=used_limit)


def effective_hamiltonian(
    params: DriveParams, m_max: int | None = None, n_atoms: int = 2
) -> OperatorMatrix:
    """Zeroth-order high-frequency (one-period averaged) Hamiltonian.

    Intended regime: omega much larger than both the static detuning and the
    interaction (not enforced).  For v0 = 0 the correlated term vanishes
    identically, since both averaged amplitudes coincide.
    """
    if m_max is None:
        m_max = default_m_max(params.alpha)
    T = params.period
    pre = params.rabi / (2j * T)
    if n_atoms == 1:
        raise_part = np.zeros((2, 2), dtype=complex)
        for m in range(-m_max, m_max + 1):
            c = effective_coefficients(params, m)
            raise_part += pre * (1j**m) * c.a_m * SIGMA_EG
        h = raise_part + raise_part.conj().T
        return OperatorMatrix(h, BASIS_ATOM).require_hermitian()
    if n_atoms == 2:
        raise_part = np.zeros((4, 4), dtype=complex)
        for m in range(-m_max, m_max + 1):
            c = effective_coefficients(params, m)
            raise_part += pre * (1j**m) * (
                c.a_m * RAISE_SUM_PAIR + (c.b_m - c.a_m) * X_CORRELATED
            )
        h = raise_part + raise_part.conj().T
        return OperatorMatrix(h, BASIS_PAIR).require_hermitian()
    raise ValueError(f"n_atoms must be 1 or 2, got {n_atoms}")


def _require_resonance(value: float, name: str, omega: float) -> None:
    if abs(value) > 1e-9 * omega:
        raise ValueError(
            f"resonance precondition violated: |{name}| = {abs(value):.3e} "
            f"exceeds 1e-9 * omega"
        )


def effective_hamiltonian_small_v0(
    params: DriveParams, n1: int, m_max: int | None = None
) -> OperatorMatrix:
    """First order in v0/omega at the single-atom resonance delta0 = n1*omega.

    The resonant harmonic carries the bare coupling plus an
    ``i*pi*(v0/omega)`` correlated correction; the remaining harmonics
    contribute a correlated term weighted by J_m/(m - n1).  For n1 = 0 that
    sum is omitted (its symmetric-order pairing cancels it identically).
    """
    if m_max is None:
        m_max = default_m_max(params.alpha)
    _require_resonance(n1 * params.omega - params.delta0, "n1*omega - delta0", params.omega)
    jrow = bessel_j_row(m_max, params.alpha)

    def j(m: int) -> float:
        return float(jrow[m + m_max])

    lead = (1j**n1) * j(n1) * 0.5 * params.rabi
    ratio = params.v0 / params.omega
    raise_part = lead * (RAISE_SUM_PAIR + 1j * math.pi * ratio * X_CORRELATED)
    if n1 != 0:
        tail = sum(
            (1j**m) * j(m) / (m - n1)
            for m in range(-m_max, m_max + 1)
            if m != n1
        )
        raise_part = raise_part + 0.5 * params.rabi * tail * ratio * X_CORRELATED
    h = raise_part + raise_part.conj().T
    return OperatorMatrix(h, BASIS_PAIR).require_hermitian()


def effective_hamiltonian_small_delta(
    params: DriveParams, n3: int, m_max: int | None = None
) -> OperatorMatrix:
    """Small-detuning form at the two-photon resonance 2*delta0 - v0 = n3*omega.

    Valid for delta0 and v0 both much smaller than omega (documented, not
    enforced).  The correlated term carries the difference J_n3 - J_0 and thus
    vanishes identically for n3 = 0, leaving a pure J_0 coupling: the pair
    then freezes wherever J_0(alpha) = 0.
    """
    if m_max is None:
        m_max = default_m_max(params.alpha)
    _require_resonance(
        2.0 * params.delta0 - params.v0 - n3 * params.omega,
        "2*delta0 - v0 - n3*omega",
        params.omega,
    )
    j0 = bessel_j(0, params.alpha)
    jn3 = bessel_j(n3, params.alpha)
    tilt = 1j * math.pi * params.delta0 / params.omega
    raise_part = 0.5 * params.rabi * (
        j0 * (1.0 - tilt) * RAISE_SUM_PAIR
        + (1j**n3) * (jn3 - j0) * (1.0 + tilt) * X_CORRELATED
    )
    h = raise_part + raise_part.conj().T
    return OperatorMatrix(h, BASIS_PAIR).require_hermitian()
