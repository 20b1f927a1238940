"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines.  All tolerances are pinned here, straight from the criteria.

Three sub-assertions are implemented faithfully and fail red by measured
margins intrinsic to the exact dynamics rather than to this implementation:

* 4(b) and 4(c): the trapped state's stroboscopic envelope floor at the
  stated working point is 0.9497 (beat amplitude 4p(1-p) with Floquet-mode
  weight p = 0.9861), just below the required 0.95; dense sampling adds
  intra-period micromotion dips to 0.895 on top.
* 8 (weak interaction): on the exact two-photon-resonance manifold the
  both-ground/both-excited pair is degenerate by construction, so its Floquet
  modes are equal-weight hybrids at every modulation index and the IPR sits
  at ~1.0 instead of dipping below 0.05 at the Bessel zeros; the near-crossing
  there is avoided, with an eigenphase gap of a few 1e-6, far above the 1e-8
  degeneracy tolerance that makes the subspace rule fire.  Only the strictly
  non-interacting limit restores the sharp zeros.
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from rydfloq.bessel import bessel_j, bessel_zero
from rydfloq.floquet import (
    circular_gap,
    floquet_decompose,
    ipr,
    mode_character,
    refine_crossing,
)
from rydfloq.hamiltonians import effective_hamiltonian, frame_unitary
from rydfloq.model import DriveParams, basis_for, state_from_token
from rydfloq.observables import trapping_score
from rydfloq.propagation import monodromy, propagate, propagate_amplitudes
from rydfloq.sweep import (
    ResonanceHit,
    SweepAxis,
    find_local_minima,
    locate_resonances,
    run_sweep,
)
from tests.conftest import decompose_at

FULL = basis_for(2)
SYM = basis_for(2, symmetric=True)
ATOM = basis_for(1)

J0_ZEROS = [bessel_zero(0, k) for k in (1, 2, 3)]
J1_ZEROS = [bessel_zero(1, k) for k in (1, 2)]


def report(name: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def ipr_of(token, dec):
    basis = {2: ATOM, 3: SYM, 4: FULL}[dec.dim]
    return ipr(state_from_token(token, basis).amplitudes, dec)


def test_criterion_01_single_atom_resonance_peaks():
    base = DriveParams(delta_mod=15.0, omega=8.0)
    res = run_sweep(base, [SweepAxis.linspace("delta0", 0.0, 20.0, 401)],
                    n_atoms=1, initial_states=("g",))
    d0 = res.axis_columns()["delta0"]
    values = res.iprs["g"]
    peaks = [values[np.abs(d0 - c) <= 0.1].max() for c in (0.0, 8.0, 16.0)]
    valleys = [values[np.isclose(d0, c)][0] for c in (4.0, 12.0)]
    ok = all(p >= 0.9 for p in peaks) and all(v < 0.05 for v in valleys)
    report("1", ok, f"peaks {np.round(peaks, 3)} >= 0.9; midpoints {np.round(valleys, 4)} < 0.05")


def test_criterion_02_first_harmonic_bessel_trapping():
    # Static detuning equal to the drive frequency: minima of the ground-state
    # IPR at the first-order Bessel zeros.  The dips are arbitrarily sharp at
    # zero interaction, so each one is located by refining the underlying
    # branch crossing; the IPR there drops through the degenerate-subspace
    # rule, and the crossing is itself the local minimum of the swept curve.
    details = []
    ok = True
    for z in J1_ZEROS:
        def dec_of(alpha):
            return decompose_at(
                DriveParams(delta0=8.0, delta_mod=alpha * 8.0, omega=8.0), 1)

        found = refine_crossing(dec_of, z - 0.05, z + 0.05)
        if found is None:
            ok = False
            details.append(f"no minimum near {z:.4f}")
            continue
        alpha_star, _ = found
        value = ipr_of("g", dec_of(alpha_star))
        ok = ok and abs(alpha_star - z) <= 0.05 and value <= 0.02
        details.append(f"min at {alpha_star:.4f} (zero {z:.4f}), IPR {value:.2e}")
    report("2", ok, "; ".join(details))


def test_criterion_03_dynamical_stabilization_crossings():
    details = []
    ok = True
    for z in J0_ZEROS:
        def dec_of(alpha):
            return decompose_at(DriveParams(delta_mod=alpha * 8.0, omega=8.0), 1)

        found = refine_crossing(dec_of, z - 0.05, z + 0.05)
        if found is None:
            ok = False
            details.append(f"no crossing near {z:.4f}")
            continue
        alpha_star, residual = found
        value = ipr_of("g", dec_of(alpha_star))
        ok = ok and abs(alpha_star - z) <= 0.02 and residual <= 1e-8 and value <= 0.02
        details.append(
            f"crossing {alpha_star:.4f} (zero {z:.4f}, |d| {abs(alpha_star - z):.4f}), "
            f"IPR {value:.2e}"
        )
    report("3", ok, "; ".join(details))


def _fig3_series(delta0, token, sample_every):
    p = DriveParams(delta0=delta0, delta_mod=15.0, omega=8.0, v0=10.0)
    t_final = math.floor(20.0 / p.period) * p.period if sample_every == "strobe" else 20.0
    cadence = p.period if sample_every == "strobe" else 0.01
    return propagate(state_from_token(token, FULL), p, t_final=t_final,
                     sample_every=cadence)


def test_criterion_04_resonant_exchange_panels():
    # Panels (a) and (d): resonant population exchange with the pair state.
    ts_a = _fig3_series(8.0, "gg", 0.01)
    ts_d = _fig3_series(2.0, "ee", 0.01)
    ok_a = ts_a.population("gg").min() <= 0.3 and ts_a.population("ee").max() <= 0.1
    ok_d = ts_d.population("ee").min() <= 0.3 and ts_d.population("gg").max() <= 0.1
    report(
        "4(a,d)", ok_a and ok_d,
        f"(a) min P_gg {ts_a.population('gg').min():.3f} <= 0.3, "
        f"max P_ee {ts_a.population('ee').max():.3f} <= 0.1; "
        f"(d) min P_ee {ts_d.population('ee').min():.3f} <= 0.3, "
        f"max P_gg {ts_d.population('gg').max():.3f} <= 0.1",
    )


def test_criterion_04b_trapping_of_excited_pair():
    # Faithful to the stated bound; the exact stroboscopic envelope floor is
    # 0.9497 (module docstring), so this assertion is expected red.
    ts = _fig3_series(8.0, "ee", "strobe")
    score = trapping_score(ts, "ee")
    report("4(b)", score >= 0.95,
           f"trapping_score {score:.4f} vs required >= 0.95 "
           f"(exact stroboscopic envelope floor; see module docstring)")


def test_criterion_04c_trapping_of_ground_pair():
    ts = _fig3_series(2.0, "gg", "strobe")
    score = trapping_score(ts, "gg")
    report("4(c)", score >= 0.95,
           f"trapping_score {score:.4f} vs required >= 0.95 "
           f"(exact stroboscopic envelope floor; see module docstring)")


def test_criterion_05_three_resonance_families():
    base = DriveParams(delta_mod=15.0, omega=8.0, v0=10.0)
    res = run_sweep(base, [SweepAxis.linspace("delta0", 0.0, 20.0, 1001)],
                    n_atoms=2, initial_states=("gg", "ee"))
    d0 = res.axis_columns()["delta0"]
    hits = locate_resonances(base, "delta0", (0.0, 20.0), 3)

    def window_peak(values, center):
        return values[np.abs(d0 - center) <= 0.1].max()

    failures = []
    for h in hits:
        if h.kind in ("R1", "R3"):
            peak = window_peak(res.iprs["gg"], h.location)
            if peak < 0.5:
                failures.append(f"gg@{h.kind}{h.index}={peak:.2f}")
        if h.kind in ("R2", "R3"):
            peak = window_peak(res.iprs["ee"], h.location)
            if peak < 0.5:
                failures.append(f"ee@{h.kind}{h.index}={peak:.2f}")
    report("5", not failures,
           f"{len(hits)} resonance hits, grid step 0.02 (narrow two-photon peaks "
           f"resolved); failures: {failures or 'none'}")


def test_criterion_06_stabilization_without_crossing():
    omega = 8.0
    details = []
    ok = True
    for z in J0_ZEROS[:2]:
        dec = decompose_at(
            DriveParams(delta_mod=z * omega, omega=omega, v0=omega), 2, True)
        char = mode_character(dec, "gg").max()
        pi_gg = ipr_of("gg", dec)
        gap = circular_gap(dec.eigenphases) / dec.period
        ok = ok and char >= 0.99 and pi_gg <= 0.05 and gap > 1e-3 * omega
        details.append(f"z={z:.3f}: char {char:.4f}, IPR {pi_gg:.3f}, gap {gap:.3f}")
    for z in J1_ZEROS:
        dec = decompose_at(
            DriveParams(delta_mod=z * omega, omega=omega, v0=omega), 2, True)
        pi_ee = ipr_of("ee", dec)
        ok = ok and pi_ee <= 0.05
        details.append(f"J1 z={z:.3f}: IPR_ee {pi_ee:.3f}")
    report("6", ok, "; ".join(details))


def test_criterion_07_regime_map():
    omega = 8.0
    base = DriveParams(omega=omega)
    v0_axis = SweepAxis.linspace("v0", 0.0, 20.0, 81)
    res = run_sweep(
        base,
        [SweepAxis.linspace("alpha", 0.0, 10.0, 201), v0_axis],
        n_atoms=2, initial_states=("gg", "ee"), symmetric=True,
    )
    regime = np.array([str(r) for r in res.regime]).reshape(201, 81)
    cols = res.axis_columns()
    alpha = cols["alpha"].reshape(201, 81)
    v0 = cols["v0"].reshape(201, 81)

    # (i) freezing bands along the zeroth-order Bessel-zero lines; the bands
    # are narrower than any practical uniform step, so use refined strips.
    freezing_fractions = []
    for z in J0_ZEROS:
        strip = run_sweep(
            base,
            [SweepAxis.linspace("alpha", z - 0.08, z + 0.08, 81), v0_axis],
            n_atoms=2, initial_states=("gg", "ee"), symmetric=True,
        )
        r = np.array([str(x) for x in strip.regime]).reshape(81, 81)
        freezing_fractions.append(float((r == "freezing").any(axis=0).mean()))
    ok_freezing = all(f >= 0.9 for f in freezing_fractions)

    # (ii) anti-blockade only inside the harmonic interaction strips.
    in_strip = np.zeros_like(v0, dtype=bool)
    for n in (0, 1, 2):
        in_strip |= np.abs(v0 - n * omega) <= 1.5
    anti = regime == "anti_blockade"
    ok_anti = not np.any(anti & ~in_strip)

    # (iii) blockade on at least half of the remaining points.
    near_band = np.zeros_like(alpha, dtype=bool)
    for z in J0_ZEROS:
        near_band |= np.abs(alpha - z) <= 0.2
    remaining = ~in_strip & ~near_band
    blockade_fraction = float((regime[remaining] == "blockade").mean())
    ok_blockade = blockade_fraction >= 0.5

    report(
        "7", ok_freezing and ok_anti and ok_blockade,
        f"freezing row fractions {np.round(freezing_fractions, 3)} >= 0.9; "
        f"anti-blockade points outside strips: {int(np.sum(anti & ~in_strip))}; "
        f"blockade fraction on remaining {blockade_fraction:.3f} >= 0.5",
    )


def _two_photon_min_ipr(v0, omega, z, half=0.05, n=101):
    """Minimum both-ground IPR near a Bessel zero on the two-photon manifold,
    including the refined closest-approach point of the branch pair."""
    delta0 = v0 / 2.0

    def dec_of(alpha):
        return decompose_at(
            DriveParams(delta0=delta0, delta_mod=alpha * omega, omega=omega, v0=v0),
            2, True)

    values = [ipr_of("gg", dec_of(a)) for a in np.linspace(z - half, z + half, n)]
    found = refine_crossing(dec_of, z - half, z + half)
    if found is not None:
        values.append(ipr_of("gg", dec_of(found[0])))
    values.append(ipr_of("gg", dec_of(z)))
    return min(values)


def test_criterion_08_sharp_minima_at_weak_interaction():
    # Faithful to the stated bound; on the exact two-photon manifold the
    # both-ground/both-excited pair is degenerate by construction and the
    # modes stay hybridized at every modulation index, so the minimum IPR
    # is ~1 rather than <= 0.05 (expected red; module docstring).
    minima = [_two_photon_min_ipr(0.01, 30.0, z) for z in J0_ZEROS]
    ok = all(m <= 0.05 for m in minima)
    report("8(weak)", ok,
           f"min IPR near first three zeros {np.round(minima, 4)} vs required <= 0.05 "
           f"(pair degenerate on the two-photon manifold; see module docstring)")


def test_criterion_08_minima_destroyed_at_strong_interaction():
    details = []
    ok = True
    for omega in (15.0, 30.0):
        minima = [_two_photon_min_ipr(6.0, omega, z, half=0.4, n=161) for z in J0_ZEROS]
        ok = ok and all(m > 0.1 for m in minima)
        details.append(f"omega={omega:g}: minima {np.round(minima, 3)}")
    report("8(strong)", ok, "; ".join(details) + " all > 0.1")


def test_criterion_09_bell_state_stabilization_and_entropy():
    omega = 8.0
    z1 = J0_ZEROS[0]
    # (i) trapped working point: interaction 5, first zeroth-order zero.
    p_ds = DriveParams(delta_mod=z1 * omega, omega=omega, v0=5.0)
    pi_plus = ipr_of("plus", decompose_at(p_ds, 2, True))
    ts = propagate(state_from_token("plus", FULL), p_ds,
                   t_final=50 * p_ds.period, sample_every=p_ds.period,
                   with_entropy=True)
    entropy_dev = float(np.abs(ts.entropy - 1.0).max())
    ok_ds = pi_plus <= 0.05 and entropy_dev <= 0.05

    # (ii) blockade working point: entropy swings with the exchange.
    p_bl = DriveParams(delta_mod=1.0 * omega, omega=omega, v0=5.0)
    pi_plus_bl = ipr_of("plus", decompose_at(p_bl, 2, True))
    ts_bl = propagate(state_from_token("plus", FULL), p_bl,
                      t_final=50 * p_bl.period, sample_every=p_bl.period,
                      with_entropy=True)
    swing = float(ts_bl.entropy.max() - ts_bl.entropy.min())
    ok_bl = abs(pi_plus_bl - 1.0) <= 0.25 and swing >= 0.5

    # (iii) interaction at the drive frequency: both Bessel families can
    # never vanish together, so the Bell state is not stabilized.
    ok_nw = True
    pis = []
    for z in J0_ZEROS:
        p = DriveParams(delta_mod=z * omega, omega=omega, v0=omega)
        value = ipr_of("plus", decompose_at(p, 2, True))
        pis.append(value)
        ok_nw = ok_nw and value >= 0.1
    report(
        "9", ok_ds and ok_bl and ok_nw,
        f"trapped: IPR_plus {pi_plus:.3f} <= 0.05, |S-1|max {entropy_dev:.3f} <= 0.05; "
        f"blockade: IPR_plus {pi_plus_bl:.2f} ~ 1, entropy swing {swing:.2f} >= 0.5; "
        f"no simultaneous zeros: IPR_plus {np.round(pis, 2)} all >= 0.1",
    )


def test_criterion_10_numerical_contracts():
    p = DriveParams(delta0=8.0, delta_mod=15.0, omega=8.0, v0=10.0)
    unitarity = monodromy(p, 2).unitarity_defect()

    ts = propagate(state_from_token("gg", FULL), p, t_final=50 * p.period,
                   sample_every=p.period)
    norm_drift = float(np.abs(ts.norm - 1.0).max())

    # Effective-Hamiltonian stroboscopic fidelity in the T-periodic detuning
    # frame with the static interaction restored (the averaged Hamiltonian is
    # derived in the interaction-dressed frame, which is not drive-periodic).
    p_hf = DriveParams(delta_mod=30.0, omega=30.0, v0=0.2)
    psi0 = state_from_token("gg", FULL).amplitudes
    dressing = frame_unitary(p_hf, 0.0, 2)
    h_eff = effective_hamiltonian(p_hf).matrix + p_hf.v0 * np.diag([0.0, 0, 0, 1.0])
    u_eff = expm(-1j * h_eff * p_hf.period)
    times = np.arange(0, 51) * p_hf.period
    lab = propagate_amplitudes(psi0, p_hf, FULL, times, "lab")
    psi_eff = dressing @ psi0
    fidelity = 1.0
    for n in range(1, 51):
        psi_eff = u_eff @ psi_eff
        fidelity = min(fidelity, abs(np.vdot(psi_eff, dressing @ lab[n])) ** 2)

    rng = np.random.default_rng(7)
    bessel_ok = True
    for _ in range(200):
        m = int(rng.integers(1, 40))
        x = float(rng.uniform(0.2, 60.0))
        recurrence = abs(bessel_j(m - 1, x) + bessel_j(m + 1, x)
                         - (2.0 * m / x) * bessel_j(m, x))
        reflection = abs(bessel_j(-m, x) - (-1.0) ** m * bessel_j(m, x))
        bessel_ok = bessel_ok and recurrence <= 1e-9 and reflection <= 1e-12

    # IPR bounds and phase-gauge invariance on randomized propagators.
    dec = decompose_at(p, 2)
    ipr_ok = True
    for _ in range(20):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        value = ipr(psi, dec)
        ipr_ok = ipr_ok and -1e-12 <= value <= 3.0 + 1e-12
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
        from rydfloq.floquet import FloquetDecomposition

        phased = FloquetDecomposition(
            quasi_energies=dec.quasi_energies, modes=dec.modes * phases[None, :],
            eigenphases=dec.eigenphases, omega=dec.omega,
            degeneracy_groups=dec.degeneracy_groups, basis=dec.basis,
        )
        ipr_ok = ipr_ok and abs(ipr(psi, phased) - value) <= 1e-12

    ok = (unitarity <= 1e-9 and norm_drift <= 1e-9 and fidelity >= 0.99
          and bessel_ok and ipr_ok)
    report(
        "10", ok,
        f"unitarity {unitarity:.1e} <= 1e-9; norm drift {norm_drift:.1e} <= 1e-9; "
        f"effective fidelity {fidelity:.4f} >= 0.99; Bessel identities at 1e-9: "
        f"{bessel_ok}; IPR bounds/gauge: {ipr_ok}",
    )


def test_criterion_11_secondary_is_optional():
    # The renderer is a separate package consumed only through the CSV/JSON
    # formats; the primary must not import it anywhere.
    import rydfloq
    import sys

    loaded = [m for m in sys.modules if "render" in m.lower()]
    report(
        "11", not loaded,
        "primary suite runs without the renderer package "
        "(its own tests build images from pre-generated CSV and check schema "
        "rejection); no renderer modules loaded: "
        f"{loaded or 'confirmed'}",
    )
