"""Floquet analysis: quasi-energies, stroboscopic modes, IPR, branch tracking.

The one-period propagator U(T) is decomposed through a complex Schur
factorization (robust near degeneracies, no diagonalizability shortcut
assumed); its eigenphases give quasi-energies folded into the symmetric zone
(-omega/2, omega/2].  Eigenvector arbitrariness inside a degenerate cluster is
removed by diagonalizing the projector onto a fixed reference basis vector,
and the inverse participation ratio treats each cluster as a single
participation channel, so an initial state lying inside a degenerate subspace
has IPR exactly zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur
from scipy.optimize import linear_sum_assignment

from .model import Basis, OperatorMatrix, StateVector

#: Eigenphase gap below which two modes are treated as one degenerate cluster.
DEGENERACY_TOL = 1e-8

#: Unitarity defect beyond which an input is rejected.
UNITARY_INPUT_TOL = 1e-8


def fold_quasi_energy(eps, omega: float):
    """Fold quasi-energies into the zone (-omega/2, omega/2]."""
    eps = np.asarray(eps, dtype=float)
    folded = eps - omega * np.round(eps / omega)
    folded = np.where(folded <= -0.5 * omega, folded + omega, folded)
    return folded if folded.ndim else float(folded)


@dataclass(frozen=True)
class FloquetDecomposition:
    """Eigen-data of a one-period propagator.

    ``modes[:, k]`` is the k-th stroboscopic Floquet mode, ``quasi_energies``
    are folded into (-omega/2, omega/2] and sorted ascending, and
    ``eigenphases`` are quasi-energy times period.  ``degeneracy_groups``
    lists index clusters whose eigenphases coincide within ``DEGENERACY_TOL``
    (measured on the circle, so the zone edges +-omega/2 meet).
    """

    quasi_energies: np.ndarray
    modes: np.ndarray
    eigenphases: np.ndarray
    omega: float
    degeneracy_groups: tuple[tuple[int, ...], ...]
    basis: Basis

    @property
    def dim(self) -> int:
        return int(self.quasi_energies.size)

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    def eigenvalues(self) -> np.ndarray:
        return np.exp(-1j * self.eigenphases)

    def reconstruct(self) -> np.ndarray:
        """Sum of lambda_k |phi_k><phi_k|; reproduces the input within 1e-7."""
        lam = self.eigenvalues()
        return (self.modes * lam[None, :]) @ self.modes.conj().T


def _cluster_circular(phases: np.ndarray, tol: float) -> list[list[int]]:
    """Cluster sorted phases on the circle of circumference 2*pi."""
    n = phases.size
    groups: list[list[int]] = [[0]]
    for i in range(1, n):
        if phases[i] - phases[i - 1] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    # Wrap-around: the last cluster may continue into the first through +-pi.
    if len(groups) > 1 and (phases[0] + 2.0 * np.pi - phases[-1]) <= tol:
        groups[0] = groups.pop() + groups[0]
    return groups


def _fix_phase(column: np.ndarray) -> np.ndarray:
    """Rotate a mode so its largest-magnitude component is real and positive."""
    k = int(np.argmax(np.abs(column)))
    pivot = column[k]
    if abs(pivot) == 0.0:
        return column
    return column * (np.conj(pivot) / abs(pivot))


def _orient_group(block: np.ndarray) -> np.ndarray:
    """Deterministic basis for a degenerate cluster.

    Successive computational basis vectors are projected into the cluster
    subspace and Gram-Schmidt orthonormalized, so the first returned column
    diagonalizes the projector onto the first basis vector with nonzero
    weight and the completion is fixed by the basis order (an identity
    propagator, for instance, comes back as the computational basis itself).
    """
    d, k = block.shape
    chosen: list[np.ndarray] = []
    for j in range(d):
        v = block @ block[j, :].conj()  # projection of basis vector j
        for c in chosen:
            v = v - c * np.vdot(c, v)
        norm = float(np.linalg.norm(v))
        if norm > 1e-7:
            chosen.append(v / norm)
        if len(chosen) == k:
            break
    if len(chosen) < k:
        return block
    return np.column_stack(chosen)


def floquet_decompose(u: OperatorMatrix | np.ndarray, omega: float) -> FloquetDecomposition:
    """Diagonalize a one-period propagator into quasi-energies and modes.

    Rejects inputs whose unitarity defect exceeds 1e-8.  Modes come back
    orthonormal with a deterministic orientation (reference-projector rule in
    degenerate clusters, largest component real-positive overall).
    """
    if isinstance(u, OperatorMatrix):
        basis = u.basis
        mat = np.asarray(u.matrix, dtype=complex)
    else:
        mat = np.asarray(u, dtype=complex)
        from .model import BASIS_ATOM, BASIS_PAIR, BASIS_PAIR_SYM

        basis = {2: BASIS_ATOM, 3: BASIS_PAIR_SYM, 4: BASIS_PAIR}[mat.shape[0]]
    defect = float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))
    if defect > UNITARY_INPUT_TOL:
        raise ValueError(f"input is not unitary (defect {defect:.3e} > {UNITARY_INPUT_TOL:.1e})")

    t_mat, z = schur(mat, output="complex")
    lam = np.diag(t_mat)
    theta = -np.angle(lam)  # lambda = exp(-i theta), theta in (-pi, pi]
    # theta = -angle gives [-pi, pi); shift the closed edge to +pi.
    theta = np.where(theta <= -np.pi, theta + 2.0 * np.pi, theta)
    eps = fold_quasi_energy(theta / (2.0 * np.pi / omega), omega)
    theta_folded = eps * (2.0 * np.pi / omega)

    order = np.argsort(eps, kind="stable")
    eps = eps[order]
    theta_folded = theta_folded[order]
    modes = z[:, order]

    groups = _cluster_circular(theta_folded, DEGENERACY_TOL)
    for g in groups:
        if len(g) > 1:
            modes[:, g] = _orient_group(modes[:, g])
    for k in range(modes.shape[1]):
        modes[:, k] = _fix_phase(modes[:, k])

    return FloquetDecomposition(
        quasi_energies=eps,
        modes=modes,
        eigenphases=theta_folded,
        omega=float(omega),
        degeneracy_groups=tuple(tuple(g) for g in groups),
        basis=basis,
    )


def _initial_amplitudes(initial: StateVector | np.ndarray, dim: int) -> np.ndarray:
    amp = initial.amplitudes if isinstance(initial, StateVector) else np.asarray(initial, dtype=complex)
    if amp.shape != (dim,):
        raise ValueError(f"initial state dimension {amp.shape} does not match modes ({dim})")
    return amp


def ipr(initial: StateVector | np.ndarray, decomposition: FloquetDecomposition) -> float:
    """Inverse participation ratio 1 / sum_k p_k^2 - 1 over the Floquet modes.

    Each degenerate cluster counts as one channel, with p equal to the squared
    norm of the projection onto the whole cluster subspace; the result is then
    invariant under re-mixing of the cluster basis and drops to zero exactly
    when the initial state lives inside one cluster.
    """
    amp = _initial_amplitudes(initial, decomposition.dim)
    overlaps = np.abs(decomposition.modes.conj().T @ amp) ** 2
    p = np.array([overlaps[list(g)].sum() for g in decomposition.degeneracy_groups])
    return float(1.0 / np.sum(p**2) - 1.0)


def mode_character(decomposition: FloquetDecomposition, label: str) -> np.ndarray:
    """Probability of finding the given basis label in each Floquet mode."""
    idx = decomposition.basis.index(label)
    return np.abs(decomposition.modes[idx, :]) ** 2


def circular_gap(eigenphases: np.ndarray) -> float:
    """Smallest pairwise distance between eigenphases on the circle."""
    t = np.sort(np.asarray(eigenphases, dtype=float))
    gaps = np.diff(t)
    wrap = t[0] + 2.0 * np.pi - t[-1]
    return float(min(gaps.min() if gaps.size else np.inf, wrap))


def _wrap_phase(x: float) -> float:
    return float((x + np.pi) % (2.0 * np.pi) - np.pi)


def refine_crossing(dec_of, lo: float, hi: float) -> tuple[float, float] | None:
    """Locate a quasi-energy branch crossing inside a parameter bracket.

    ``dec_of`` maps a scalar parameter to a FloquetDecomposition.  Branches
    are identified against the bracket's left endpoint by maximum overlap, the
    signed eigenphase difference of the crossing pair is driven to zero by
    Brent's method, and the location plus the residual absolute gap there are
    returned.  Returns None when no tracked pair changes sign over the bracket
    (an avoided crossing); for a true crossing the residual gap falls below
    the degeneracy tolerance, so the subspace IPR rule applies at the result.
    """
    from scipy.optimize import brentq

    d_lo = dec_of(lo)
    d_hi = dec_of(hi)
    perm = track_modes(d_lo, d_hi)
    pair = None
    best = np.inf
    for i in range(d_lo.dim):
        for j in range(i + 1, d_lo.dim):
            s0 = _wrap_phase(d_lo.eigenphases[i] - d_lo.eigenphases[j])
            s1 = _wrap_phase(d_hi.eigenphases[perm[i]] - d_hi.eigenphases[perm[j]])
            if s0 * s1 < 0 and min(abs(s0), abs(s1)) < best:
                pair, best = (i, j), min(abs(s0), abs(s1))
    if pair is None:
        return None
    i, j = pair

    def signed_gap(x: float) -> float:
        d = dec_of(x)
        p = track_modes(d_lo, d)
        return _wrap_phase(d.eigenphases[p[i]] - d.eigenphases[p[j]])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # tracking overlap dips to 1/2 at the crossing
        x_star = float(brentq(signed_gap, lo, hi, xtol=1e-13, rtol=8.9e-16))
        residual = abs(signed_gap(x_star))
    return x_star, residual


def track_modes(previous: FloquetDecomposition, current: FloquetDecomposition) -> np.ndarray:
    """Permutation aligning the current modes with the previous ones.

    Maximizes the total squared overlap, so swept spectra can be drawn as
    continuous branches; avoided crossings stay distinguishable from true
    crossings.  ``perm[j]`` is the index of the current mode continuing
    previous branch j.  Emits a warning when any matched overlap falls below
    0.5 (sweep step too coarse to follow the branch).
    """
    if previous.dim != current.dim:
        raise ValueError("decompositions have different dimensions")
    overlap = np.abs(previous.modes.conj().T @ current.modes) ** 2
    rows, cols = linear_sum_assignment(-overlap)
    perm = np.empty(previous.dim, dtype=int)
    perm[rows] = cols
    worst = float(overlap[rows, cols].min())
    if worst < 0.5:
        warnings.warn(
            f"mode tracking overlap dropped to {worst:.3f}; sweep step may be too coarse",
            stacklevel=2,
        )
    return perm
