"""Exact diagonalization, dressed-state labeling, dispersive-shift extraction,
avoided-crossing fitting, and synthesis of cavity transmission spectra.

Dressed states are labeled by maximum squared overlap with the bare product
basis, computed blockwise in total excitation number: the rotating-frame
coupling conserves N = n_q + n_C, so blocks are small and the assignment is
unambiguous away from the pole guard bands.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .hilbert import CompositeSpace, annihilation, check_hermitian
from .model import PumpSpec, SystemSpec, pump_detuning, rotating_frame_matrix
from .parametric import Shift, chi_parametric_series, in_guard_band

LABEL_OVERLAP_MIN = 0.5  # below this the dispersive label is meaningless


@dataclass
class EigenSolution:
    """Sorted real spectrum with eigenvectors and optional bare-state labels."""

    energies: np.ndarray          # ascending, rad/ns
    vectors: np.ndarray           # orthonormal columns matching energies
    labels: Optional[list] = None         # per eigenstate: bare occupation tuple
    overlaps: Optional[np.ndarray] = None  # squared overlap behind each label

    def energy_of(self, occupation) -> float:
        """Energy of the dressed state labeled by a bare occupation tuple."""
        if self.labels is None:
            raise ValueError("eigensolution has not been labeled")
        occupation = tuple(occupation)
        for e, lb in zip(self.energies, self.labels):
            if lb == occupation:
                return float(e)
        raise KeyError(f"no dressed state labeled {occupation}")

    def overlap_of(self, occupation) -> float:
        occupation = tuple(occupation)
        for ov, lb in zip(self.overlaps, self.labels):
            if lb == occupation:
                return float(ov)
        raise KeyError(f"no dressed state labeled {occupation}")


def diagonalize(h: np.ndarray, herm_tol: float = 1e-10) -> EigenSolution:
    """Full spectrum of a Hermitian matrix, energies ascending."""
    if not check_hermitian(h, herm_tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    energies, vectors = np.linalg.eigh(h)
    return EigenSolution(energies=energies, vectors=vectors)


def label_dressed_states(solution: EigenSolution, dims: Sequence[int]) -> EigenSolution:
    """Assign bare-basis labels by max |overlap|^2, greedily within the full set.

    Assignment is injective: each eigenstate takes the bare index it overlaps
    most with, resolving collisions in favor of the larger overlap.
    """
    space = CompositeSpace(tuple(dims))
    if space.total_dim != solution.energies.size:
        raise ValueError("dims do not match the eigensolution size")
    weights = np.abs(solution.vectors) ** 2  # [bare index, eigenstate]
    order = np.argsort(weights, axis=None)[::-1]
    labels: list = [None] * space.total_dim
    overlaps = np.zeros(space.total_dim)
    used_bare = set()
    assigned = 0
    for flat in order:
        bare, eig = np.unravel_index(flat, weights.shape)
        if labels[eig] is not None or bare in used_bare:
            continue
        labels[eig] = tuple(np.unravel_index(bare, space.factor_dims))
        overlaps[eig] = weights[bare, eig]
        used_bare.add(bare)
        assigned += 1
        if assigned == space.total_dim:
            break
    solution.labels = labels
    solution.overlaps = overlaps
    return solution


def diagonalize_labeled(h: np.ndarray, dims: Sequence[int]) -> EigenSolution:
    return label_dressed_states(diagonalize(h), dims)


def chi_from_matrix(
    alpha: float,
    delta_p: float,
    g_p: float,
    qubit_dim: int,
    cavity_dim: int,
    excited: str = "e",
) -> Shift:
    """Dispersive shift from exact diagonalization of the rotating frame.

    2 chi = [E(x,1) - E(x,0)] - [E(g,1) - E(g,0)] with x the excited member
    of the readout pair (|e> by default, |f> for second-excited readout) and
    E(m,n) dressed energies labeled by max overlap.  The result is flagged
    when any label overlap drops below 0.5.
    """
    level = {"e": 1, "f": 2}.get(excited)
    if level is None:
        raise ValueError(f"excited state must be 'e' or 'f', got {excited!r}")
    if qubit_dim < level + 1 or cavity_dim < 2:
        raise ValueError("truncation too small to resolve the readout pair")
    h = rotating_frame_matrix(alpha, delta_p, g_p, qubit_dim, cavity_dim)
    sol = diagonalize_labeled(h, (qubit_dim, cavity_dim))
    pairs = [(level, 1), (level, 0), (0, 1), (0, 0)]
    energies = [sol.energy_of(p) for p in pairs]
    # labels degrade inside the guard band of any crossing the readout pair
    # actually rides through (poles 0..-level*alpha), or when overlap collapses
    flagged = (
        any(sol.overlap_of(p) < LABEL_OVERLAP_MIN for p in pairs)
        or in_guard_band(delta_p, alpha, g_p, m_max=level)
    )
    chi = 0.5 * ((energies[0] - energies[1]) - (energies[2] - energies[3]))
    return Shift(chi, flagged)


def chi_from_diagonalization(
    system: SystemSpec, pump: PumpSpec, qubit_state: str = "e", phi=None
) -> Shift:
    """Spec-level wrapper: dispersive shift of the configured system."""
    phi = system.static_flux if phi is None else phi
    mode = system.modes[pump.target]
    g_p = system.g_parametric(pump.target, phi, pump.delta_phi_p)
    delta_p = pump_detuning(system, pump, phi)
    return chi_from_matrix(
        mode.anharmonicity, delta_p, g_p, mode.dim, system.modes["C"].dim,
        excited=qubit_state,
    )


@dataclass
class CavityResponse:
    """One synthesized transmission row: S(omega_probe) plus its line content."""

    probe: np.ndarray        # lab-frame probe frequencies, rad/ns
    response: np.ndarray     # complex transmission, |S| <= 1
    centers: np.ndarray      # lab-frame line centers, rad/ns
    weights: np.ndarray      # normalized cavity participations, sum 1
    initial_state: str


_STATE_LEVEL = {"g": 0, "e": 1, "f": 2}


def synthesize_cavity_response(
    system: SystemSpec,
    pump: PumpSpec,
    qubit_state: str,
    probe: np.ndarray,
    phi=None,
    weight_floor: float = 0.01,
) -> CavityResponse:
    """Weighted-Lorentzian surrogate for the feedline transmission.

    S(w) = 1 - sum_j w_j (kappa/2) / (i (w - w_j) + kappa/2), where the w_j
    are lab-frame transitions from the dressed initial state that add one
    cavity-like quantum and w_j their normalized cavity participations
    |<psi_j| c† |psi_init>|^2.  The phase of S carries the avoided-crossing
    signatures; a full driven-dissipative solve is deliberately avoided.
    """
    phi = system.static_flux if phi is None else phi
    level = _STATE_LEVEL.get(qubit_state)
    if level is None:
        raise ValueError(f"qubit state must be g, e or f, got {qubit_state!r}")
    mode = system.modes[pump.target]
    qdim, cdim = mode.dim, system.modes["C"].dim
    if level > qdim - 1:
        raise ValueError(f"qubit dim {qdim} cannot host initial state {qubit_state!r}")
    g_p = system.g_parametric(pump.target, phi, pump.delta_phi_p)
    delta_p = pump_detuning(system, pump, phi)
    h = rotating_frame_matrix(mode.anharmonicity, delta_p, g_p, qdim, cdim)
    sol = diagonalize_labeled(h, (qdim, cdim))

    init_idx = sol.labels.index((level, 0))
    psi0 = sol.vectors[:, init_idx]
    e0 = sol.energies[init_idx]
    space = CompositeSpace((qdim, cdim))
    cdag = space.embed(annihilation(cdim), 1).conj().T
    amps = sol.vectors.conj().T @ (cdag @ psi0)
    raw = np.abs(amps) ** 2
    raw[init_idx] = 0.0
    total = raw.sum()
    weights = raw / total
    keep = weights > weight_floor
    # rotating frame -> lab frame: a cavity-like quantum costs omega_C + delta_p
    centers = (sol.energies - e0) + system.omega("C", phi) + delta_p

    probe = np.asarray(probe, dtype=float)
    if not np.any(keep & (centers > probe.min()) & (centers < probe.max())):
        warnings.warn(
            "no transition with weight above threshold falls in the probe window",
            stacklevel=2,
        )
    half = 0.5 * system.kappa
    lor = half / (1j * (probe[:, None] - centers[None, keep]) + half)
    response = 1.0 - lor @ weights[keep]
    return CavityResponse(
        probe=probe,
        response=response,
        centers=centers[keep],
        weights=weights[keep],
        initial_state=qubit_state,
    )


@dataclass
class Branches:
    """Continuously tracked dressed-mode branches across a sweep."""

    energies: np.ndarray    # [branch, sweep point]
    indices: np.ndarray     # eigenstate index backing each branch entry
    ambiguous: np.ndarray   # sweep points where matching was nearly degenerate


def track_modes(solutions: Sequence[EigenSolution], ambiguity_gap: float = 0.05) -> Branches:
    """Assign continuous branches by greedy overlap matching between steps.

    Branches stay continuous through avoided crossings; points where the two
    best overlaps for some branch differ by less than ``ambiguity_gap`` are
    flagged.
    """
    if len(solutions) < 2:
        raise ValueError("tracking needs at least two sweep points")
    npts = len(solutions)
    dim = solutions[0].energies.size
    energies = np.zeros((dim, npts))
    indices = np.zeros((dim, npts), dtype=int)
    ambiguous = np.zeros(npts, dtype=bool)
    energies[:, 0] = solutions[0].energies
    indices[:, 0] = np.arange(dim)
    prev_vectors = solutions[0].vectors
    prev_idx = np.arange(dim)
    for k in range(1, npts):
        overlap = np.abs(prev_vectors.conj().T @ solutions[k].vectors) ** 2
        taken = np.zeros(dim, dtype=bool)
        new_idx = np.zeros(dim, dtype=int)
        for b in range(dim):
            row = overlap[prev_idx[b]].copy()
            row[taken] = -1.0
            j = int(np.argmax(row))
            best = row[j]
            row[j] = -1.0
            if row.max() > best - ambiguity_gap:
                ambiguous[k] = True
            new_idx[b] = j
            taken[j] = True
        indices[:, k] = new_idx
        energies[:, k] = solutions[k].energies[new_idx]
        prev_vectors = solutions[k].vectors
        prev_idx = new_idx
    return Branches(energies=energies, indices=indices, ambiguous=ambiguous)


def fit_crossing_gap(sweep: np.ndarray, upper: np.ndarray, lower: np.ndarray,
                     n_fit: int = 11) -> float:
    """Minimum separation of two tracked branches, refined by a hyperbola fit.

    Fits gap^2 = (x - x0)^2 + 4 g^2 (a parabola in x) through the ``n_fit``
    sweep points nearest the raw minimum and returns 2g.  This mirrors how
    splittings are read off experimentally.
    """
    sweep = np.asarray(sweep, dtype=float)
    gap = np.abs(np.asarray(upper) - np.asarray(lower))
    imin = int(np.argmin(gap))
    if imin in (0, gap.size - 1):
        raise ValueError("gap minimum sits on the sweep boundary: refusing to extrapolate")
    half = n_fit // 2
    lo = max(0, imin - half)
    hi = min(gap.size, lo + n_fit)
    lo = max(0, hi - n_fit)
    x = sweep[lo:hi]
    y = gap[lo:hi] ** 2
    c2, c1, c0 = np.polyfit(x - x[0], y, 2)
    if c2 <= 0:  # degenerate fit; fall back to the raw grid minimum
        return float(gap[imin])
    min_gap_sq = c0 - c1**2 / (4.0 * c2)
    return float(np.sqrt(max(min_gap_sq, 0.0)))


@dataclass
class ShiftCurve:
    """Dispersive shift sampled over pump detuning, with provenance."""

    detunings: np.ndarray
    values: np.ndarray
    flags: np.ndarray
    method: str              # series | diagonalization | floquet
    amplitude: float         # delta_phi_p behind the curve


def shift_curve(
    system: SystemSpec,
    target: str,
    detunings: np.ndarray,
    delta_phi_p: float,
    method: str = "diagonalization",
    phi=None,
) -> ShiftCurve:
    """Sample chi_p over a pump-detuning grid by series or diagonalization."""
    phi = system.static_flux if phi is None else phi
    mode = system.modes[target]
    g_p = system.g_parametric(target, phi, delta_phi_p)
    values = np.zeros(len(detunings))
    flags = np.zeros(len(detunings), dtype=bool)
    for i, dp in enumerate(detunings):
        if method == "series":
            s = chi_parametric_series(g_p, dp, mode.anharmonicity)
        elif method == "diagonalization":
            s = chi_from_matrix(mode.anharmonicity, dp, g_p, mode.dim,
                                system.modes["C"].dim)
        else:
            raise ValueError(f"unknown shift method {method!r}")
        values[i] = s.value
        flags[i] = s.flagged
    return ShiftCurve(np.asarray(detunings, dtype=float), values, flags,
                      method, delta_phi_p)


@dataclass
class ConvergenceReport:
    dims: list
    values: np.ndarray
    deltas: np.ndarray
    converged: bool
    converged_at: Optional[tuple]


def convergence_check(
    system: SystemSpec, pump: PumpSpec, dims_ladder: Sequence[tuple], rel_tol: float = 1e-3
) -> ConvergenceReport:
    """Track chi against a ladder of (qubit_dim, cavity_dim) truncations.

    Converged once the change between successive sizes drops below
    ``rel_tol`` of |chi|.
    """
    if len(dims_ladder) < 3:
        raise ValueError("convergence ladder needs at least three truncation sizes")
    mode = system.modes[pump.target]
    g_p = system.g_parametric(pump.target, system.static_flux, pump.delta_phi_p)
    delta_p = pump_detuning(system, pump)
    values = np.array([
        chi_from_matrix(mode.anharmonicity, delta_p, g_p, qd, cd).value
        for qd, cd in dims_ladder
    ])
    deltas = np.abs(np.diff(values))
    scale = np.abs(values[-1])
    converged_at = None
    if scale == 0.0:
        converged = bool(np.all(deltas == 0.0))
        converged_at = tuple(dims_ladder[1]) if converged else None
    else:
        ok = deltas < rel_tol * scale
        converged = bool(ok.any())
        if converged:
            converged_at = tuple(dims_ladder[int(np.argmax(ok)) + 1])
    return ConvergenceReport(list(dims_ladder), values, deltas, converged, converged_at)
