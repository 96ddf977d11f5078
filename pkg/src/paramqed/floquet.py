"""Floquet validation engine.

Evolves the full time-periodic lab-frame Hamiltonian (sinusoidal flux drive
on the pumped qubit-cavity pair) over one pump period, extracts quasi-energies
from the monodromy propagator, and compares dispersive shifts against the
excitation-conserving rotating-frame model.  This path validates the RWA; it
never feeds the primary CLI outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MODE_ORDER, PumpSpec, SystemSpec, lab_hamiltonian
from .parametric import Shift

DEFAULT_STEPS = 1024
AMPLITUDE_STEPS = 10
UNITARITY_HARD = 1e-6
TRACK_OVERLAP_MIN = 0.5


@dataclass(frozen=True)
class PeriodicHamiltonian:
    """H(t) = lab Hamiltonian at phi(t) = phi_s + dphi_p sin(omega_p t).

    Periodic with T = 2 pi / omega_p by construction.  The spectator
    transmon is excluded (single-pump model).
    """

    system: SystemSpec
    pump: PumpSpec

    @property
    def labels(self) -> tuple:
        return tuple(lb for lb in MODE_ORDER if lb in (self.pump.target, "C"))

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.pump.omega_p

    def phi(self, t):
        return self.system.static_flux + self.pump.delta_phi_p * np.sin(self.pump.omega_p * t)

    def h(self, t) -> np.ndarray:
        return lab_hamiltonian(self.system, self.phi(t), self.labels)


def _expm_herm(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i h dt) through the eigendecomposition; unitary to round-off."""
    e, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * e * dt)) @ v.conj().T


def one_period_propagator(ph, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Monodromy operator U(T) by piecewise-constant midpoint exponentiation.

    ``ph`` needs only a ``period`` and an ``h(t)`` returning a Hermitian
    matrix; any time-periodic Hamiltonian works.
    """
    if steps < 256:
        raise ValueError(f"need at least 256 steps per period, got {steps}")
    dt = ph.period / steps
    times = (np.arange(steps) + 0.5) * dt
    dim = ph.h(0.0).shape[0]
    u = np.eye(dim, dtype=complex)
    for t in times:
        u = _expm_herm(ph.h(t), dt) @ u
    residual = np.linalg.norm(u.conj().T @ u - np.eye(dim))
    if residual > UNITARITY_HARD:
        raise RuntimeError(
            f"propagator unitarity residual {residual:.2e} exceeds {UNITARITY_HARD:.0e}; "
            f"retry with at least {2 * steps} steps"
        )
    return u


def fold(eps, omega_p: float):
    """Fold quasi-energies into (-omega_p/2, omega_p/2]; idempotent."""
    folded = np.mod(np.asarray(eps) + 0.5 * omega_p, omega_p) - 0.5 * omega_p
    return np.where(folded == -0.5 * omega_p, 0.5 * omega_p, folded)


@dataclass
class QuasiEnergySpectrum:
    """Quasi-energies (folded) and Floquet eigenvectors at t = 0."""

    energies: np.ndarray
    vectors: np.ndarray
    omega_p: float


def quasienergies(u: np.ndarray, period: float) -> QuasiEnergySpectrum:
    """Quasi-energies eps_j = -arg(lambda_j)/T of the monodromy eigenvalues."""
    dim = u.shape[0]
    residual = np.linalg.norm(u.conj().T @ u - np.eye(dim))
    if residual > 1e-9:
        raise ValueError(f"matrix is not unitary to 1e-9 (residual {residual:.2e})")
    lam, vec = np.linalg.eig(u)
    # eigenvalues of a unitary sit on the circle; renormalize against round-off
    lam = lam / np.abs(lam)
    omega_p = 2.0 * np.pi / period
    eps = fold(-np.angle(lam) / period, omega_p)
    vec = vec / np.linalg.norm(vec, axis=0, keepdims=True)
    return QuasiEnergySpectrum(energies=eps, vectors=vec, omega_p=omega_p)


@dataclass
class FloquetChi:
    """Total dispersive shift from quasi-energy branches, with diagnostics."""

    shift: Shift
    branch_energies: dict       # (m, n) -> unfolded quasi-energy at full drive
    min_track_overlap: float


def _tracked_states():
    return [(0, 0), (0, 1), (1, 0), (1, 1)]


def floquet_chi(
    system: SystemSpec,
    pump: PumpSpec,
    steps: int = DEFAULT_STEPS,
    amplitude_steps: int = AMPLITUDE_STEPS,
) -> FloquetChi:
    """Dispersive shift 2chi = [eps(e,1)-eps(e,0)] - [eps(g,1)-eps(g,0)].

    The four branches are identified at zero drive from the static spectrum
    and followed adiabatically in amplitude (geometric ladder up to the target
    dphi_p), unfolding each quasi-energy to the winding of its own branch.
    Floquet eigenvectors rotate far from bare states near multi-photon
    resonances, which is why continuation beats direct overlap labeling.
    """
    ph = PeriodicHamiltonian(system, pump)
    labels = ph.labels
    qdim = system.modes[pump.target].dim
    cdim = system.modes["C"].dim
    if labels[0] == "C":  # pumped qubit must come first for index bookkeeping
        raise RuntimeError("unexpected mode ordering")

    h0 = lab_hamiltonian(system, system.static_flux, labels)
    e0, v0 = np.linalg.eigh(h0)
    vecs = {}
    eps = {}
    min_overlap = 1.0
    for m, n in _tracked_states():
        bare = m * cdim + n
        weights = np.abs(v0[bare, :]) ** 2
        j = int(np.argmax(weights))
        min_overlap = min(min_overlap, float(weights[j]))
        vecs[(m, n)] = v0[:, j]
        eps[(m, n)] = float(e0[j])

    if pump.delta_phi_p > 0.0:
        ratios = 0.5 ** np.arange(amplitude_steps - 1, -1, -1)
        for amp in pump.delta_phi_p * ratios:
            step_pump = PumpSpec(pump.target, pump.omega_p, amp)
            u = one_period_propagator(PeriodicHamiltonian(system, step_pump), steps)
            spec = quasienergies(u, ph.period)
            taken = set()
            for key in _tracked_states():
                ov = np.abs(spec.vectors.conj().T @ vecs[key]) ** 2
                for j in taken:
                    ov[j] = -1.0
                j = int(np.argmax(ov))
                if ov[j] < TRACK_OVERLAP_MIN:
                    return FloquetChi(Shift(np.nan, flagged=True), {}, float(ov[j]))
                min_overlap = min(min_overlap, float(ov[j]))
                taken.add(j)
                winding = np.round((eps[key] - spec.energies[j]) / spec.omega_p)
                eps[key] = float(spec.energies[j] + winding * spec.omega_p)
                vecs[key] = spec.vectors[:, j]

    chi = 0.5 * ((eps[(1, 1)] - eps[(1, 0)]) - (eps[(0, 1)] - eps[(0, 0)]))
    return FloquetChi(Shift(chi), dict(eps), min_overlap)
