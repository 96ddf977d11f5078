"""Physical system description and Hamiltonian construction.

Flux-dependent mode frequencies, the coupler laws g_s(phi) / g_p(phi, dphi_p),
pump specification, and builders for the lab-frame and pump-rotating-frame
Hamiltonians.  All specs are immutable after construction; the builders are
pure functions and safe for concurrent sweep evaluation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .hilbert import CompositeSpace, annihilation, number

MODE_ORDER = ("L", "R", "C")

# finite-difference step for flux derivatives, in flux quanta
_FD_STEP = 1e-5


class RegimeError(ValueError):
    """Operating point is outside the modeled regime."""


class FlatBiasWarning(UserWarning):
    """Parametric coupling vanishes because a mode slope is zero at this bias."""


@dataclass(frozen=True)
class SquidFluxModel:
    """SQUID-like modulation curve, 1-periodic in the reduced flux.

    omega(phi) = omega_max * (cos^2(pi*(phi-offset)) + d^2 sin^2(...))^(1/4)
    """

    omega_max: float
    asymmetry: float
    offset: float = 0.0

    def __post_init__(self):
        if self.omega_max <= 0:
            raise ValueError(f"omega_max must be positive, got {self.omega_max}")
        if not 0.0 <= self.asymmetry <= 1.0:
            raise ValueError(f"asymmetry must lie in [0, 1], got {self.asymmetry}")

    def omega(self, phi):
        x = np.pi * (np.asarray(phi, dtype=float) - self.offset)
        mod = np.cos(x) ** 2 + self.asymmetry**2 * np.sin(x) ** 2
        out = self.omega_max * mod**0.25
        return float(out) if np.isscalar(phi) else out


@dataclass(frozen=True)
class TabulatedFluxModel:
    """Flux law from sampled points on [0, 1), cubic interpolation, periodic."""

    phi_samples: tuple
    omega_samples: tuple
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        phi = np.asarray(self.phi_samples, dtype=float)
        om = np.asarray(self.omega_samples, dtype=float)
        if phi.ndim != 1 or phi.size < 4 or phi.size != om.size:
            raise ValueError("tabulated flux law needs >= 4 matched (phi, omega) samples")
        if np.any(np.diff(phi) <= 0):
            raise ValueError("phi samples must be strictly increasing")
        if np.any(om <= 0):
            raise ValueError("omega samples must all be positive")
        # close the period so omega(phi+1) == omega(phi) by construction
        phi_ext = np.append(phi, phi[0] + 1.0)
        om_ext = np.append(om, om[0])
        object.__setattr__(
            self, "_spline", CubicSpline(phi_ext, om_ext, bc_type="periodic")
        )

    def omega(self, phi):
        phi0 = self.phi_samples[0]
        wrapped = (np.asarray(phi, dtype=float) - phi0) % 1.0 + phi0
        out = self._spline(wrapped)
        return float(out) if np.isscalar(phi) else out


def flux_derivative(flux_model, phi: float, order: int = 1) -> float:
    """d^n omega / d phi^n by central differences, one Richardson step.

    Step h = 1e-5 flux quanta balances truncation against round-off for
    GHz-scale curvatures.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    f = flux_model.omega

    if order == 1:
        def diff(h):
            return (f(phi + h) - f(phi - h)) / (2.0 * h)
    else:
        def diff(h):
            return (f(phi + h) - 2.0 * f(phi) + f(phi - h)) / h**2

    h = _FD_STEP
    return (4.0 * diff(h / 2.0) - diff(h)) / 3.0


@dataclass(frozen=True)
class ModeSpec:
    """One resonant mode: flux law, anharmonicity (rad/ns), truncation dim."""

    label: str
    flux_model: object
    anharmonicity: float
    dim: int

    def __post_init__(self):
        if self.label not in MODE_ORDER:
            raise ValueError(f"mode label must be one of {MODE_ORDER}, got {self.label!r}")
        if self.dim < 2:
            raise ValueError(f"mode {self.label}: truncation dim must be >= 2")
        if self.label == "C":
            if self.anharmonicity != 0.0:
                raise ValueError("cavity mode must have zero anharmonicity")
        elif self.anharmonicity >= 0.0:
            raise ValueError(
                f"transmon {self.label} needs negative anharmonicity, "
                f"got {self.anharmonicity}"
            )

    def omega(self, phi):
        return self.flux_model.omega(phi)


@dataclass(frozen=True)
class CouplerSpec:
    """Shared-SQUID coupler laws, parameterized rather than circuit-derived.

    static coupling   g_s,k(phi) = s_k (phi - phi_c), magnitude floored at g_min,k
    parametric        g_p,k      = c_k dphi_p sqrt(|omega_k' omega_C'|)
    """

    cancellation_flux: float
    static_slope: Mapping[str, float]
    g_min: Mapping[str, float]
    pump_scale: Mapping[str, float]

    def __post_init__(self):
        for name, table in (
            ("static_slope", self.static_slope),
            ("g_min", self.g_min),
            ("pump_scale", self.pump_scale),
        ):
            missing = {"L", "R"} - set(table)
            if missing:
                raise ValueError(f"coupler {name} missing qubit entries {sorted(missing)}")
        if any(v < 0 for v in self.g_min.values()):
            raise ValueError("g_min floors must be >= 0")

    def g_static(self, label: str, phi) -> float:
        # displacement wrapped to [-1/2, 1/2): the coupler is flux-periodic,
        # the linear law is its local expansion around the cancellation bias
        disp = np.asarray(phi, dtype=float) - self.cancellation_flux
        disp = np.mod(disp + 0.5, 1.0) - 0.5
        raw = self.static_slope[label] * disp
        floor = self.g_min[label]
        sign = np.where(raw >= 0.0, 1.0, -1.0)
        out = sign * np.maximum(np.abs(raw), floor)
        return float(out) if np.isscalar(phi) else out


@dataclass(frozen=True)
class PumpSpec:
    """Parametric flux drive on one qubit: phi(t) = phi_s + dphi_p sin(omega_p t)."""

    target: str
    omega_p: float
    delta_phi_p: float
    instrument_amplitude: Optional[float] = None  # mV, mapped via transfer curve

    def __post_init__(self):
        if self.target not in ("L", "R"):
            raise ValueError(f"pump target must be 'L' or 'R', got {self.target!r}")
        if self.omega_p <= 0:
            raise ValueError("pump frequency must be positive")
        if self.delta_phi_p < 0:
            raise ValueError("flux-modulation amplitude must be >= 0")
        if self.delta_phi_p > 0.1:
            warnings.warn(
                f"delta_phi_p = {self.delta_phi_p:.3g} is not small against a flux "
                "quantum; the modulation expansion degrades",
                stacklevel=2,
            )

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega_p


@dataclass(frozen=True)
class SystemSpec:
    """Three-mode system (L, R transmons + cavity C) with shared coupler."""

    modes: Mapping[str, ModeSpec]
    coupler: CouplerSpec
    kappa: float
    static_flux: float

    def __post_init__(self):
        missing = set(MODE_ORDER) - set(self.modes)
        if missing:
            raise ValueError(f"system is missing modes {sorted(missing)}")
        for label, mode in self.modes.items():
            if mode.label != label:
                raise ValueError(f"mode keyed {label!r} carries label {mode.label!r}")
        if self.kappa <= 0:
            raise ValueError("cavity linewidth kappa must be positive")
        # dispersive-formula validity is a soft check, not an error
        for label in ("L", "R"):
            gs = abs(self.coupler.g_static(label, self.static_flux))
            det = abs(self.detuning(label, self.static_flux))
            if gs > 0 and det < 10.0 * gs:
                warnings.warn(
                    f"|Delta_{label}| = {det:.3g} is not large against "
                    f"g_s = {gs:.3g} at the static bias; dispersive formulas degrade",
                    stacklevel=2,
                )

    def omega(self, label: str, phi=None) -> float:
        phi = self.static_flux if phi is None else phi
        return self.modes[label].omega(phi)

    def detuning(self, label: str, phi=None) -> float:
        """Delta_k = omega_k - omega_C (negative in the modeled regime)."""
        phi = self.static_flux if phi is None else phi
        return self.omega(label, phi) - self.omega("C", phi)

    def g_parametric(self, label: str, phi=None, delta_phi_p: float = 0.0) -> float:
        """Slope-product coupling law; vanishes where either slope vanishes."""
        phi = self.static_flux if phi is None else phi
        dq = flux_derivative(self.modes[label].flux_model, phi)
        dc = flux_derivative(self.modes["C"].flux_model, phi)
        if dq == 0.0 or dc == 0.0:
            warnings.warn(
                f"flux slope of {'mode ' + label if dq == 0.0 else 'cavity'} vanishes "
                f"at phi = {phi:.4g}: parametric coupling is zero at this bias",
                FlatBiasWarning,
                stacklevel=2,
            )
            return 0.0
        return self.pump_coupling_rate(label, phi) * delta_phi_p

    def pump_coupling_rate(self, label: str, phi=None) -> float:
        """dg_p / d(dphi_p) at the given bias: c_k sqrt(|omega_k' omega_C'|)."""
        phi = self.static_flux if phi is None else phi
        dq = flux_derivative(self.modes[label].flux_model, phi)
        dc = flux_derivative(self.modes["C"].flux_model, phi)
        return self.coupler.pump_scale[label] * np.sqrt(abs(dq * dc))

    def space(self, labels=MODE_ORDER) -> CompositeSpace:
        return CompositeSpace(tuple(self.modes[lb].dim for lb in labels))


def lab_hamiltonian(system: SystemSpec, phi: float, labels=MODE_ORDER) -> np.ndarray:
    """Lab-frame Hamiltonian on the composite space in fixed (L, R, C) order.

    H = sum_k [omega_k n_k + (alpha_k/2) n_k (n_k - 1)] + omega_C n_C
        + sum_k g_s,k(phi) (q_k + q_k†)(c + c†)

    ``labels`` may restrict the tensor factors (e.g. one qubit plus cavity);
    ordering must follow the global (L, R, C) convention.
    """
    if not np.isfinite(phi):
        raise ValueError("flux bias must be finite")
    labels = tuple(labels)
    if labels != tuple(lb for lb in MODE_ORDER if lb in labels):
        raise ValueError(f"mode labels must follow the {MODE_ORDER} ordering, got {labels}")
    space = system.space(labels)
    dim = space.total_dim
    h = np.zeros((dim, dim), dtype=complex)
    for slot, lb in enumerate(labels):
        mode = system.modes[lb]
        n = number(mode.dim)
        local = mode.omega(phi) * n
        if mode.anharmonicity != 0.0:
            local = local + 0.5 * mode.anharmonicity * n @ (n - np.eye(mode.dim))
        h += space.embed(local, slot)
    if "C" in labels:
        cslot = labels.index("C")
        xc = space.embed(annihilation(system.modes["C"].dim), cslot)
        xc = xc + xc.conj().T
        for slot, lb in enumerate(labels):
            if lb == "C":
                continue
            xq = space.embed(annihilation(system.modes[lb].dim), slot)
            h += system.coupler.g_static(lb, phi) * (xq + xq.conj().T) @ xc
    return h


def rotating_frame_matrix(
    alpha: float, delta_p: float, g_p: float, qubit_dim: int, cavity_dim: int
) -> np.ndarray:
    """Excitation-conserving pump-frame Hamiltonian on qubit x cavity.

    H_rot = (alpha/2) n_q (n_q - 1) - delta_p n_C + g_p (q c† + q† c)

    The cavity sign - delta_p n_C places the |e,0>/|g,1> degeneracy at
    delta_p = 0 and |f,0>/|e,1> at delta_p = -alpha.
    """
    space = CompositeSpace((qubit_dim, cavity_dim))
    q = space.embed(annihilation(qubit_dim), 0)
    c = space.embed(annihilation(cavity_dim), 1)
    nq = q.conj().T @ q
    nc = c.conj().T @ c
    eye = np.eye(space.total_dim)
    return (
        0.5 * alpha * nq @ (nq - eye)
        - delta_p * nc
        + g_p * (q @ c.conj().T + q.conj().T @ c)
    )


def pump_detuning(system: SystemSpec, pump: PumpSpec, phi=None) -> float:
    """Delta_p,k = omega_p - (omega_C - omega_k) at the given bias.

    Only the qubit-below-cavity regime is modeled.
    """
    phi = system.static_flux if phi is None else phi
    gap = system.omega("C", phi) - system.omega(pump.target, phi)
    if gap <= 0:
        raise RegimeError(
            f"mode {pump.target} is not below the cavity at phi = {phi:.4g}; "
            "this regime is not modeled"
        )
    return pump.omega_p - gap


def rotating_frame_hamiltonian(system: SystemSpec, pump: PumpSpec, phi=None) -> np.ndarray:
    """Pump-rotating-frame Hamiltonian for the targeted qubit and cavity.

    The spectator transmon is dropped (single-pump model); g_p comes from the
    coupler's slope-product law at the bias and delta_p from ``pump_detuning``.
    """
    phi = system.static_flux if phi is None else phi
    mode = system.modes[pump.target]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FlatBiasWarning)
        g_p = system.g_parametric(pump.target, phi, pump.delta_phi_p)
    if g_p > 0.5 * abs(mode.anharmonicity):
        warnings.warn(
            f"g_p = {g_p:.3g} exceeds |alpha|/2: perturbative dressed-state "
            "labels become unreliable",
            stacklevel=2,
        )
    delta_p = pump_detuning(system, pump, phi)
    return rotating_frame_matrix(
        mode.anharmonicity, delta_p, g_p, mode.dim, system.modes["C"].dim
    )
