"""Measurement-physics models and fitting.

Photon-shot-noise dephasing, Purcell decay, Ramsey coherence composition with
flux noise, inversion of dephasing slopes back to dispersive shifts, and the
pump-amplitude calibration loop built on the flux-window-averaged transmon
frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .model import flux_derivative
from .parametric import Shift


def dephasing_rate(nbar: float, kappa: float, chi: float) -> float:
    """Photon-shot-noise dephasing Gamma_n = 8 nbar kappa chi^2 / (kappa^2 + 4 chi^2).

    Exactly linear in nbar and bounded above by 2 nbar kappa.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return 8.0 * nbar * kappa * chi**2 / (kappa**2 + 4.0 * chi**2)


def chi_from_dephasing_slope(slope: float, kappa: float) -> Shift:
    """Invert dGamma/dnbar = 8 kappa chi^2 / (kappa^2 + 4 chi^2) for |chi|.

    Invertible for slope < 2 kappa (the saturation value); results within 1%
    of saturation are flagged.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if slope < 0:
        raise ValueError("dephasing slope must be >= 0")
    if slope >= 2.0 * kappa:
        raise ValueError(
            f"slope {slope:.4g} is at or beyond the saturation 2*kappa = {2 * kappa:.4g}: "
            "no dispersive shift reproduces it"
        )
    if slope == 0.0:
        return Shift(0.0)
    chi = kappa * np.sqrt(slope / (8.0 * kappa - 4.0 * slope))
    return Shift(float(chi), flagged=slope > 0.99 * 2.0 * kappa)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def linear_fit(x: Sequence[float], y: Sequence[float]) -> LinearFit:
    """Least-squares line; exact on collinear input."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise ValueError("linear fit needs at least three points")
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate x range")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    ss_res = np.sum((y - slope * x - intercept) ** 2)
    ss_tot = np.sum((y - ym) ** 2)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LinearFit(float(slope), float(intercept), float(r2))


def purcell_rate(g: float, delta: float, kappa: float) -> float:
    """Qubit relaxation through the cavity: (g/Delta)^2 kappa."""
    if delta == 0.0:
        raise ValueError("Purcell rate diverges at zero detuning")
    return (g / delta) ** 2 * kappa


@dataclass(frozen=True)
class CoherenceModel:
    """First-order flux-noise dephasing plus a constant residual rate.

    flux_noise_scale multiplies |domega/dphi| (dimensionless); gamma0 is the
    residual rate in rad/ns.  Second-order sweet-spot dephasing is omitted.
    """

    flux_noise_scale: float
    gamma0: float

    def __post_init__(self):
        if self.flux_noise_scale < 0 or self.gamma0 < 0:
            raise ValueError("coherence model rates must be >= 0")


def ramsey_t2(
    phi: float,
    coherence: CoherenceModel,
    flux_model,
    nbar: float,
    kappa: float,
    chi: float,
) -> float:
    """Ramsey dephasing time from flux noise plus photon shot noise.

    1/T2* = gamma0 + A |domega/dphi|(phi) + Gamma_n(nbar, kappa, chi)
    """
    rate = (
        coherence.gamma0
        + coherence.flux_noise_scale * abs(flux_derivative(flux_model, phi))
        + dephasing_rate(nbar, kappa, chi)
    )
    if rate <= 0:
        return np.inf
    return 1.0 / rate


def _adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                      rel_tol: float = 1e-10) -> float:
    """Adaptive Simpson quadrature; the integrands here are smooth and cheap."""
    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if depth >= 40 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    scale = abs(whole) + 1e-300
    return recurse(a, b, fa, fm, fb, whole, rel_tol * scale, 0)


def time_averaged_frequency(flux_model, phi_s: float, delta_phi_p: float) -> float:
    """Flux-window average of the mode frequency under the drive.

    omega_bar = (1/dphi_p) * integral of omega(phi) over
    [phi_s - dphi_p/2, phi_s + dphi_p/2]; to leading order
    omega_bar = omega(phi_s) + omega''(phi_s) dphi_p^2 / 24.
    """
    if not 0.0 <= delta_phi_p < 0.5:
        raise ValueError("flux window must satisfy 0 <= dphi_p < 0.5")
    if delta_phi_p == 0.0:
        return float(flux_model.omega(phi_s))
    lo = phi_s - 0.5 * delta_phi_p
    hi = phi_s + 0.5 * delta_phi_p
    return _adaptive_simpson(flux_model.omega, lo, hi) / delta_phi_p


@dataclass
class CalibrationTable:
    """Frequency-dependent pump-amplitude correction factors.

    lambda_i = lambda0 / sqrt(|delta_omega_i|), normalized so that lambda at
    the anchor frequency equals lambda0; multiplying the drive amplitude by
    lambda_i / lambda0 flattens the modeled shift across the grid.
    """

    pump_freqs: np.ndarray     # rad/ns
    shifts: np.ndarray         # modeled delta_omega_i = omega_bar - omega, rad/ns
    lam: np.ndarray            # correction factors
    lambda0: float
    anchor_freq: float         # rad/ns
    excluded: np.ndarray       # grid points dropped for a vanishing shift


def calibrate_pump(
    transfer: Callable[[float], float],
    flux_model,
    phi_s: float,
    pump_freqs: Sequence[float],
    lambda0: float = 1.0,
    anchor_freq: float = None,
    base_amplitude: float = 0.05,
) -> CalibrationTable:
    """Forward-model the miscalibrated pump and emit correction factors.

    The bias must sit at a modulation extremum (omega' = 0) so the drive
    produces no parametric coupling and the measured frequency shift depends
    only on pump power; the shift then calibrates the frequency-dependent
    instrument-to-flux gain ``transfer``.
    """
    pump_freqs = np.asarray(pump_freqs, dtype=float)
    if pump_freqs.size < 2:
        raise ValueError("calibration needs at least two pump frequencies")
    d1 = flux_derivative(flux_model, phi_s, order=1)
    d2 = flux_derivative(flux_model, phi_s, order=2)
    scale = abs(flux_model.omega(phi_s))
    if abs(d1) > 1e-6 * scale:
        raise ValueError(
            f"phi_s = {phi_s:.4g} is not a modulation extremum (omega' = {d1:.3g}); "
            "parametric coupling would contaminate the calibration"
        )
    if abs(d2) < 1e-9 * scale:
        raise ValueError("omega''(phi_s) vanishes: the shift carries no amplitude signal")
    anchor_freq = float(pump_freqs[pump_freqs.size // 2]) if anchor_freq is None else anchor_freq

    omega0 = flux_model.omega(phi_s)
    shifts = np.array([
        time_averaged_frequency(flux_model, phi_s, base_amplitude * transfer(w)) - omega0
        for w in pump_freqs
    ])
    floor = 1e-6 * np.max(np.abs(shifts))
    excluded = np.abs(shifts) < floor
    if excluded.all():
        raise ValueError("all modeled shifts sit below the numerical floor")

    raw = np.full(pump_freqs.size, np.nan)
    raw[~excluded] = 1.0 / np.sqrt(np.abs(shifts[~excluded]))
    i_anchor = int(np.argmin(np.abs(pump_freqs - anchor_freq)))
    if excluded[i_anchor]:
        raise ValueError("anchor frequency fell on an excluded grid point")
    lam = lambda0 * raw / raw[i_anchor]
    return CalibrationTable(
        pump_freqs=pump_freqs,
        shifts=shifts,
        lam=lam,
        lambda0=lambda0,
        anchor_freq=float(pump_freqs[i_anchor]),
        excluded=excluded,
    )


def corrected_amplitudes(table: CalibrationTable, transfer, base_amplitude: float = 0.05):
    """Flux amplitudes after applying the correction factors to the drive."""
    gains = np.array([transfer(w) for w in table.pump_freqs])
    return base_amplitude * gains * table.lam / table.lambda0
