"""Analytic dispersive-shift formulas and regime classification.

The parametric series generalizes the static transmon dispersive shift with
the substitution (g_s, Delta) -> (g_p, Delta_p) and adds one pole term per
higher transmon ladder step, truncated at m_max (default 3, the number of
bracket terms the reference expression carries).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

# Pole guard half-width in units of g: at |Delta_p + m*alpha| = 4g the
# dispersive expansion parameter reaches 0.25 and both the series and the
# dressed-state labels degrade.
GUARD_FACTOR = 4.0

DEFAULT_M_MAX = 3


@dataclass(frozen=True)
class Shift:
    """A dispersive shift with a pole-guard flag."""

    value: float
    flagged: bool = False

    def __float__(self):
        return float(self.value)


def pole_distance(delta: float, alpha: float, m_max: int = DEFAULT_M_MAX) -> float:
    """Distance from delta to the nearest series pole {0, -alpha, ..., -m_max*alpha}."""
    return min(abs(delta + m * alpha) for m in range(m_max + 1))


def in_guard_band(delta: float, alpha: float, g: float, m_max: int = DEFAULT_M_MAX) -> bool:
    return pole_distance(delta, alpha, m_max) < GUARD_FACTOR * abs(g)


def chi_static(g: float, delta: float, alpha: float) -> Shift:
    """Static dispersive strength (g^2/Delta) * alpha / (alpha + Delta).

    Identical, bit for bit, to ``chi_parametric_series`` with m_max = 1 under
    the substitution (g_s, Delta) -> (g_p, Delta_p).
    """
    return chi_parametric_series(g, delta, alpha, m_max=1)


def chi_parametric_series(
    g_p: float, delta_p: float, alpha: float, m_max: int = DEFAULT_M_MAX
) -> Shift:
    """Parametric dispersive shift series with m_max pole terms.

    chi_p = (g_p^2 / Delta_p) [ alpha/(alpha+Delta_p)
                                - Delta_p/(2 alpha + Delta_p) - ... ]

    Terms beyond the first follow -Delta_p/(m alpha + Delta_p) for
    m = 2 .. m_max.  With m_max = 1 this reduces exactly to ``chi_static``
    under (g_s, Delta) -> (g_p, Delta_p).
    """
    if m_max < 1:
        raise ValueError(f"series needs m_max >= 1, got {m_max}")
    if g_p == 0.0:
        return Shift(0.0)
    if pole_distance(delta_p, alpha, m_max) == 0.0:
        return Shift(float("nan"), True)
    flagged = in_guard_band(delta_p, alpha, g_p, m_max)
    bracket = alpha / (alpha + delta_p)
    for m in range(2, m_max + 1):
        bracket -= delta_p / (m * alpha + delta_p)
    return Shift(g_p**2 / delta_p * bracket, flagged)


def g_p_from_flux(system, pump, phi=None) -> float:
    """Parametric coupling from the coupler's slope-product law.

    Returns pump_scale * dphi_p * sqrt(|omega_k'(phi) omega_C'(phi)|);
    zero (with a flat-bias note) when either slope vanishes.
    """
    return system.g_parametric(pump.target, phi, pump.delta_phi_p)


def classify_regime(g: float, delta_p: float, alpha: float) -> str:
    """One of resonant / dispersive / straddling / multiphoton_guard.

    resonant within 4g of the single-photon poles (0 and -alpha);
    multiphoton_guard within 4g of -2 alpha or -3 alpha; straddling for
    alpha < delta_p < 0 away from guards; dispersive otherwise.  The
    classification is scale-invariant under (g, delta_p, alpha) -> s*(...).
    """
    g = abs(g)
    if min(abs(delta_p), abs(delta_p + alpha)) <= GUARD_FACTOR * g:
        return "resonant"
    if min(abs(delta_p + 2 * alpha), abs(delta_p + 3 * alpha)) <= GUARD_FACTOR * g:
        return "multiphoton_guard"
    if alpha < delta_p < 0.0:
        return "straddling"
    return "dispersive"


def total_shift(static: Union[Shift, float], pumps: Iterable[Union[Shift, float]] = ()) -> Shift:
    """Total shift chi_s + sum of per-pump chi_p; flags propagate."""
    parts = [static if isinstance(static, Shift) else Shift(float(static))]
    for p in pumps:
        parts.append(p if isinstance(p, Shift) else Shift(float(p)))
    return Shift(
        float(np.sum([p.value for p in parts])),
        any(p.flagged for p in parts),
    )
