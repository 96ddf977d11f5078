"""Parametrically driven multi-qubit cavity QED: simulation and analysis.

Angular frequencies are stored internally in rad/ns, i.e. ``omega = 9.4 * GHZ``
is a 9.4 GHz mode.  Time is in ns and flux in units of the flux quantum.
All file interfaces (config, CSV) use plain frequencies: GHz for mode and
pump frequencies, MHz for rates and shifts.
"""

import numpy as np

GHZ = 2.0 * np.pi         # 1 GHz as angular frequency, rad/ns
MHZ = 2.0 * np.pi * 1e-3  # 1 MHz as angular frequency, rad/ns


def to_ghz(omega):
    """Angular frequency (rad/ns) -> plain frequency in GHz."""
    return omega / GHZ


def to_mhz(omega):
    """Angular frequency (rad/ns) -> plain frequency in MHz."""
    return omega / MHZ


__version__ = "0.1.0"

from .hilbert import annihilation, creation, number, embed, check_hermitian  # noqa: E402,F401
from .model import (  # noqa: E402,F401
    MODE_ORDER,
    SquidFluxModel,
    TabulatedFluxModel,
    ModeSpec,
    CouplerSpec,
    PumpSpec,
    SystemSpec,
    flux_derivative,
    lab_hamiltonian,
    rotating_frame_hamiltonian,
    pump_detuning,
)
from .parametric import (  # noqa: E402,F401
    Shift,
    chi_static,
    chi_parametric_series,
    g_p_from_flux,
    classify_regime,
    total_shift,
)
from .spectra import (  # noqa: E402,F401
    diagonalize,
    chi_from_diagonalization,
    synthesize_cavity_response,
    fit_crossing_gap,
    track_modes,
    convergence_check,
)
from .floquet import one_period_propagator, quasienergies, floquet_chi  # noqa: E402,F401
from .measurement import (  # noqa: E402,F401
    dephasing_rate,
    chi_from_dephasing_slope,
    linear_fit,
    purcell_rate,
    ramsey_t2,
    time_averaged_frequency,
    calibrate_pump,
)
