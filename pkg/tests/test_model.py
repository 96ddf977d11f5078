import warnings

import numpy as np
import pytest

from paramqed import GHZ, MHZ
from paramqed.hilbert import check_hermitian, embed, number
from paramqed.model import (
    CouplerSpec,
    FlatBiasWarning,
    ModeSpec,
    PumpSpec,
    RegimeError,
    SquidFluxModel,
    SystemSpec,
    TabulatedFluxModel,
    flux_derivative,
    lab_hamiltonian,
    pump_detuning,
    rotating_frame_hamiltonian,
    rotating_frame_matrix,
)


def flat_system(omega_l=5.9, omega_r=6.4, omega_c=9.1, dims=(2, 2, 2),
                slope=1.2, g_min=0.0, phi_c=0.0, alpha_r=-220.0, kappa=10.0):
    """Flux-independent modes (d = 1) keep frequencies pinned for oracles."""
    modes = {
        "L": ModeSpec("L", SquidFluxModel(omega_l * GHZ, 1.0), -180.0 * MHZ, dims[0]),
        "R": ModeSpec("R", SquidFluxModel(omega_r * GHZ, 1.0), alpha_r * MHZ, dims[1]),
        "C": ModeSpec("C", SquidFluxModel(omega_c * GHZ, 1.0), 0.0, dims[2]),
    }
    coupler = CouplerSpec(
        cancellation_flux=phi_c,
        static_slope={"L": slope * GHZ, "R": slope * GHZ},
        g_min={"L": g_min * GHZ, "R": g_min * GHZ},
        pump_scale={"L": 0.25, "R": 0.25},
    )
    return SystemSpec(modes, coupler, kappa * MHZ, phi_c)


def random_system(rng, dims=(3, 3, 3)):
    modes = {}
    for label, dim in zip(("L", "R", "C"), dims):
        if label == "C":
            # cavity stays above both qubits over the whole flux period
            fm = SquidFluxModel(
                rng.uniform(8.5, 10.0) * GHZ, rng.uniform(0.75, 0.9), rng.uniform(-0.3, 0.3)
            )
        else:
            fm = SquidFluxModel(
                rng.uniform(4.0, 6.4) * GHZ, rng.uniform(0.2, 0.9), rng.uniform(-0.3, 0.3)
            )
        alpha = 0.0 if label == "C" else -rng.uniform(120.0, 300.0) * MHZ
        modes[label] = ModeSpec(label, fm, alpha, dim)
    coupler = CouplerSpec(
        cancellation_flux=rng.uniform(-0.4, 0.4),
        static_slope={"L": rng.uniform(0.3, 2.0) * GHZ, "R": rng.uniform(0.3, 2.0) * GHZ},
        g_min={"L": 0.0, "R": rng.uniform(0.0, 0.05) * GHZ},
        pump_scale={"L": rng.uniform(0.05, 0.5), "R": rng.uniform(0.05, 0.5)},
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return SystemSpec(modes, coupler, 10.0 * MHZ, rng.uniform(-0.45, 0.45))


# ------------------------------------------------------------- flux models

def test_squid_law_value():
    fm = SquidFluxModel(9.4 * GHZ, 0.3, 0.0)
    phi = 0.37
    mod = np.cos(np.pi * phi) ** 2 + 0.09 * np.sin(np.pi * phi) ** 2
    assert fm.omega(phi) == pytest.approx(9.4 * GHZ * mod**0.25, rel=1e-14)


def test_flux_laws_periodic():
    models = [
        SquidFluxModel(9.4 * GHZ, 0.3, 0.1),
        TabulatedFluxModel(
            tuple(np.linspace(0.0, 0.95, 20)),
            tuple(6.0 * GHZ + GHZ * np.sin(2 * np.pi * np.linspace(0.0, 0.95, 20))),
        ),
    ]
    for fm in models:
        scale = fm.omega(0.123)
        for phi in (-0.4, 0.0, 0.31, 0.77):
            assert abs(fm.omega(phi + 1.0) - fm.omega(phi)) < 1e-9 * scale


def test_flux_derivative_symmetric_squid_is_flat():
    fm = SquidFluxModel(7.0 * GHZ, 1.0)
    for phi in (-0.3, 0.0, 0.42):
        assert flux_derivative(fm, phi) == pytest.approx(0.0, abs=1e-6)


def test_flux_derivative_zero_at_extremum():
    fm = SquidFluxModel(7.0 * GHZ, 0.4, offset=0.17)
    assert flux_derivative(fm, 0.17) == pytest.approx(0.0, abs=1e-6)


def test_flux_derivative_matches_hand_derived_form():
    # oracle: differentiate omega_max (cos^2 + d^2 sin^2)^(1/4) by hand
    omega_max, d, phi = 9.4 * GHZ, 0.3, 0.25
    u = np.cos(np.pi * phi) ** 2 + d**2 * np.sin(np.pi * phi) ** 2
    du = np.pi * np.sin(2 * np.pi * phi) * (d**2 - 1.0)
    analytic = 0.25 * omega_max * u ** (-0.75) * du
    fd = flux_derivative(SquidFluxModel(omega_max, d), phi)
    assert fd == pytest.approx(analytic, rel=1e-7)


def test_flux_second_derivative_against_cosine():
    pts = np.linspace(0.0, 1.0, 241)[:-1]
    fm = TabulatedFluxModel(tuple(pts), tuple(6 * GHZ + GHZ * np.cos(2 * np.pi * pts)))
    # cos(2 pi phi) second derivative: -(2 pi)^2 cos(2 pi phi)
    got = flux_derivative(fm, 0.21, order=2)
    assert got == pytest.approx(
        -GHZ * (2 * np.pi) ** 2 * np.cos(2 * np.pi * 0.21), rel=1e-4
    )


def test_flux_second_derivative_squid_against_closed_form():
    # oracle: finite difference of the hand-derived first derivative
    omega_max, d, phi = 9.4 * GHZ, 0.3, 0.25
    fm = SquidFluxModel(omega_max, d)

    def dw(p):
        u = np.cos(np.pi * p) ** 2 + d**2 * np.sin(np.pi * p) ** 2
        du = np.pi * np.sin(2 * np.pi * p) * (d**2 - 1.0)
        return 0.25 * omega_max * u ** (-0.75) * du

    h = 1e-4
    oracle = (dw(phi + h) - dw(phi - h)) / (2 * h)  # itself O(h^2) accurate
    assert flux_derivative(fm, phi, order=2) == pytest.approx(oracle, rel=1e-5)


# ------------------------------------------------------------ spec guards

def test_mode_spec_validation():
    fm = SquidFluxModel(6.0 * GHZ, 0.5)
    with pytest.raises(ValueError):
        ModeSpec("R", fm, +100.0 * MHZ, 4)
    with pytest.raises(ValueError):
        ModeSpec("C", fm, -1.0 * MHZ, 4)
    with pytest.raises(ValueError):
        ModeSpec("R", fm, -100.0 * MHZ, 1)


def test_pump_spec_validation_and_warning():
    with pytest.raises(ValueError):
        PumpSpec("C", 2.7 * GHZ, 0.01)
    with pytest.raises(ValueError):
        PumpSpec("R", -1.0, 0.01)
    with pytest.raises(ValueError):
        PumpSpec("R", 2.7 * GHZ, -0.01)
    with pytest.warns(UserWarning):
        PumpSpec("R", 2.7 * GHZ, 0.3)


def test_static_coupling_floor_and_sign():
    sys_ = flat_system(g_min=0.05)
    assert sys_.coupler.g_static("R", 0.0) == pytest.approx(0.05 * GHZ)
    sys0 = flat_system(g_min=0.0)
    before = sys0.coupler.g_static("R", -0.1)
    after = sys0.coupler.g_static("R", +0.1)
    assert before < 0.0 < after


def test_static_coupling_periodic():
    sys_ = flat_system(g_min=0.02)
    for phi in (-0.3, 0.05, 0.4):
        assert sys_.coupler.g_static("R", phi + 1.0) == pytest.approx(
            sys_.coupler.g_static("R", phi), abs=1e-12
        )


def test_parametric_coupling_linear_in_amplitude():
    rng = np.random.default_rng(3)
    sys_ = random_system(rng)
    phi = 0.21
    g1 = sys_.g_parametric("R", phi, 0.004)
    g2 = sys_.g_parametric("R", phi, 0.008)
    assert g2 == 2.0 * g1  # exact: coupling rate times amplitude


def test_parametric_coupling_flat_bias_note():
    sys_ = flat_system()  # d = 1 modes have zero slope everywhere
    with pytest.warns(FlatBiasWarning):
        assert sys_.g_parametric("R", 0.2, 0.01) == 0.0


# ----------------------------------------------------------- Hamiltonians

def test_lab_hamiltonian_uncoupled_degenerate_oscillators():
    omega = 6.0
    sys_ = flat_system(omega_l=omega, omega_r=omega, omega_c=omega, slope=0.0)
    evals = np.linalg.eigvalsh(lab_hamiltonian(sys_, 0.3))
    expected = omega * GHZ * np.array([0, 1, 1, 1, 2, 2, 2, 3])
    np.testing.assert_allclose(evals, expected, atol=1e-9)


def test_lab_hamiltonian_jaynes_cummings_doublet():
    # one qubit + cavity at resonance: one-excitation splitting exactly 2g
    g = 0.01  # GHz
    sys_ = flat_system(omega_r=6.0, omega_c=6.0, slope=1.0, phi_c=0.0)
    h = lab_hamiltonian(sys_, g, labels=("R", "C"))  # phi = g/slope gives g_s = g
    evals = np.linalg.eigvalsh(h)
    one_exc = evals[1:3]
    assert one_exc[1] - one_exc[0] == pytest.approx(2 * g * GHZ, rel=1e-12)


def test_lab_hamiltonian_decoupled_equals_bare_sums():
    cfg_dims = (3, 3, 3)
    sys_ = flat_system(dims=cfg_dims, g_min=0.0, phi_c=-0.386)
    h = lab_hamiltonian(sys_, -0.386)
    evals = np.linalg.eigvalsh(h)
    singles = []
    for label in ("L", "R", "C"):
        mode = sys_.modes[label]
        ns = np.arange(mode.dim)
        singles.append(mode.omega(-0.386) * ns + 0.5 * mode.anharmonicity * ns * (ns - 1))
    sums = sorted(
        a + b + c for a in singles[0] for b in singles[1] for c in singles[2]
    )
    np.testing.assert_allclose(evals, sums, rtol=1e-10)


def test_lab_hamiltonian_label_order_enforced():
    sys_ = flat_system()
    with pytest.raises(ValueError):
        lab_hamiltonian(sys_, 0.0, labels=("C", "R"))
    with pytest.raises(ValueError):
        lab_hamiltonian(sys_, np.inf)


def test_rotating_frame_diagonal_when_uncoupled():
    alpha = -220.0 * MHZ
    dp = 37.0 * MHZ
    h = rotating_frame_matrix(alpha, dp, 0.0, 4, 3)
    assert np.max(np.abs(h - np.diag(np.diag(h)))) == 0.0
    for m in range(4):
        for n in range(3):
            assert h[m * 3 + n, m * 3 + n] == pytest.approx(
                0.5 * alpha * m * (m - 1) - dp * n, rel=1e-14
            )


def test_rotating_frame_resonant_doublet():
    g = 5.0 * MHZ
    h = rotating_frame_matrix(-220.0 * MHZ, 0.0, g, 2, 2)
    evals = np.linalg.eigvalsh(h)
    np.testing.assert_allclose(evals, [-g, 0.0, 0.0, g], atol=1e-12)


def test_rotating_frame_ef_gap_is_sqrt2():
    # two-state reduction with matrix element sqrt(2) g at delta_p = -alpha
    from paramqed.spectra import diagonalize_labeled

    alpha = -220.0 * MHZ
    for g in (abs(alpha) / 40.0, abs(alpha) / 20.0):
        h = rotating_frame_matrix(alpha, -alpha, g, 4, 4)
        sol = diagonalize_labeled(h, (4, 4))
        gap = abs(sol.energy_of((2, 0)) - sol.energy_of((1, 1)))
        assert gap == pytest.approx(2.0 * np.sqrt(2.0) * g, rel=0.01)


def test_rotating_frame_conserves_total_excitation():
    rng = np.random.default_rng(11)
    for _ in range(8):
        qd, cd = rng.integers(2, 6), rng.integers(2, 6)
        h = rotating_frame_matrix(
            -rng.uniform(100, 300) * MHZ,
            rng.uniform(-400, 400) * MHZ,
            rng.uniform(0, 10) * MHZ,
            qd,
            cd,
        )
        n_tot = embed(number(qd), (qd, cd), 0) + embed(number(cd), (qd, cd), 1)
        assert np.linalg.norm(h @ n_tot - n_tot @ h) < 1e-12


def test_hamiltonians_hermitian_over_random_specs():
    rng = np.random.default_rng(5)
    for _ in range(6):
        sys_ = random_system(rng)
        assert check_hermitian(lab_hamiltonian(sys_, rng.uniform(-0.5, 0.5)), 1e-12)
        pump = PumpSpec("R", 2.0 * GHZ + rng.uniform(0, GHZ), 0.005)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert check_hermitian(rotating_frame_hamiltonian(sys_, pump), 1e-12)


def test_rotating_frame_warns_on_large_pump():
    sys_ = flat_system(omega_r=6.4, omega_c=9.1, slope=1.2, alpha_r=-220.0)
    modes = dict(sys_.modes)
    coupler = CouplerSpec(0.0, {"L": 1.2 * GHZ, "R": 1.2 * GHZ},
                          {"L": 0.0, "R": 0.0}, {"L": 40.0, "R": 40.0})
    strong = SystemSpec(modes, coupler, 10.0 * MHZ, 0.2)
    # make slopes finite: swap in a tunable qubit and cavity
    modes2 = {
        "L": modes["L"],
        "R": ModeSpec("R", SquidFluxModel(6.4 * GHZ, 0.5), -220.0 * MHZ, 3),
        "C": ModeSpec("C", SquidFluxModel(9.4 * GHZ, 0.5), 0.0, 3),
    }
    strong = SystemSpec(modes2, coupler, 10.0 * MHZ, 0.2)
    pump = PumpSpec("R", strong.omega("C") - strong.omega("R"), 0.05)
    with pytest.warns(UserWarning, match="perturbative"):
        rotating_frame_hamiltonian(strong, pump)


# ----------------------------------------------------------- pump detuning

def test_pump_detuning_resonance_condition():
    sys_ = flat_system(omega_r=6.4, omega_c=9.1)  # |Delta_R| = 2.7 GHz
    pump = PumpSpec("R", 2.7 * GHZ, 0.005)
    assert pump_detuning(sys_, pump) == pytest.approx(0.0, abs=1e-9)


def test_pump_detuning_ef_condition():
    sys_ = flat_system(omega_r=6.4, omega_c=9.1, alpha_r=-220.0)
    pump = PumpSpec("R", 2.7 * GHZ + 220.0 * MHZ, 0.005)
    assert pump_detuning(sys_, pump) == pytest.approx(220.0 * MHZ, rel=1e-12)


def test_pump_detuning_arithmetic():
    sys_ = flat_system(omega_r=6.4, omega_c=9.1)
    pump = PumpSpec("R", 0.9 * 2.7 * GHZ, 0.005)
    assert pump_detuning(sys_, pump) == pytest.approx(-0.1 * 2.7 * GHZ, rel=1e-12)


def test_pump_detuning_rejects_inverted_regime():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sys_ = flat_system(omega_r=9.5, omega_c=9.1)
    pump = PumpSpec("R", 2.7 * GHZ, 0.005)
    with pytest.raises(RegimeError):
        pump_detuning(sys_, pump)
