"""Command-line front end: config ingestion, sweep orchestration, CSV and
figure emission, and the acceptance-suite runner.

Subcommands: spectrum | chi-sweep | fluxmap | dephasing | calibrate |
floquet-check | acceptance.  Every CSV is deterministic given (config, seed):
sweeps run as index-ordered tasks and are merged by grid position, so output
bytes do not depend on --jobs.  Exit codes: 0 success, 1 config error,
2 numerical-tolerance failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import GHZ, MHZ, to_ghz, to_mhz
from .config import (
    ConfigError,
    SystemConfig,
    load_config,
    paper_defaults,
    serialize_config,
)
from .measurement import (
    calibrate_pump,
    chi_from_dephasing_slope,
    corrected_amplitudes,
    dephasing_rate,
    linear_fit,
    ramsey_t2,
    time_averaged_frequency,
)
from .model import PumpSpec, flux_derivative, pump_detuning
from .parametric import chi_parametric_series, chi_static
from .spectra import (
    chi_from_matrix,
    fit_crossing_gap,
    synthesize_cavity_response,
)

FLOQUET_TOLERANCE = 0.10


class ToleranceError(RuntimeError):
    """A validation run exceeded its numerical tolerance."""


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _parallel_map(fn, items, jobs):
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _pump_for(system, cfg: SystemConfig, target, delta_p, amplitude_mv, transfer):
    delta_phi = amplitude_mv * transfer(system.omega("C") - system.omega(target) + delta_p)
    omega_p = system.omega("C") - system.omega(target) + delta_p
    return PumpSpec(target, omega_p, delta_phi, instrument_amplitude=amplitude_mv)


# ----------------------------------------------------------------- spectrum

def cmd_spectrum(cfg: SystemConfig, args) -> int:
    system = cfg.build_system()
    transfer = cfg.transfer.build()
    target = cfg.pump.target
    detunings = np.linspace(args.dp_min_mhz, args.dp_max_mhz, args.dp_points) * MHZ
    omega_c = system.omega("C")
    probe = omega_c + np.linspace(-args.probe_span_mhz, args.probe_span_mhz,
                                  args.probe_points) * MHZ
    outdir = Path(args.out)
    written = []
    for state in args.states.split(","):
        state = state.strip()

        def row(dp, state=state):
            pump = _pump_for(system, cfg, target, dp, args.amplitude_mv, transfer)
            resp = synthesize_cavity_response(system, pump, state, probe)
            return pump.omega_p, resp.response

        results = _parallel_map(row, detunings, args.jobs)
        rows = []
        for omega_p, response in results:
            for w, s in zip(probe, response):
                rows.append((to_ghz(omega_p), to_ghz(w), s.real, s.imag, np.angle(s)))
        path = write_csv(
            outdir / f"spectrum_{state}.csv",
            ["pump_freq_ghz", "probe_freq_ghz", "re", "im", "phase_rad"],
            rows,
        )
        written.append(path)
        if args.plot:
            from . import plots

            plots.plot_spectrum(path)
    print("wrote " + ", ".join(str(p) for p in written))
    return 0


# ---------------------------------------------------------------- chi-sweep

def _fit_gp_from_crossing(system, cfg, target, amplitude_mv, transfer, jobs):
    """Extract 2g_p from the state-g avoided crossing at delta_p = 0."""
    window = np.linspace(-15.0, 15.0, 41) * MHZ
    probe = system.omega("C") + np.linspace(-80.0, 80.0, 9) * MHZ

    def centers(dp):
        pump = _pump_for(system, cfg, target, dp, amplitude_mv, transfer)
        resp = synthesize_cavity_response(system, pump, "g", probe, weight_floor=1e-4)
        order = np.argsort(resp.weights)[::-1]
        two = np.sort(resp.centers[order[:2]])
        return two

    pairs = _parallel_map(centers, window, jobs)
    lower = np.array([p[0] for p in pairs])
    upper = np.array([p[1] for p in pairs])
    return fit_crossing_gap(window, upper, lower)


def cmd_chi_sweep(cfg: SystemConfig, args) -> int:
    system = cfg.build_system()
    transfer = cfg.transfer.build()
    target = cfg.pump.target
    mode = system.modes[target]
    alpha = mode.anharmonicity
    detunings = np.linspace(args.dp_min_mhz, args.dp_max_mhz, args.dp_points) * MHZ
    amplitudes = cfg.pump.amplitudes_mv

    rows = []
    for amp in amplitudes:
        def entry(dp, amp=amp):
            pump = _pump_for(system, cfg, target, dp, amp, transfer)
            g_p = system.g_parametric(target, system.static_flux, pump.delta_phi_p)
            series = chi_parametric_series(g_p, dp, alpha)
            diag = chi_from_matrix(alpha, dp, g_p, mode.dim, system.modes["C"].dim)
            return (to_ghz(dp), to_mhz(series.value), to_mhz(diag.value),
                    series.flagged or diag.flagged, amp)

        rows.extend(_parallel_map(entry, detunings, args.jobs))
    outdir = Path(args.out)
    sweep_path = write_csv(
        outdir / "chi_sweep.csv",
        ["delta_p_ghz", "chi_series_mhz", "chi_diag_mhz", "flagged", "amplitude_mv"],
        rows,
    )

    gp_rows = []
    for amp in amplitudes:
        gap = _fit_gp_from_crossing(system, cfg, target, amp, transfer, args.jobs)
        gp_rows.append((amp, amp * transfer(system.omega("C") - system.omega(target)),
                        to_mhz(gap / 2.0)))
    gp_path = write_csv(
        outdir / "gp_vs_amplitude.csv",
        ["amplitude_mv", "delta_phi_p", "g_p_mhz"],
        gp_rows,
    )
    fit = linear_fit([r[0] for r in gp_rows], [r[2] for r in gp_rows])
    fit_path = write_csv(
        outdir / "gp_linear_fit.csv",
        ["slope_mhz_per_mv", "intercept_mhz", "r_squared"],
        [(fit.slope, fit.intercept, fit.r_squared)],
    )
    if args.plot:
        from . import plots

        plots.plot_chi_sweep(sweep_path)
        plots.plot_gp_linearity(gp_path)
    print(f"wrote {sweep_path}, {gp_path}, {fit_path}")
    return 0


# ------------------------------------------------------------------ fluxmap

def cmd_fluxmap(cfg: SystemConfig, args) -> int:
    system = cfg.build_system()
    phis = np.linspace(args.phi_min, args.phi_max, args.phi_points)
    rows = []
    for phi in phis:
        om = {lb: system.omega(lb, phi) for lb in ("L", "R", "C")}
        row = [phi, to_ghz(om["L"]), to_ghz(om["R"]), to_ghz(om["C"])]
        for lb in ("L", "R"):
            row.append(to_mhz(system.coupler.g_static(lb, phi)))
        for lb in ("L", "R"):
            chi = chi_static(
                system.coupler.g_static(lb, phi),
                om[lb] - om["C"],
                system.modes[lb].anharmonicity,
            )
            row.append(to_mhz(chi.value))
        for lb in ("L", "R", "C"):
            row.append(to_ghz(flux_derivative(system.modes[lb].flux_model, phi)))
        rows.append(tuple(row))
    path = write_csv(
        Path(args.out) / "fluxmap.csv",
        ["phi", "omega_l_ghz", "omega_r_ghz", "omega_c_ghz",
         "g_sl_mhz", "g_sr_mhz", "chi_sl_mhz", "chi_sr_mhz",
         "domega_l_dphi_ghz", "domega_r_dphi_ghz", "domega_c_dphi_ghz"],
        rows,
    )
    if args.plot:
        from . import plots

        plots.plot_fluxmap(path)
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------- dephasing

def cmd_dephasing(cfg: SystemConfig, args) -> int:
    system = cfg.build_system()
    coherence = cfg.noise.build()
    target = cfg.pump.target
    mode = system.modes[target]
    phis = np.linspace(args.phi_min, args.phi_max, args.phi_points)
    nbars = [float(v) for v in args.nbar.split(",")]
    rows = []
    for phi in phis:
        chi = chi_static(
            system.coupler.g_static(target, phi),
            system.detuning(target, phi),
            mode.anharmonicity,
        ).value
        # round-trip: recover chi from the modeled Gamma(nbar) slope
        probe_nbars = np.array([0.5, 1.0, 2.0])
        gammas = [dephasing_rate(nb, system.kappa, chi) for nb in probe_nbars]
        slope = linear_fit(probe_nbars, gammas).slope
        chi_rt = chi_from_dephasing_slope(slope, system.kappa).value
        for nbar in nbars:
            gamma = dephasing_rate(nbar, system.kappa, chi)
            t2 = ramsey_t2(phi, coherence, mode.flux_model, nbar, system.kappa, chi)
            rows.append((phi, nbar, to_mhz(gamma), 1e-3 * t2,
                         to_mhz(abs(chi)), to_mhz(chi_rt)))
    path = write_csv(
        Path(args.out) / "dephasing.csv",
        ["phi", "nbar", "gamma_n_mhz", "t2_us", "chi_s_mhz", "chi_extracted_mhz"],
        rows,
    )
    if args.plot:
        from . import plots

        plots.plot_dephasing(path)
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------- calibrate

def cmd_calibrate(cfg: SystemConfig, args) -> int:
    system = cfg.build_system()
    transfer = cfg.transfer.build()
    target = cfg.pump.target
    flux_model = system.modes[target].flux_model
    freqs = np.linspace(args.fmin_ghz, args.fmax_ghz, args.points) * GHZ
    table = calibrate_pump(
        transfer,
        flux_model,
        args.phi_s,
        freqs,
        lambda0=1.0,
        anchor_freq=args.anchor_ghz * GHZ,
        base_amplitude=args.amplitude_mv,
    )
    corrected = corrected_amplitudes(table, transfer, base_amplitude=args.amplitude_mv)
    omega0 = flux_model.omega(args.phi_s)
    shifts_after = np.array([
        time_averaged_frequency(flux_model, args.phi_s, a) - omega0 for a in corrected
    ])
    rows = [
        (to_ghz(f), to_mhz(dw), lam, to_mhz(dwa), bool(exc))
        for f, dw, lam, dwa, exc in zip(
            table.pump_freqs, table.shifts, table.lam, shifts_after, table.excluded
        )
    ]
    path = write_csv(
        Path(args.out) / "calibration.csv",
        ["omega_p_ghz", "delta_omega_mhz", "lambda", "delta_omega_corrected_mhz", "excluded"],
        rows,
    )
    def flatness(x):
        return float(np.ptp(x) / np.max(np.abs(x)))

    summary = write_csv(
        Path(args.out) / "calibration_summary.csv",
        ["flatness_before", "flatness_after", "anchor_ghz", "lambda0"],
        [(flatness(table.shifts), flatness(shifts_after), to_ghz(table.anchor_freq),
          table.lambda0)],
    )
    if args.plot:
        from . import plots

        plots.plot_calibration(path)
    print(f"wrote {path}, {summary}")
    return 0


# ------------------------------------------------------------ floquet-check

def cmd_floquet_check(cfg: SystemConfig, args) -> int:
    from .config import CouplerConfig
    from .floquet import floquet_chi

    # validation runs at exact cancellation: zero static floor, pure
    # sinusoidal coupling, so chi_floquet compares directly against chi_p
    coupler = CouplerConfig(
        cancellation_flux=cfg.coupler.cancellation_flux,
        static_slope_ghz=cfg.coupler.static_slope_ghz,
        g_min_mhz={"L": 0.0, "R": 0.0},
        pump_scale=cfg.coupler.pump_scale,
    )
    cfg = SystemConfig(
        modes=cfg.modes, coupler=coupler, kappa_mhz=cfg.kappa_mhz,
        static_flux=cfg.coupler.cancellation_flux, pump=cfg.pump,
        transfer=cfg.transfer, noise=cfg.noise,
    )
    system = cfg.build_system()
    transfer = cfg.transfer.build()
    target = cfg.pump.target
    mode = system.modes[target]
    detunings = np.array([float(v) for v in args.dp_mhz.split(",")]) * MHZ

    def entry(dp):
        pump = _pump_for(system, cfg, target, dp, args.amplitude_mv, transfer)
        g_p = system.g_parametric(target, system.static_flux, pump.delta_phi_p)
        series = chi_parametric_series(g_p, dp, mode.anharmonicity)
        diag = chi_from_matrix(mode.anharmonicity, dp, g_p, mode.dim,
                               system.modes["C"].dim)
        floq = floquet_chi(system, pump, steps=args.steps)
        dev_sd = abs(series.value - diag.value) / abs(diag.value)
        dev_fd = abs(floq.shift.value - diag.value) / abs(diag.value)
        return (to_ghz(dp), to_mhz(series.value), to_mhz(diag.value),
                to_mhz(floq.shift.value), dev_sd, dev_fd)

    rows = _parallel_map(entry, detunings, args.jobs)
    path = write_csv(
        Path(args.out) / "floquet_check.csv",
        ["delta_p_ghz", "chi_series_mhz", "chi_diag_mhz", "chi_floquet_mhz",
         "dev_series_diag", "dev_floquet_diag"],
        rows,
    )
    if args.plot:
        from . import plots

        plots.plot_floquet_check(path)
    print(f"wrote {path}")
    worst = max(r[5] for r in rows)
    if worst > FLOQUET_TOLERANCE:
        raise ToleranceError(
            f"Floquet vs diagonalization deviation {worst:.3f} exceeds "
            f"{FLOQUET_TOLERANCE:.2f}"
        )
    return 0


# --------------------------------------------------------------- acceptance

def cmd_acceptance(cfg: SystemConfig, args) -> int:
    from .acceptance import run_acceptance

    results = run_acceptance(jobs=args.jobs, seed=args.seed, out_dir=args.out)
    rows = []
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'}  criterion {res.number:2d}  "
              f"{res.name}: {res.detail}")
        rows.append((res.number, res.name, res.passed, res.detail))
    write_csv(
        Path(args.out) / "acceptance_report.csv",
        ["criterion", "name", "passed", "detail"],
        [(n, name, ok, detail.replace(",", ";")) for n, name, ok, detail in rows],
    )
    if not all(res.passed for res in results):
        raise ToleranceError("acceptance criteria failed")
    return 0


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paramqed",
        description="Parametrically driven multi-qubit cavity QED simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--config", help="system configuration file (INI)")
        group.add_argument("--paper-defaults", action="store_true",
                           help="use the bundled device-parameter defaults")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="parallel workers for grid sweeps")
        p.add_argument("--seed", type=int, default=0, help="seed for generated test data")
        p.add_argument("--plot", action="store_true", help="render SVG figures from the CSVs")

    p = sub.add_parser("spectrum", help="synthesized cavity spectra vs pump frequency")
    common(p)
    p.add_argument("--states", default="g,e,f", help="comma list of initial qubit states")
    p.add_argument("--amplitude-mv", type=float, default=300.0)
    p.add_argument("--dp-min-mhz", type=float, default=-280.0)
    p.add_argument("--dp-max-mhz", type=float, default=560.0)
    p.add_argument("--dp-points", type=int, default=181)
    p.add_argument("--probe-span-mhz", type=float, default=30.0)
    p.add_argument("--probe-points", type=int, default=241)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("chi-sweep", help="dispersive shifts vs pump detuning and amplitude")
    common(p)
    p.add_argument("--dp-min-mhz", type=float, default=-200.0)
    p.add_argument("--dp-max-mhz", type=float, default=500.0)
    p.add_argument("--dp-points", type=int, default=141)
    p.set_defaults(func=cmd_chi_sweep)

    p = sub.add_parser("fluxmap", help="mode frequencies and static couplings vs flux")
    common(p)
    p.add_argument("--phi-min", type=float, default=-0.5)
    p.add_argument("--phi-max", type=float, default=0.5)
    p.add_argument("--phi-points", type=int, default=201)
    p.set_defaults(func=cmd_fluxmap)

    p = sub.add_parser("dephasing", help="photon-shot-noise dephasing and T2* predictions")
    common(p)
    p.add_argument("--phi-min", type=float, default=-0.536)
    p.add_argument("--phi-max", type=float, default=-0.236)
    p.add_argument("--phi-points", type=int, default=13)
    p.add_argument("--nbar", default="0,0.5,1,2")
    p.set_defaults(func=cmd_dephasing)

    p = sub.add_parser("calibrate", help="pump-amplitude calibration table")
    common(p)
    p.add_argument("--phi-s", type=float, default=0.0,
                   help="bias for the calibration (must be a modulation extremum)")
    p.add_argument("--fmin-ghz", type=float, default=2.5)
    p.add_argument("--fmax-ghz", type=float, default=3.4)
    p.add_argument("--points", type=int, default=19)
    p.add_argument("--anchor-ghz", type=float, default=3.03)
    p.add_argument("--amplitude-mv", type=float, default=300.0)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("floquet-check", help="cross-validate chi against Floquet numerics")
    common(p)
    p.add_argument("--dp-mhz", default="-50,-60,-70", help="comma list of pump detunings")
    p.add_argument("--amplitude-mv", type=float, default=300.0)
    p.add_argument("--steps", type=int, default=1024)
    p.set_defaults(func=cmd_floquet_check)

    p = sub.add_parser("acceptance", help="run the full acceptance suite")
    common(p)
    p.set_defaults(func=cmd_acceptance)

    p = sub.add_parser("write-config", help="emit the bundled default config file")
    common(p)
    p.set_defaults(func=cmd_write_config)

    return parser


def cmd_write_config(cfg: SystemConfig, args) -> int:
    path = Path(args.out) / "paper_defaults.ini"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_config(cfg), encoding="utf-8")
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            cfg = load_config(args.config)
        else:
            cfg = paper_defaults()
        return args.func(cfg, args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ToleranceError as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
