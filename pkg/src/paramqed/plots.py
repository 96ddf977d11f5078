"""Figure rendering for the CLI report path.

Every plot is derived from an already-emitted CSV, never from in-memory
state, so figures are reproducible from the data products alone.  SVG output;
date metadata is stripped to keep files stable across runs.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "paramqed"

_SAVE_KW = dict(metadata={"Date": None}, bbox_inches="tight")


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return header, data


def _col(header, data, name):
    return data[:, header.index(name)]


def plot_spectrum(csv_path, out_path=None):
    """Phase map of the synthesized cavity spectrum vs pump frequency."""
    header, data = _read_csv(csv_path)
    pump = _col(header, data, "pump_freq_ghz")
    probe = _col(header, data, "probe_freq_ghz")
    phase = _col(header, data, "phase_rad")
    pump_vals = np.unique(pump)
    probe_vals = np.unique(probe)
    grid = phase.reshape(pump_vals.size, probe_vals.size)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    mesh = ax.pcolormesh(pump_vals, probe_vals, grid.T, cmap="twilight", shading="auto")
    fig.colorbar(mesh, ax=ax, label="arg S (rad)")
    ax.set_xlabel(r"pump frequency $\omega_p/2\pi$ (GHz)")
    ax.set_ylabel(r"probe frequency $\omega/2\pi$ (GHz)")
    out = Path(out_path) if out_path else Path(csv_path).with_suffix(".svg")
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def plot_chi_sweep(csv_path, out_path=None):
    header, data = _read_csv(csv_path)
    dp = _col(header, data, "delta_p_ghz") * 1e3
    amps = _col(header, data, "amplitude_mv")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for amp in np.unique(amps):
        sel = amps == amp
        ax.plot(dp[sel], _col(header, data, "chi_diag_mhz")[sel], "-", lw=1.2,
                label=f"{amp:g} mV")
        ax.plot(dp[sel], _col(header, data, "chi_series_mhz")[sel], "--", lw=0.8,
                color=ax.lines[-1].get_color())
    ax.set_xlabel(r"$\Delta_p/2\pi$ (MHz)")
    ax.set_ylabel(r"$\chi_p/2\pi$ (MHz)")
    ax.legend(fontsize=7, ncol=2, title="amplitude")
    ax.axhline(0.0, color="0.7", lw=0.6)
    out = Path(out_path) if out_path else Path(csv_path).with_suffix(".svg")
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def plot_gp_linearity(csv_path, out_path=None):
    header, data = _read_csv(csv_path)
    amps = _col(header, data, "amplitude_mv")
    gp = _col(header, data, "g_p_mhz")
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(amps, gp, "o", ms=5)
    coeff = np.polyfit(amps, gp, 1)
    xs = np.linspace(0.0, amps.max() * 1.05, 50)
    ax.plot(xs, np.polyval(coeff, xs), "-", lw=1)
    ax.set_xlabel("pump amplitude (mV)")
    ax.set_ylabel(r"$g_p/2\pi$ (MHz)")
    out = Path(out_path) if out_path else Path(csv_path).with_suffix(".svg")
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def plot_fluxmap(csv_path, out_path=None):
    header, data = _read_csv(csv_path)
    phi = _col(header, data, "phi")
    fig, axes = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    for lb in ("l", "r", "c"):
        axes[0].plot(phi, _col(header, data, f"omega_{lb}_ghz"), label=lb.upper())
    axes[0].set_ylabel("mode frequency (GHz)")
    axes[0].legend()
    for lb in ("l", "r"):
        axes[1].plot(phi, _col(header, data, f"chi_s{lb}_mhz"), label=f"$\\chi_{{s{lb.upper()}}}$")
    axes[1].set_ylabel(r"$\chi_s/2\pi$ (MHz)")
    axes[1].set_xlabel(r"flux bias $\phi$ ($\Phi_0$)")
    axes[1].legend()
    out = Path(out_path) if out_path else Path(csv_path).with_suffix(".svg")
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def plot_dephasing(csv_path, out_path=None):
    header, data = _read_csv(csv_path)
    phi = _col(header, data, "phi")
    nbar = _col(header, data, "nbar")
    t2 = _col(header, data, "t2_us")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for nb in np.unique(nbar):
        sel = nbar == nb
        ax.plot(phi[sel], t2[sel], "o-", ms=3, lw=1, label=f"$\\bar n$ = {nb:g}")
    ax.set_xlabel(r"flux bias $\phi$ ($\Phi_0$)")
    ax.set_ylabel(r"$T_2^*$ ($\mu$s)")
    ax.legend()
    out = Path(out_path) if out_path else Path(csv_path).with_suffix(".svg")
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def plot_calibration(csv_path, out_path=None):
    header, data = _read_csv(csv_path)
    freq = _col(header, data, "omega_p_ghz")
    fig, axes = plt.subplots(2, 1, figsize=(6.0, 5.5), sharex=True)
    axes[0].plot(freq, _col(header, data, "delta_omega_mhz"), "o-", ms=3, lw=1,
                 label="before")
    axes[0].plot(freq, _col(header, data, "delta_omega_corrected_mhz"), "s-", ms=3,
                 lw=1, label="after")
    axes[0].set_ylabel(r"$\delta\omega/2\pi$ (MHz)")
    axes[0].legend()
    axes[1].plot(freq, _col(header, data, "lambda"), "o-", ms=3, lw=1)
    axes[1].set_ylabel(r"correction $\lambda$")
    axes[1].set_xlabel(r"pump frequency $\omega_p/2\pi$ (GHz)")
    out = Path(out_path) if out_path else Path(csv_path).with_suffix(".svg")
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def plot_floquet_check(csv_path, out_path=None):
    header, data = _read_csv(csv_path)
    dp = _col(header, data, "delta_p_ghz") * 1e3
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(dp, _col(header, data, "chi_series_mhz"), "s--", ms=4, lw=0.8, label="series")
    ax.plot(dp, _col(header, data, "chi_diag_mhz"), "o-", ms=4, lw=1, label="diagonalization")
    ax.plot(dp, _col(header, data, "chi_floquet_mhz"), "x", ms=6, label="Floquet")
    ax.set_xlabel(r"$\Delta_p/2\pi$ (MHz)")
    ax.set_ylabel(r"$\chi_p/2\pi$ (MHz)")
    ax.legend()
    out = Path(out_path) if out_path else Path(csv_path).with_suffix(".svg")
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out
