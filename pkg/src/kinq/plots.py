"""Figure rendering for report bundles.

Every function takes already-computed data plus an output path and writes
one PNG; nothing here recomputes physics.  The Agg backend keeps the CLI
headless-safe.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

GHZ = 2.0 * math.pi * 1e9


def _new_axes(xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_surface_reactance(path, omegas, xs_by_label):
    """Im[Z_s] versus frequency, one curve per label."""
    fig, ax = _new_axes("frequency (GHz)", r"Im[$Z_s$] (m$\Omega$/sq)")
    for label, xs in xs_by_label.items():
        ax.plot([w / GHZ for w in omegas], [1e3 * x for x in xs], label=label)
    ax.legend()
    _save(fig, path)


def plot_purity_sweep(path, sigma_ns, xs_values):
    fig, ax = _new_axes(r"$\sigma_n$ (S/m)", r"Im[$Z_s$] (m$\Omega$/sq)")
    ax.loglog(sigma_ns, [1e3 * x for x in xs_values])
    _save(fig, path)


def plot_temperature_sweep(path, points, f0):
    """Frequency shift versus T/T_c (points: tline.TemperaturePoint)."""
    fig, ax = _new_axes(r"$T/T_c$", r"$\Delta\omega_r/2\pi$ (MHz)")
    ax.plot([p.T_over_Tc for p in points],
            [p.shift / (2 * math.pi * 1e6) for p in points], "o-")
    ax.set_title(f"zero-temperature frequency {f0 / GHZ:.4f} GHz")
    _save(fig, path)


def plot_transmission(path, responses_by_label):
    """|S21| in dB versus frequency for one or more model runs."""
    fig, ax = _new_axes("frequency (GHz)", r"$|S_{21}|$ (dB)")
    for label, resp in responses_by_label.items():
        db = [20 * math.log10(max(abs(s), 1e-12)) for s in resp.s21]
        ax.plot([w / GHZ for w in resp.omegas], db, label=label)
    ax.legend()
    _save(fig, path)
