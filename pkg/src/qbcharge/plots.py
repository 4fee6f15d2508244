"""Figure emission: convenience plots over the CSV artifacts."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_run(out_dir: str, cfg, report, result, base_pulse) -> None:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 8), sharex=True)
    t = report.times
    ax1.plot(t, report.battery_energy_opt, "g-", label="energy (optimized)")
    ax1.plot(t, report.battery_ergotropy_opt, "g--", label="ergotropy (optimized)")
    ax1.plot(t, report.battery_energy_osc, "k-", label="energy (oscillatory)")
    ax1.plot(t, report.battery_ergotropy_osc, "k--", label="ergotropy (oscillatory)")
    ax1.set_ylabel("battery energy / ergotropy")
    ax1.legend(loc="best", fontsize=8)
    ax2.plot(t, result.pulse.values, "g-", label="optimized pulse")
    ax2.plot(t, base_pulse.values, "k:", label="oscillatory pulse")
    ax2.set_xlabel("time")
    ax2.set_ylabel("field amplitude")
    ax2.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "charging.svg"))
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    its = [r.iteration for r in result.records]
    ax.plot(its, [r.j_value for r in result.records], "b-")
    ax.set_xlabel("iteration")
    ax.set_ylabel("functional J")
    ax.set_yscale("log")
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "convergence.svg"))
    plt.close(fig)


def plot_temperature_sweep(out_dir: str, points: list[dict]) -> None:
    nb = [p["n_bath"] for p in points]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 8), sharex=True)
    ax1.plot(nb, [p["ergotropy_opt"] for p in points], "go-", label="optimized")
    ax1.plot(nb, [p["ergotropy_osc"] for p in points], "ks-", label="oscillatory")
    ax1.set_ylabel("final battery ergotropy")
    ax1.legend(loc="best")
    ax2.plot(nb, [p["pulse_cost"] for p in points], "go-", label="optimized")
    ax2.plot(nb, [p["baseline_cost"] for p in points], "k--", label="oscillatory")
    ax2.set_xlabel("bath occupation")
    ax2.set_ylabel("drive cost")
    ax2.legend(loc="best")
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "temperature_sweep.svg"))
    plt.close(fig)


def plot_pareto(out_dir: str, points: list[dict]) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for p in points:
        fid = [rec[2] for rec in p["records"]]
        cost = [rec[3] for rec in p["records"]]
        ax.plot(cost, fid, "-", label=f"lambda={p['lam']:g}")
    ax.set_xlabel("pulse cost")
    ax.set_ylabel("fidelity")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "pareto.svg"))
    plt.close(fig)
