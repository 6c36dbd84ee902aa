"""Figure rendering for the CLI report paths.

Every report command can drop a PNG next to its CSV/JSON output.  The Agg
backend keeps rendering headless and reproducible.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_budget_figure(path, s_values) -> None:
    ks = np.arange(1, len(s_values) + 1)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(ks, s_values, color="#34657f")
    ax.set_xlabel("subset size k")
    ax.set_ylabel("budget S_k")
    ax.set_title("Averaged-difference budgets")
    ax.set_xticks(ks)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_certificate_figure(path, cert) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    rs = np.arange(1, cert.m + 1)
    mags = [abs(k) for k in cert.kappa]
    axes[0].semilogy(rs, np.maximum(mags, 1e-300), "o-", label="|kappa_r|")
    if cert.feasible and cert.m >= 2:
        from .cumulants import cumulant_magnitude_bound
        bounds = [cumulant_magnitude_bound(cert.n, r, cert.alpha) for r in range(2, cert.m + 1)]
        axes[0].semilogy(np.arange(2, cert.m + 1), bounds, "s--", label="envelope")
    axes[0].set_xlabel("order r")
    axes[0].set_xticks(rs)
    axes[0].legend()
    axes[0].set_title("Cumulant magnitudes")
    if cert.feasible:
        axes[1].bar([0, 1], [abs(cert.delta_actual), cert.delta_bound],
                    color=["#34657f", "#a0a0a0"])
        axes[1].set_xticks([0, 1], ["|delta|", "bound"])
        axes[1].set_yscale("log")
        axes[1].set_title("Deviation vs certified bound")
    else:
        axes[1].text(0.5, 0.5, "infeasible", ha="center", va="center")
        axes[1].set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_triangle_figure(path, report) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(report.ks, report.sigma_pr, "ko", label="sigma Pr(T=k)", ms=4)
    for m in range(report.approximations.shape[0]):
        ax.plot(report.ks, report.approximations[m], "-",
                label=f"series order {m}", lw=1.2)
    ax.set_xlabel("triangle count k")
    ax.set_ylabel("scaled mass")
    ax.set_title(f"Triangle counts, {report.n_vertices} vertices, p={report.p}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_clt_figure(path, report) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    axes[0].plot(report.ts, np.abs(report.phi), "-", label="|phi(t)|")
    axes[0].plot(report.ts, np.exp(-0.5 * report.ts ** 2), "--", label="gaussian")
    axes[0].set_xlabel("t")
    axes[0].legend()
    axes[0].set_title("Characteristic function")
    axes[1].plot(report.ts, report.ratios, ".")
    axes[1].set_xlabel("t")
    axes[1].set_ylabel("defect / comparator")
    axes[1].set_title("Expansion ratio diagnostics")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_rg_figure(path, n, d, log_exact, log_by_m) -> None:
    ms = np.arange(1, len(log_by_m) + 1)
    gaps = np.abs(np.asarray(log_by_m) - log_exact)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ms, np.maximum(gaps, 1e-300), "o-")
    ax.set_xlabel("correction order m")
    ax.set_ylabel("|log exact - log approx|")
    ax.set_xticks(ms)
    ax.set_title(f"Regular graph count asymptotics, n={n}, d={d}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
