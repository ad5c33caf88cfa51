"""Figure rendering for simulation reports and analysis output.

Figures are written next to the delimited output files: a relative-bias
forest-style panel, a coverage / standard-error summary, and cumulative
incidence curve grids.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

METHOD_ORDER = ["full", "cca", "cs_smc", "cs_approx", "fg_smc", "fg_approx"]


def _method_sort(methods):
    return sorted(methods, key=lambda m: METHOD_ORDER.index(m) if m in METHOD_ORDER else 99)


def render_bias_figure(perf: pd.DataFrame, path: Path) -> None:
    """Relative bias of the first coefficient per scenario and method, with
    95% Monte Carlo intervals."""
    sel = perf[(perf["estimand"] == "beta1") & (perf["metric"] == "relative_bias")]
    if sel.empty:
        return
    scenarios = sorted(sel["scenario"].unique())
    fig, axes = plt.subplots(
        1, len(scenarios), figsize=(4 * len(scenarios), 3.2), sharey=True, squeeze=False
    )
    for ax, scen in zip(axes[0], scenarios):
        sub = sel[sel["scenario"] == scen]
        methods = _method_sort(sub["method"].unique())
        ys = np.arange(len(methods))
        for y, m in zip(ys, methods):
            row = sub[sub["method"] == m].iloc[0]
            v, s = 100 * row["value"], 100 * row["mcse"]
            ax.barh(y, 2 * 1.96 * s, left=v - 1.96 * s, height=0.55, color="#9ecae1")
            ax.plot([v, v], [y - 0.3, y + 0.3], color="#08519c")
        ax.axvline(0, color="black", lw=0.8)
        ax.set_yticks(ys, methods)
        ax.set_xlabel("relative bias (%)")
        ax.set_title(scen, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_coverage_figure(perf: pd.DataFrame, path: Path) -> None:
    """Coverage with Monte Carlo error bars, plus empirical vs model SEs."""
    cov = perf[(perf["estimand"] == "beta1") & (perf["metric"] == "coverage")]
    if cov.empty:
        return
    scenarios = sorted(cov["scenario"].unique())
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    for i, scen in enumerate(scenarios):
        sub = cov[cov["scenario"] == scen]
        methods = _method_sort(sub["method"].unique())
        for j, m in enumerate(methods):
            row = sub[sub["method"] == m].iloc[0]
            x = i + (j - len(methods) / 2) * 0.08
            ax1.errorbar(x, row["value"], yerr=1.96 * row["mcse"], fmt="o", ms=3, label=m if i == 0 else None)
    ax1.axhline(0.95, color="black", lw=0.8, ls="--")
    ax1.set_xticks(range(len(scenarios)), scenarios, rotation=20, fontsize=7)
    ax1.set_ylabel("coverage")
    ax1.legend(fontsize=6)

    emp = perf[(perf["estimand"] == "beta1") & (perf["metric"] == "emp_se")]
    mod = perf[(perf["estimand"] == "beta1") & (perf["metric"] == "mod_se")]
    merged = emp.merge(mod, on=["scenario", "method"], suffixes=("_emp", "_mod"))
    for m in _method_sort(merged["method"].unique()):
        sub = merged[merged["method"] == m]
        ax2.scatter(sub["value_emp"], sub["value_mod"], s=12, label=m)
    lim = max(merged["value_emp"].max(), merged["value_mod"].max()) * 1.1
    ax2.plot([0, lim], [0, lim], color="black", lw=0.8)
    ax2.set_xlabel("empirical SE")
    ax2.set_ylabel("model SE")
    ax2.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_incidence_figure(perf: pd.DataFrame, path: Path) -> None:
    """RMSE of the cumulative incidence estimates per horizon and method."""
    sel = perf[perf["estimand"].str.startswith("cuminc") & (perf["metric"] == "rmse")].copy()
    if sel.empty:
        return
    sel["time"] = sel["estimand"].str.extract(r"t=([\d.]+)").astype(float)
    sel["reference"] = sel["estimand"].str.extract(r";(.+)\)$")
    scenarios = sorted(sel["scenario"].unique())
    refs = sorted(sel["reference"].unique())
    fig, axes = plt.subplots(
        len(scenarios), len(refs), figsize=(4 * len(refs), 2.6 * len(scenarios)), squeeze=False
    )
    for i, scen in enumerate(scenarios):
        for j, ref in enumerate(refs):
            ax = axes[i][j]
            sub = sel[(sel["scenario"] == scen) & (sel["reference"] == ref)]
            for m in _method_sort(sub["method"].unique()):
                msub = sub[sub["method"] == m].sort_values("time")
                ax.plot(msub["time"], msub["value"], marker="o", ms=3, label=m)
            ax.set_title(f"{scen} | {ref}", fontsize=8)
            ax.set_xlabel("t")
            ax.set_ylabel("RMSE")
            if i == 0 and j == 0:
                ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_pooled_cuminc_figure(cuminc: pd.DataFrame, path: Path) -> None:
    """Pooled incidence curves with pointwise confidence bands."""
    if cuminc.empty:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    for ref, sub in cuminc.groupby("reference"):
        sub = sub.sort_values("time")
        (line,) = ax.plot(sub["time"], sub["estimate"], label=ref)
        ax.fill_between(sub["time"], sub["ci_low"], sub["ci_high"], alpha=0.2, color=line.get_color())
    ax.set_xlabel("time")
    ax.set_ylabel("cumulative incidence")
    ax.set_ylim(0, 1)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_simulation_figures(perf: pd.DataFrame, output_dir: Path) -> list[Path]:
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, fn in (
        ("bias.png", render_bias_figure),
        ("coverage_se.png", render_coverage_figure),
        ("incidence_rmse.png", render_incidence_figure),
    ):
        p = output_dir / name
        fn(perf, p)
        if p.exists():
            paths.append(p)
    return paths
