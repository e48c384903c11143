"""Figure rendering for emitted reports.

Each report written by the CLI gets a PNG next to its JSON/CSV so a probe
run can be eyeballed without further tooling. Rendering is best-effort
decoration of the canonical outputs; the JSON/CSV stay the data of record.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_report"]


def _norm_figure(doc: dict):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    ratios = np.asarray(doc.get("ratios", []), dtype=float)
    if ratios.size:
        ax1.plot(np.arange(ratios.size), ratios, ".", ms=4, color="tab:blue")
        ax1.axhline(doc["max_ratio"], color="tab:red", lw=1,
                    label=f"max {doc['max_ratio']:.4g}")
        ax1.legend(loc="lower right", fontsize=8)
    ax1.set_xlabel("trial")
    ax1.set_ylabel(f"ratio at p={doc.get('p')}")
    ax1.set_title(doc.get("operator", ""), fontsize=10)
    ref = doc.get("refinement", [])
    labels = ["base", "grid x2", "trials x2"][: len(ref)]
    ax2.bar(labels, ref, color="tab:gray")
    ax2.set_title("refinement maxima" + (" (stable)" if doc.get("stable") else " (UNSTABLE)"),
                  fontsize=10)
    return fig


def _hormander_figure(doc: dict):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    sups = doc.get("sup_values", [])
    ax.bar([f"k={k}" for k in range(len(sups))], sups, color="tab:blue")
    ax.set_yscale("log")
    ax.set_ylabel("sup |mu^k m^(k)(mu)|")
    ax.set_title("bounded" if doc.get("bounded") else "UNBOUNDED", fontsize=10)
    return fig


def _domination_figure(doc: dict):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.bar(["C_emp", "refined"], [doc.get("c_emp", 0.0), doc.get("c_emp_refined", 0.0)],
           color=["tab:blue", "tab:gray"])
    ax.set_title(
        f"delta={doc.get('delta')}" + (" (stable)" if doc.get("stable") else " (UNSTABLE)"),
        fontsize=10,
    )
    return fig


def _equivalence_figure(doc: dict):
    fig, ax = plt.subplots(figsize=(5.5, 3.4))
    per = doc.get("per_lambda", {})
    lams = sorted(per, key=float)
    lows = [per[k][0] for k in lams]
    highs = [per[k][1] for k in lams]
    xs = np.arange(len(lams))
    ax.vlines(xs, lows, highs, color="tab:blue", lw=4)
    ax.set_xticks(xs, [f"{float(k):g}" for k in lams])
    ax.set_xlabel("|lambda|")
    ax.set_ylabel(f"||g_1 f||_p / ||f||_p, p={doc.get('p')}")
    ax.set_title("stable in lambda" if doc.get("lambda_stable") else "UNSTABLE", fontsize=10)
    return fig


_RENDERERS = {
    "grushin.norm-report/1": _norm_figure,
    "grushin.hormander-report/1": _hormander_figure,
    "grushin.domination-report/1": _domination_figure,
    "grushin.equivalence-report/1": _equivalence_figure,
}


def render_report(doc: dict, png_path: str) -> str | None:
    """Render the figure matching the report schema; returns the path or None."""
    renderer = _RENDERERS.get(doc.get("schema", ""))
    if renderer is None:
        return None
    fig = renderer(doc)
    fig.tight_layout()
    fig.savefig(png_path, dpi=110)
    plt.close(fig)
    return png_path
