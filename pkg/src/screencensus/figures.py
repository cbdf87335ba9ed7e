"""Matplotlib renderings of the report artifacts.

The report commands write these figures next to their JSON/CSV outputs:
a nested-doughnut analytics chart (outer ring gender, inner ring the
per-gender age binarization, center headline, confidence lines, and
actual-vs-predicted bias bars), a two-panel forest plot of survey
credible intervals, and a benchmark accuracy bar chart.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

FEMALE_COLOR = "#e8833a"
MALE_COLOR = "#c9c9c9"
OVER50_COLOR = "#3a9e5f"
UPTO50_COLOR = "#e0e0e0"
MUTED_OVER50 = "#9dc7ab"


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def doughnut_figure(doc: dict):
    """Fig-style analytics chart for one film document."""
    fig = plt.figure(figsize=(6.5, 8.2))
    grid = fig.add_gridspec(
        3, 2, height_ratios=[5.2, 0.7, 1.6], hspace=0.45, wspace=0.55
    )
    ax = fig.add_subplot(grid[0, :])

    gender = doc["gender"]
    age = doc["age"]
    inter = doc["intersection"]

    outer_vals = [gender["female_pct"], gender["male_pct"]]
    inner_vals = [
        inter["female_over50_pct"], inter["female_upto50_pct"],
        inter["male_over50_pct"], inter["male_upto50_pct"],
    ]
    ax.pie(
        outer_vals, radius=1.0, startangle=90, counterclock=False,
        colors=[FEMALE_COLOR, MALE_COLOR],
        wedgeprops=dict(width=0.38, edgecolor="white"),
    )
    ax.pie(
        inner_vals, radius=0.60, startangle=90, counterclock=False,
        colors=[OVER50_COLOR, UPTO50_COLOR, MUTED_OVER50, UPTO50_COLOR],
        wedgeprops=dict(width=0.22, edgecolor="white"),
    )
    ax.text(0, 0.08, f"Female {round_half_up(gender['female_pct'])}%",
            ha="center", va="center", fontsize=15, color=FEMALE_COLOR,
            fontweight="bold")
    ax.text(0, -0.12, f"Over 50's {round_half_up(age['over50_pct'])}%",
            ha="center", va="center", fontsize=13, color=OVER50_COLOR,
            fontweight="bold")
    ax.set_title(
        f"{doc['film_id']}: AI-generated distribution of on-screen appearances",
        fontsize=11,
    )

    conf_ax = fig.add_subplot(grid[1, :])
    conf_ax.axis("off")
    conf_ax.text(
        0.5, 0.6,
        f"AI confidence - gender: {round_half_up(gender['confidence_pct'])}%, "
        f"age: {round_half_up(age['confidence_pct'])}%",
        ha="center", va="center", fontsize=11,
    )
    conf_ax.text(
        0.5, 0.0, f"faces analyzed: {doc['n_faces']:,}",
        ha="center", va="center", fontsize=9, color="#555555",
    )

    bias = doc["bias"]
    for col, (label, actual, predicted, color) in enumerate((
        ("Female", bias["gender"]["actual"]["female_pct"],
         bias["gender"]["predicted"]["female_pct"], FEMALE_COLOR),
        ("Over 50", bias["age"]["actual"]["over50_pct"],
         bias["age"]["predicted"]["over50_pct"], OVER50_COLOR),
    )):
        bax = fig.add_subplot(grid[2, col])
        bax.barh([1, 0], [actual, predicted], color=[color, "#8899aa"], height=0.6)
        bax.set_yticks([1, 0], ["actual", "AI-predicted"], fontsize=8)
        bax.set_xlim(0, 100)
        bax.set_title(f"{label} share in validation set", fontsize=9)
        for y, v in ((1, actual), (0, predicted)):
            bax.text(v + 1.5, y, f"{v:.1f}%", va="center", fontsize=8)
        bax.tick_params(axis="x", labelsize=8)
    return fig


def save_doughnut(doc: dict, path) -> None:
    fig = doughnut_figure(doc)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)


def survey_forest_figure(results: dict):
    """Two-panel forest plot: correctness probabilities and Likert means."""
    binary = [q for q in results["questions"]
              if q["kind"] in ("binary", "multiselect4") and "interval" in q]
    likert = [q for q in results["questions"]
              if q["kind"] == "likert" and "interval" in q]
    fig, axes = plt.subplots(
        1, 2, figsize=(11, 0.45 * max(len(binary), len(likert)) + 1.8)
    )

    def draw(ax, questions, xlim, refline):
        ys = range(len(questions), 0, -1)
        for y, q in zip(ys, questions):
            ci = q["interval"]
            ax.plot([ci["low"], ci["high"]], [y, y], color="#33557a", lw=2.2)
            ax.plot([ci["mean"]], [y], "o", color="#33557a", ms=5)
        ax.set_yticks(list(ys), [f"{q['code']} {q['label']}" for q in questions],
                      fontsize=8)
        ax.set_xlim(*xlim)
        ax.set_ylim(0.3, len(questions) + 0.7)
        if refline is not None:
            ax.axvline(refline, color="#aa3333", ls="--", lw=1)
        ax.grid(axis="x", color="#dddddd", lw=0.6)

    draw(axes[0], binary, (0.0, 1.0), 0.5)
    axes[0].set_title(
        f"Correct-response probability ({results['mass']:.0%} "
        f"{results['interval_kind']})", fontsize=10,
    )
    draw(axes[1], likert, (1.0, 5.0), 3.0)
    axes[1].set_title(
        f"Mean score ({results['mass']:.0%} {results['interval_kind']})",
        fontsize=10,
    )
    fig.tight_layout()
    return fig


def save_survey_forest(results: dict, path) -> None:
    fig = survey_forest_figure(results)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)


def benchmark_figure(reports):
    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    labels = [f"{r.model_name}\n{r.task}" for r in reports]
    accs = [100.0 * r.accuracy for r in reports]
    f1s = [100.0 * r.macro_f1 for r in reports]
    xs = range(len(reports))
    ax.bar([x - 0.18 for x in xs], accs, width=0.36, label="accuracy (%)",
           color="#33557a")
    ax.bar([x + 0.18 for x in xs], f1s, width=0.36, label="macro F1 (x100)",
           color="#8ab0d8")
    ax.set_xticks(list(xs), labels, fontsize=8)
    ax.set_ylim(0, 100)
    ax.legend(fontsize=8)
    ax.set_title("Benchmark results", fontsize=10)
    fig.tight_layout()
    return fig


def save_benchmark_figure(reports, path) -> None:
    fig = benchmark_figure(reports)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
