"""Benchmark protocol: accuracy and macro F1 on labeled validation data.

Accuracy here is micro accuracy over all samples (assumed, and recorded
in every report). Reference state-of-the-art numbers are printed for
context only and never asserted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InputError

# Context rows printed next to results; reference values, never asserted.
SOTA_REFERENCE = {"gender": 97.5, "age": 62.28}


@dataclass(frozen=True)
class BenchmarkReport:
    task: str
    model_name: str
    accuracy: float
    macro_f1: float
    confusion: np.ndarray  # (K, K): rows = true, cols = predicted
    class_names: tuple[str, ...]
    n: int
    notes: str = "micro accuracy over all samples"

    def __post_init__(self):
        conf = np.asarray(self.confusion, dtype=np.int64)
        object.__setattr__(self, "confusion", conf)
        if int(conf.sum()) != self.n:
            raise InputError("confusion entries must sum to n")
        if abs(self.accuracy - np.trace(conf) / self.n) > 1e-12:
            raise InputError("accuracy inconsistent with confusion trace")

    def as_dict(self) -> dict:
        return {
            "task": self.task,
            "model_name": self.model_name,
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "n": self.n,
            "class_names": list(self.class_names),
            "confusion": self.confusion.tolist(),
            "notes": self.notes,
        }


def evaluate(predicted_labels, true_labels, class_names, task: str = "",
             model_name: str = "") -> BenchmarkReport:
    """Confusion matrix, micro accuracy, and macro F1 over label sequences.

    Per-class F1 is 2*TP / (2*TP + FP + FN), defined as 0 when the
    denominator is 0; macro F1 averages over all classes in
    ``class_names`` without weighting.
    """
    predicted = list(predicted_labels)
    true = list(true_labels)
    if len(predicted) != len(true):
        raise InputError(
            f"predicted ({len(predicted)}) and true ({len(true)}) lengths differ"
        )
    if not true:
        raise InputError("empty label sequences")
    names = tuple(class_names)
    index = {name: i for i, name in enumerate(names)}
    k = len(names)
    confusion = np.zeros((k, k), dtype=np.int64)
    for t, p in zip(true, predicted):
        if t not in index:
            raise InputError(f"unknown true label {t!r}")
        if p not in index:
            raise InputError(f"unknown predicted label {p!r}")
        confusion[index[t], index[p]] += 1

    n = len(true)
    accuracy = float(np.trace(confusion)) / n
    tp = np.diag(confusion).astype(np.float64)
    fp = confusion.sum(axis=0) - tp
    fn = confusion.sum(axis=1) - tp
    denom = 2 * tp + fp + fn
    f1 = np.where(denom > 0, 2 * tp / np.where(denom > 0, denom, 1), 0.0)
    macro_f1 = float(f1.mean())
    return BenchmarkReport(
        task=task, model_name=model_name, accuracy=accuracy, macro_f1=macro_f1,
        confusion=confusion, class_names=names, n=n,
    )


_AGE_BOUNDS = (
    (0, 2, "0-2"), (3, 9, "3-9"), (10, 19, "10-19"), (20, 29, "20-29"),
    (30, 39, "30-39"), (40, 49, "40-49"), (50, 59, "50-59"),
    (60, 69, "60-69"), (70, 100, "70+"),
)


def map_fine_age_to_groups(age_in_years: int) -> str:
    """Map an integer age 0..100 to its canonical age group."""
    if not isinstance(age_in_years, (int, np.integer)):
        raise InputError(f"age must be an integer, got {type(age_in_years)}")
    if not (0 <= age_in_years <= 100):
        raise InputError(f"age {age_in_years} outside [0, 100]")
    for lo, hi, group in _AGE_BOUNDS:
        if lo <= age_in_years <= hi:
            return group
    raise AssertionError("age bounds do not partition 0..100")  # pragma: no cover


def format_report_table(reports) -> str:
    """Aligned text table of benchmark rows, with SOTA context lines."""
    rows = [("Model", "Accuracy (%)", "F1-Score (Macro)")]
    for rep in reports:
        rows.append((
            f"{rep.model_name} {rep.task.capitalize()}",
            f"{100.0 * rep.accuracy:.2f}",
            f"{rep.macro_f1:.2f}",
        ))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("-" * (sum(widths) + 4))
    tasks = {rep.task for rep in reports}
    for task in sorted(tasks):
        if task in SOTA_REFERENCE:
            lines.append(
                f"(state-of-the-art {task} accuracy for context, not asserted: "
                f"{SOTA_REFERENCE[task]:.2f}%)"
            )
    return "\n".join(lines) + "\n"


def report_to_json(reports, config_fingerprint: str = "", schema_version: int = 1) -> str:
    doc = {
        "schema_version": schema_version,
        "config_fingerprint": config_fingerprint,
        "reports": [rep.as_dict() for rep in reports],
        "sota_reference_pct": SOTA_REFERENCE,
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def select_subset(n_items: int, limit: int | None, seed: int) -> np.ndarray:
    """Deterministic evaluation subset: seeded choice, returned sorted."""
    if limit is not None and limit <= 0:
        raise InputError("limit must be a positive count")
    if limit is None or limit >= n_items:
        return np.arange(n_items)
    rng = np.random.default_rng(seed)
    picked = rng.choice(n_items, size=limit, replace=False)
    return np.sort(picked)
