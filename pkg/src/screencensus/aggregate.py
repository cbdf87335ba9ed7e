"""Film-level analytics from per-face predictions.

Reduces (gender, age) probability pairs to the distribution shares shown
in reports: gender split, binarized-age split (Up to 50 / Over 50), their
four-way intersection, and the mean confidence of the dominant
predictions. Also computes the actual-vs-predicted bias profile on a
labeled validation set.

Reductions are deterministic across worker counts: per-face values are
accumulated over fixed-size chunks whose partial sums are merged in chunk
order, so the floating-point reduction tree never depends on scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .classifier import AGE_CLASSES, GENDER_CLASSES, ProbDist
from .errors import InputError, NoFacesError

ANALYTICS_SCHEMA_VERSION = 1

OVER50_GROUPS = ("50-59", "60-69", "70+")
_OVER50_SLICE = slice(6, 9)  # canonical age order puts the over-50 groups last

# Fixed reduction chunk size; must not depend on worker count.
_CHUNK = 4096


class BinaryAge(Enum):
    UPTO50 = "UpTo50"
    OVER50 = "Over50"


def _age_probs(age) -> np.ndarray:
    if isinstance(age, ProbDist):
        if age.class_names != AGE_CLASSES:
            raise InputError(
                f"expected the canonical 9-group age order, got {age.class_names}"
            )
        return age.probs
    probs = np.asarray(age, dtype=np.float64).reshape(-1)
    if probs.shape[0] != len(AGE_CLASSES):
        raise InputError(f"expected {len(AGE_CLASSES)} age classes, got {probs.shape[0]}")
    return probs


def binarize_age(age) -> BinaryAge:
    """Map a 9-group age distribution to Up-to-50 / Over-50.

    Over-50 wins iff the summed confidence of the 50-59, 60-69 and 70+
    groups exceeds the summed confidence of the remaining six groups; a
    tie is assigned to Up-to-50.
    """
    probs = _age_probs(age)
    over = float(probs[_OVER50_SLICE].sum())
    under = float(probs[:6].sum())
    return BinaryAge.OVER50 if over > under else BinaryAge.UPTO50


def binarize_age_label(age_label: str) -> BinaryAge:
    """Binarize a ground-truth age-group label."""
    if age_label not in AGE_CLASSES:
        raise InputError(f"unknown age group {age_label!r}")
    return BinaryAge.OVER50 if age_label in OVER50_GROUPS else BinaryAge.UPTO50


@dataclass(frozen=True)
class FilmAnalytics:
    """Aggregated per-film distribution over gender and binarized age."""

    film_id: str
    n_faces: int
    female_pct: float
    male_pct: float
    over50_pct: float
    upto50_pct: float
    # intersection order: (Female,Over50), (Female,UpTo50), (Male,Over50), (Male,UpTo50)
    intersection_pcts: tuple[float, float, float, float]
    gender_confidence: float
    age_confidence: float
    config_fingerprint: str = ""

    def __post_init__(self):
        if self.n_faces < 0:
            raise InputError("n_faces must be >= 0")
        tol = 1e-6
        f_over, f_up, m_over, m_up = self.intersection_pcts
        checks = [
            ("gender split", self.female_pct + self.male_pct),
            ("age split", self.over50_pct + self.upto50_pct),
            ("intersection", f_over + f_up + m_over + m_up),
        ]
        for name, total in checks:
            if abs(total - 100.0) > tol:
                raise InputError(f"{name} percentages sum to {total}, not 100")
        if abs((f_over + f_up) - self.female_pct) > tol:
            raise InputError("female intersections do not sum to the female share")
        if abs((m_over + m_up) - self.male_pct) > tol:
            raise InputError("male intersections do not sum to the male share")
        if abs((f_over + m_over) - self.over50_pct) > tol:
            raise InputError("over-50 intersections do not sum to the over-50 share")


def _chunk_partials(gender_probs, age_probs):
    """Per-chunk counts and confidence sums (deterministic inner reduction)."""
    g_idx = np.argmax(gender_probs, axis=1)
    g_conf = gender_probs[np.arange(len(g_idx)), g_idx]
    over = age_probs[:, _OVER50_SLICE].sum(axis=1)
    under = age_probs[:, :6].sum(axis=1)
    is_over = over > under
    a_conf_binarized = np.where(is_over, over, under)
    a_conf_argmax = age_probs.max(axis=1)
    female = g_idx == 0
    return {
        "n": len(g_idx),
        "female": int(np.sum(female)),
        "over": int(np.sum(is_over)),
        "female_over": int(np.sum(female & is_over)),
        "male_over": int(np.sum(~female & is_over)),
        "g_conf_sum": float(np.sum(g_conf)),
        "a_conf_binarized_sum": float(np.sum(a_conf_binarized)),
        "a_conf_argmax_sum": float(np.sum(a_conf_argmax)),
    }


def film_analytics(film_id: str, predictions, config_fingerprint: str = "",
                   age_confidence_mode: str = "binarized",
                   workers: int = 1) -> FilmAnalytics:
    """Aggregate per-face (gender, age) probability pairs for one film.

    ``predictions`` is a sequence of (gender ProbDist, age ProbDist)
    pairs; raw probability vectors of lengths 2 and 9 are also accepted.
    ``age_confidence_mode`` selects what the displayed age confidence
    averages: the winning binarized sum (default, matches the binarized
    headline figure) or the 9-way argmax probability ("argmax9").
    """
    if age_confidence_mode not in ("binarized", "argmax9"):
        raise InputError(f"unknown age_confidence_mode {age_confidence_mode!r}")
    preds = list(predictions)
    if not preds:
        raise NoFacesError(f"no faces detected for film {film_id!r}")

    n = len(preds)
    gender_mat = np.empty((n, 2))
    age_mat = np.empty((n, 9))
    for i, (g, a) in enumerate(preds):
        g_probs = g.probs if isinstance(g, ProbDist) else np.asarray(g, dtype=np.float64)
        if isinstance(g, ProbDist) and g.class_names != GENDER_CLASSES:
            raise InputError(f"expected gender classes {GENDER_CLASSES}")
        if g_probs.shape != (2,):
            raise InputError("gender distribution must have 2 classes")
        gender_mat[i] = g_probs
        age_mat[i] = _age_probs(a)

    chunks = [(s, min(s + _CHUNK, n)) for s in range(0, n, _CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(
                lambda span: _chunk_partials(gender_mat[span[0]:span[1]],
                                             age_mat[span[0]:span[1]]),
                chunks,
            ))
    else:
        partials = [_chunk_partials(gender_mat[s:e], age_mat[s:e]) for s, e in chunks]

    # Merge partials in chunk order so the reduction tree is fixed.
    female = over = female_over = male_over = 0
    g_conf_sum = a_conf_sum = 0.0
    conf_key = "a_conf_binarized_sum" if age_confidence_mode == "binarized" else "a_conf_argmax_sum"
    for p in partials:
        female += p["female"]
        over += p["over"]
        female_over += p["female_over"]
        male_over += p["male_over"]
        g_conf_sum += p["g_conf_sum"]
        a_conf_sum += p[conf_key]

    male = n - female
    upto = n - over
    female_up = female - female_over
    male_up = male - male_over

    def pct(count: int) -> float:
        return 100.0 * count / n

    gender_confidence = 100.0 * g_conf_sum / n
    age_confidence = 100.0 * a_conf_sum / n
    min_conf = 50.0 if age_confidence_mode == "binarized" else 100.0 / 9.0
    if not (50.0 - 1e-9 <= gender_confidence <= 100.0 + 1e-9):
        raise InputError(f"gender confidence {gender_confidence} outside [50, 100]")
    if not (min_conf - 1e-9 <= age_confidence <= 100.0 + 1e-9):
        raise InputError(f"age confidence {age_confidence} outside [{min_conf}, 100]")

    return FilmAnalytics(
        film_id=film_id,
        n_faces=n,
        female_pct=pct(female),
        male_pct=pct(male),
        over50_pct=pct(over),
        upto50_pct=pct(upto),
        intersection_pcts=(pct(female_over), pct(female_up), pct(male_over), pct(male_up)),
        gender_confidence=gender_confidence,
        age_confidence=age_confidence,
        config_fingerprint=config_fingerprint,
    )


@dataclass(frozen=True)
class BiasProfile:
    """Actual vs predicted category shares on a named validation set."""

    validation_set: str
    gender_actual: dict  # {"Female": pct, "Male": pct}
    gender_predicted: dict
    age_actual: dict  # {"Over50": pct, "UpTo50": pct}
    age_predicted: dict

    def __post_init__(self):
        tol = 1e-6
        for name, shares in (
            ("gender actual", self.gender_actual),
            ("gender predicted", self.gender_predicted),
            ("age actual", self.age_actual),
            ("age predicted", self.age_predicted),
        ):
            total = sum(shares.values())
            if abs(total - 100.0) > tol:
                raise InputError(f"{name} shares sum to {total}, not 100")


def bias_profile(pred_gender, true_gender, pred_age_binary, true_age_binary,
                 validation_set: str = "validation") -> BiasProfile:
    """Category shares of predictions vs labels, per axis.

    Age arguments hold ``BinaryAge`` values (or their string values).
    """
    if len(pred_gender) != len(true_gender) or len(pred_age_binary) != len(true_age_binary):
        raise InputError("prediction and label sequences differ in length")
    if not pred_gender or not pred_age_binary:
        raise InputError("empty validation set")

    def gender_shares(labels):
        n = len(labels)
        female = sum(1 for lab in labels if lab == "Female")
        unknown = [lab for lab in labels if lab not in GENDER_CLASSES]
        if unknown:
            raise InputError(f"unknown gender label {unknown[0]!r}")
        return {"Female": 100.0 * female / n, "Male": 100.0 * (n - female) / n}

    def age_shares(labels):
        vals = [lab.value if isinstance(lab, BinaryAge) else lab for lab in labels]
        unknown = [v for v in vals if v not in ("Over50", "UpTo50")]
        if unknown:
            raise InputError(f"unknown binary age label {unknown[0]!r}")
        n = len(vals)
        over = sum(1 for v in vals if v == "Over50")
        return {"Over50": 100.0 * over / n, "UpTo50": 100.0 * (n - over) / n}

    return BiasProfile(
        validation_set=validation_set,
        gender_actual=gender_shares(true_gender),
        gender_predicted=gender_shares(pred_gender),
        age_actual=age_shares(true_age_binary),
        age_predicted=age_shares(pred_age_binary),
    )


# ---------------------------------------------------------------------------
# Analytics document (the contract consumed by the viewer)
# ---------------------------------------------------------------------------

def analytics_document(analytics: FilmAnalytics, bias: BiasProfile) -> dict:
    """Assemble the analytics JSON document (schema v1)."""
    f_over, f_up, m_over, m_up = analytics.intersection_pcts
    return {
        "schema_version": ANALYTICS_SCHEMA_VERSION,
        "film_id": analytics.film_id,
        "n_faces": analytics.n_faces,
        "gender": {
            "female_pct": analytics.female_pct,
            "male_pct": analytics.male_pct,
            "confidence_pct": analytics.gender_confidence,
        },
        "age": {
            "over50_pct": analytics.over50_pct,
            "upto50_pct": analytics.upto50_pct,
            "confidence_pct": analytics.age_confidence,
        },
        "intersection": {
            "female_over50_pct": f_over,
            "female_upto50_pct": f_up,
            "male_over50_pct": m_over,
            "male_upto50_pct": m_up,
        },
        "bias": {
            "validation_set": bias.validation_set,
            "gender": {
                "actual": {
                    "female_pct": bias.gender_actual["Female"],
                    "male_pct": bias.gender_actual["Male"],
                },
                "predicted": {
                    "female_pct": bias.gender_predicted["Female"],
                    "male_pct": bias.gender_predicted["Male"],
                },
            },
            "age": {
                "actual": {
                    "over50_pct": bias.age_actual["Over50"],
                    "upto50_pct": bias.age_actual["UpTo50"],
                },
                "predicted": {
                    "over50_pct": bias.age_predicted["Over50"],
                    "upto50_pct": bias.age_predicted["UpTo50"],
                },
            },
        },
        "config_fingerprint": analytics.config_fingerprint,
    }


def document_to_json(doc: dict) -> str:
    """Canonical byte-stable serialization of an analytics document.

    Percentages (every float in the document) are written with exactly
    two decimal places, matching the report formatting; key order is the
    document's insertion order. Re-serializing the same document is
    byte-identical.
    """
    return _write_value(doc, 0) + "\n"


def _write_value(value, indent: int) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{pad}  {_json_str(k)}: {_write_value(v, indent + 1)}"
            for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.2f}"
    if isinstance(value, str):
        return _json_str(value)
    raise InputError(f"unsupported value in analytics document: {type(value)}")


def _json_str(s: str) -> str:
    out = '"'
    for ch in s:
        if ch == '"':
            out += '\\"'
        elif ch == "\\":
            out += "\\\\"
        elif ord(ch) < 0x20:
            out += f"\\u{ord(ch):04x}"
        else:
            out += ch
    return out + '"'
