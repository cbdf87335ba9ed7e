"""Shared test helpers: the golden prediction set and hand-built oracles."""

import numpy as np

from screencensus.aggregate import BiasProfile
from screencensus.classifier import AGE_CLASSES, GENDER_CLASSES, ProbDist

# Age distributions with a 0.87/0.13 binarized split either way.
AGE_OVER = np.array([0.02, 0.02, 0.02, 0.02, 0.03, 0.02, 0.50, 0.27, 0.10])
AGE_UNDER = np.array([0.30, 0.20, 0.15, 0.10, 0.07, 0.05, 0.06, 0.04, 0.03])

GOLDEN_COUNTS = {
    # (gender, binarized age) -> face count; n = 10,000 chosen so the
    # rounded shares hit the published headline figures exactly:
    # female 6,829/10,000 = 68.29%, over-50 1,252/10,000 = 12.52%
    ("Female", "Over50"): 855,
    ("Female", "UpTo50"): 5974,
    ("Male", "Over50"): 397,
    ("Male", "UpTo50"): 2774,
}

GOLDEN_BIAS = BiasProfile(
    validation_set="fixture-validation",
    gender_actual={"Female": 46.8, "Male": 53.2},
    gender_predicted={"Female": 46.3, "Male": 53.7},
    age_actual={"Over50": 14.9, "UpTo50": 85.1},
    age_predicted={"Over50": 13.1, "UpTo50": 86.9},
)


def golden_predictions(shuffle_seed: int | None = 99):
    """The synthetic per-face prediction list behind the golden document."""
    preds = []
    for (gender, bin_age), count in GOLDEN_COUNTS.items():
        gender_probs = np.array([0.97, 0.03]) if gender == "Female" else np.array([0.03, 0.97])
        age_probs = AGE_OVER if bin_age == "Over50" else AGE_UNDER
        preds.extend(
            (ProbDist(gender_probs, GENDER_CLASSES), ProbDist(age_probs, AGE_CLASSES))
            for _ in range(count)
        )
    if shuffle_seed is not None:
        rng = np.random.default_rng(shuffle_seed)
        order = rng.permutation(len(preds))
        preds = [preds[i] for i in order]
    return preds


def random_prediction_set(rng, max_faces: int = 60):
    n = int(rng.integers(1, max_faces + 1))
    preds = []
    for _ in range(n):
        g = rng.dirichlet(np.ones(2))
        a = rng.dirichlet(np.ones(9))
        preds.append((ProbDist(g, GENDER_CLASSES), ProbDist(a, AGE_CLASSES)))
    return preds
