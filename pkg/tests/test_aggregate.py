"""Film-level aggregation: binarization, invariants, golden document."""

from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import GOLDEN_BIAS, golden_predictions, random_prediction_set
from screencensus.aggregate import (
    BiasProfile,
    BinaryAge,
    FilmAnalytics,
    analytics_document,
    bias_profile,
    binarize_age,
    binarize_age_label,
    document_to_json,
    film_analytics,
)
from screencensus.classifier import AGE_CLASSES, GENDER_CLASSES, ProbDist
from screencensus.errors import InputError, NoFacesError

FIXTURES = Path(__file__).parent / "fixtures"


def summation_oracle(probs) -> BinaryAge:
    """Independent two-sum comparison over explicit group membership."""
    over = sum(p for group, p in zip(AGE_CLASSES, probs)
               if group in ("50-59", "60-69", "70+"))
    under = sum(p for group, p in zip(AGE_CLASSES, probs)
                if group not in ("50-59", "60-69", "70+"))
    return BinaryAge.OVER50 if over > under else BinaryAge.UPTO50


class TestBinarizeAge:
    def test_one_hot_oldest(self):
        probs = np.zeros(9)
        probs[8] = 1.0
        assert binarize_age(probs) is BinaryAge.OVER50

    def test_uniform_is_upto50(self):
        assert binarize_age(np.full(9, 1 / 9)) is BinaryAge.UPTO50

    def test_exact_tie_goes_upto50(self):
        probs = np.zeros(9)
        probs[6] = 0.5  # 50-59
        probs[0] = 0.5
        assert binarize_age(probs) is BinaryAge.UPTO50

    def test_agrees_with_summation_oracle(self, rng):
        for _ in range(1000):
            probs = rng.dirichlet(np.ones(9) * rng.uniform(0.2, 5.0))
            assert binarize_age(probs) is summation_oracle(probs)

    def test_wrong_class_count(self):
        with pytest.raises(InputError):
            binarize_age(np.full(5, 0.2))

    def test_wrong_class_order_rejected(self):
        reordered = tuple(reversed(AGE_CLASSES))
        dist = ProbDist(np.full(9, 1 / 9), reordered)
        with pytest.raises(InputError):
            binarize_age(dist)

    def test_label_binarization(self):
        assert binarize_age_label("50-59") is BinaryAge.OVER50
        assert binarize_age_label("40-49") is BinaryAge.UPTO50
        with pytest.raises(InputError):
            binarize_age_label("fifty")


class TestFilmAnalytics:
    def test_single_face(self):
        age = np.zeros(9)
        age[8] = 1.0
        analytics = film_analytics(
            "one", [(ProbDist(np.array([1.0, 0.0]), GENDER_CLASSES),
                     ProbDist(age, AGE_CLASSES))]
        )
        assert analytics.female_pct == 100.0
        assert analytics.over50_pct == 100.0
        assert analytics.gender_confidence == 100.0

    def test_empty_rejected_with_message(self):
        with pytest.raises(NoFacesError, match="no faces detected"):
            film_analytics("empty", [])

    def test_invariants_on_random_sets(self, rng):
        for _ in range(200):
            preds = random_prediction_set(rng)
            a = film_analytics("x", preds)
            assert abs(a.female_pct + a.male_pct - 100.0) <= 1e-6
            assert abs(a.over50_pct + a.upto50_pct - 100.0) <= 1e-6
            assert abs(sum(a.intersection_pcts) - 100.0) <= 1e-6
            f_over, f_up, m_over, m_up = a.intersection_pcts
            assert abs(f_over + f_up - a.female_pct) <= 1e-6
            assert abs(m_over + m_up - a.male_pct) <= 1e-6
            assert abs(f_over + m_over - a.over50_pct) <= 1e-6
            assert 50.0 - 1e-9 <= a.gender_confidence <= 100.0 + 1e-9
            assert 50.0 - 1e-9 <= a.age_confidence <= 100.0 + 1e-9

    def test_permutation_invariance(self, rng):
        preds = random_prediction_set(rng, max_faces=40)
        a1 = film_analytics("x", preds)
        order = rng.permutation(len(preds))
        a2 = film_analytics("x", [preds[i] for i in order])
        assert a1.female_pct == a2.female_pct
        assert a1.intersection_pcts == a2.intersection_pcts

    def test_worker_counts_identical(self, rng):
        preds = random_prediction_set(rng, max_faces=500) * 20  # cross chunks
        docs = []
        for workers in (1, 8):
            a = film_analytics("w", preds, config_fingerprint="cfg",
                               workers=workers)
            docs.append(document_to_json(analytics_document(a, GOLDEN_BIAS)))
        assert docs[0] == docs[1]

    def test_argmax9_confidence_mode(self, rng):
        preds = random_prediction_set(rng)
        a = film_analytics("x", preds, age_confidence_mode="argmax9")
        assert 100.0 / 9 - 1e-9 <= a.age_confidence <= 100.0 + 1e-9

    def test_bad_mode_rejected(self, rng):
        with pytest.raises(InputError):
            film_analytics("x", random_prediction_set(rng),
                           age_confidence_mode="belief")

    def test_inconsistent_analytics_rejected(self):
        with pytest.raises(InputError):
            FilmAnalytics("bad", 10, 60.0, 40.0, 30.0, 70.0,
                          (20.0, 30.0, 10.0, 40.0), 80.0, 80.0)


class TestGoldenDocument:
    def test_constructed_set_yields_published_shares(self):
        analytics = film_analytics("golden-film", golden_predictions(),
                                   config_fingerprint="golden-fixture")
        assert round(analytics.female_pct, 2) == 68.29
        assert round(analytics.over50_pct, 2) == 12.52
        assert analytics.n_faces == 10000

    def test_byte_exact_document(self):
        analytics = film_analytics("golden-film", golden_predictions(),
                                   config_fingerprint="golden-fixture")
        text = document_to_json(analytics_document(analytics, GOLDEN_BIAS))
        expected = (FIXTURES / "golden_film_analytics.json").read_text()
        assert text == expected

    def test_serialization_formats_two_decimals(self):
        analytics = film_analytics("golden-film", golden_predictions(),
                                   config_fingerprint="golden-fixture")
        text = document_to_json(analytics_document(analytics, GOLDEN_BIAS))
        assert '"female_pct": 68.29' in text
        assert '"confidence_pct": 97.00' in text


class TestBiasProfile:
    def test_perfect_predictor_identity(self):
        genders = ["Female", "Male", "Female", "Male"]
        ages = [BinaryAge.OVER50, BinaryAge.UPTO50] * 2
        prof = bias_profile(genders, genders, ages, ages)
        assert prof.gender_actual == prof.gender_predicted
        assert prof.age_actual == prof.age_predicted

    def test_constant_predictor(self):
        true_g = ["Female", "Male"] * 5
        pred_g = ["Male"] * 10
        ages = [BinaryAge.UPTO50] * 10
        prof = bias_profile(pred_g, true_g, ages, ages)
        assert prof.gender_predicted["Female"] == 0.0
        assert prof.gender_actual["Female"] == 50.0

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            bias_profile(["Female"], ["Female", "Male"],
                         [BinaryAge.UPTO50], [BinaryAge.UPTO50])

    def test_shares_sum_to_100(self, rng):
        n = 40
        pred_g = [GENDER_CLASSES[i] for i in rng.integers(0, 2, n)]
        true_g = [GENDER_CLASSES[i] for i in rng.integers(0, 2, n)]
        pred_a = [BinaryAge.OVER50 if i else BinaryAge.UPTO50
                  for i in rng.integers(0, 2, n)]
        true_a = [BinaryAge.OVER50 if i else BinaryAge.UPTO50
                  for i in rng.integers(0, 2, n)]
        prof = bias_profile(pred_g, true_g, pred_a, true_a)
        for shares in (prof.gender_actual, prof.gender_predicted,
                       prof.age_actual, prof.age_predicted):
            assert abs(sum(shares.values()) - 100.0) <= 1e-6

    def test_invalid_profile_rejected(self):
        with pytest.raises(InputError):
            BiasProfile("v", {"Female": 60.0, "Male": 50.0},
                        {"Female": 50.0, "Male": 50.0},
                        {"Over50": 50.0, "UpTo50": 50.0},
                        {"Over50": 50.0, "UpTo50": 50.0})


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_document_reserialization_is_byte_identical(seed):
    rng = np.random.default_rng(seed)
    preds = random_prediction_set(rng)
    a = film_analytics("prop", preds, config_fingerprint="cfg")
    doc = analytics_document(a, GOLDEN_BIAS)
    assert document_to_json(doc) == document_to_json(doc)
