"""End-to-end flows shared by the CLI commands.

Glue between the ingestion, detection, embedding, classification and
aggregation layers: dataset embedding packs, the benchmark protocol over
a labeled manifest, and full-video analysis.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from . import bench
from .aggregate import (
    BiasProfile,
    analytics_document,
    bias_profile,
    binarize_age_label,
    film_analytics,
)
from .classifier import (
    AGE_CLASSES,
    GENDER_CLASSES,
    SoftmaxHead,
    softmax_probs,
    zero_shot_classify,
)
from .config import RunConfig
from .embedder import (
    Embedding,
    EmbeddingCache,
    Encoder,
    embed_images_cached,
    embed_text_cached,
)
from .errors import InputError, NoFacesError
from .facedet import FaceDetector
from .ingest import load_image, load_manifest, sample_frames

logger = logging.getLogger(__name__)

GENDER_PROMPTS = {"Male": "the face of a man", "Female": "the face of a woman"}
AGE_PROMPT_TEMPLATE = "A person in the {} age group"

PACK_SCHEMA_VERSION = 1


def embed_dataset(manifest_path, images_root, encoder: Encoder,
                  cache: EmbeddingCache | None = None, limit: int | None = None,
                  seed: int = 0, batch_size: int = 64):
    """Embed a labeled manifest; returns (X, gender_labels, age_labels, paths)."""
    items = load_manifest(manifest_path)
    if not items:
        raise InputError(f"manifest {manifest_path} has no rows")
    picked = bench.select_subset(len(items), limit, seed)
    items = [items[i] for i in picked]
    images_root = Path(images_root)
    vectors = np.zeros((len(items), encoder.dim), dtype=np.float32)
    for start in range(0, len(items), batch_size):
        chunk = items[start:start + batch_size]
        rasters = [load_image(images_root / item.path) for item in chunk]
        vectors[start:start + len(chunk)] = embed_images_cached(encoder, cache, rasters)
        logger.info("embedded %d/%d images", min(start + batch_size, len(items)), len(items))
    genders = [item.gender_label for item in items]
    ages = [item.age_label for item in items]
    paths = [item.path for item in items]
    return vectors, genders, ages, paths


def save_pack(path, vectors, genders, ages, paths, checkpoint_id: str,
              config_fingerprint: str = "") -> None:
    np.savez_compressed(
        path, schema_version=PACK_SCHEMA_VERSION, vectors=vectors,
        gender_labels=np.array(genders), age_labels=np.array(ages),
        paths=np.array(paths), checkpoint_id=checkpoint_id,
        config_fingerprint=config_fingerprint,
    )


def load_pack(path):
    with np.load(path, allow_pickle=False) as pack:
        return (
            pack["vectors"].astype(np.float32),
            [str(x) for x in pack["gender_labels"]],
            [str(x) for x in pack["age_labels"]],
            [str(x) for x in pack["paths"]],
            str(pack["checkpoint_id"]),
        )


def head_predictions(head: SoftmaxHead, vectors: np.ndarray) -> list[str]:
    logits = vectors @ head.weights.T + head.biases
    return [head.class_names[i] for i in np.argmax(logits, axis=1)]


def zero_shot_predictions(encoder: Encoder, cache, vectors: np.ndarray,
                          task: str, logit_scale: float) -> list[str]:
    if task == "gender":
        names = list(GENDER_CLASSES)
        prompts = [GENDER_PROMPTS[name] for name in names]
    else:
        names = list(AGE_CLASSES)
        prompts = [AGE_PROMPT_TEMPLATE.format(name) for name in names]
    labels = []
    embed_text = lambda p: embed_text_cached(encoder, cache, p)  # noqa: E731
    for vec in vectors:
        dist = zero_shot_classify(Embedding(vec), prompts, embed_text,
                                  logit_scale, tuple(names))
        labels.append(dist.class_names[dist.argmax_index()])
    return labels


def run_benchmark(manifest_path, images_root, encoder: Encoder,
                  gender_head: SoftmaxHead | None, age_head: SoftmaxHead | None,
                  cache: EmbeddingCache | None = None, zero_shot: bool = True,
                  limit: int | None = None, seed: int = 0,
                  logit_scale: float | None = None):
    """The benchmarking protocol: heads and the zero-shot baseline.

    Returns (reports, bias) where bias is the actual-vs-predicted profile
    of the trained heads (or the zero-shot baseline when no heads are
    given) on the evaluated subset.
    """
    vectors, genders, ages, _ = embed_dataset(
        manifest_path, images_root, encoder, cache=cache, limit=limit, seed=seed
    )
    scale = encoder.logit_scale if logit_scale is None else logit_scale
    reports = []
    pred_gender = pred_age = None
    if zero_shot:
        zs_gender = zero_shot_predictions(encoder, cache, vectors, "gender", scale)
        reports.append(bench.evaluate(zs_gender, genders, GENDER_CLASSES,
                                      task="gender", model_name="zero-shot"))
        zs_age = zero_shot_predictions(encoder, cache, vectors, "age", scale)
        reports.append(bench.evaluate(zs_age, ages, AGE_CLASSES,
                                      task="age", model_name="zero-shot"))
        pred_gender, pred_age = zs_gender, zs_age
    if gender_head is not None:
        pred_gender = head_predictions(gender_head, vectors)
        reports.append(bench.evaluate(pred_gender, genders, GENDER_CLASSES,
                                      task="gender", model_name="trained-head"))
    if age_head is not None:
        pred_age = head_predictions(age_head, vectors)
        reports.append(bench.evaluate(pred_age, ages, AGE_CLASSES,
                                      task="age", model_name="trained-head"))
    if not reports:
        raise InputError("nothing to benchmark: no heads and zero-shot disabled")

    bias = None
    if pred_gender is not None and pred_age is not None:
        bias = bias_profile(
            pred_gender, genders,
            [binarize_age_label(a) for a in pred_age],
            [binarize_age_label(a) for a in ages],
            validation_set=Path(manifest_path).name,
        )
    return reports, bias


def analyze_video(video_path, config: RunConfig, encoder: Encoder,
                  detector: FaceDetector, gender_head: SoftmaxHead,
                  age_head: SoftmaxHead, film_id: str,
                  bias: BiasProfile | None = None,
                  cache: EmbeddingCache | None = None):
    """Detect, embed and classify faces of a video; aggregate analytics.

    Returns (analytics, document, n_frames). Frames stream through
    detection in timestamp order so downstream aggregation is
    order-stable regardless of upstream parallelism.
    """
    predictions = []
    n_frames = 0
    for frame in sample_frames(video_path, config.fps):
        n_frames += 1
        crops = detector.detect(frame, config.detection_threshold)
        if not crops:
            continue
        vectors = embed_images_cached(encoder, cache, [c.pixels for c in crops])
        for vec in vectors:
            gender_dist = softmax_probs(gender_head, vec)
            age_dist = softmax_probs(age_head, vec)
            predictions.append((gender_dist, age_dist))
    logger.info("sampled %d frames, %d faces", n_frames, len(predictions))
    if not predictions:
        raise NoFacesError(
            f"no faces detected in {video_path} at threshold "
            f"{config.detection_threshold}"
        )
    analytics = film_analytics(
        film_id, predictions, config_fingerprint=config.fingerprint(),
        age_confidence_mode=config.age_confidence_mode,
    )
    if bias is None:
        bias = _neutral_bias()
    doc = analytics_document(analytics, bias)
    return analytics, doc, n_frames


def _neutral_bias() -> BiasProfile:
    """Placeholder profile when no validation run is supplied."""
    half = {"Female": 50.0, "Male": 50.0}
    halves = {"Over50": 50.0, "UpTo50": 50.0}
    return BiasProfile(
        validation_set="none (no validation run supplied)",
        gender_actual=dict(half), gender_predicted=dict(half),
        age_actual=dict(halves), age_predicted=dict(halves),
    )


def bias_to_json(bias: BiasProfile) -> dict:
    return {
        "validation_set": bias.validation_set,
        "gender_actual": bias.gender_actual,
        "gender_predicted": bias.gender_predicted,
        "age_actual": bias.age_actual,
        "age_predicted": bias.age_predicted,
    }


def bias_from_json(doc: dict) -> BiasProfile:
    return BiasProfile(
        validation_set=doc["validation_set"],
        gender_actual=doc["gender_actual"],
        gender_predicted=doc["gender_predicted"],
        age_actual=doc["age_actual"],
        age_predicted=doc["age_predicted"],
    )
