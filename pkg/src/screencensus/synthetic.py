"""Synthetic demo assets: rendered faces, ONNX models, datasets, fixtures.

Everything the pipeline needs to run end-to-end without external
downloads is generated here: a stylized face renderer with two visual
presentation styles (labeled Female/Male in the synthetic world) and
nine age styles (graying hair, wrinkle count), a skin-coverage ONNX
detector, a pooled-color ONNX encoder pair whose text tower is aligned
with rendered class statistics, FairFace-shaped image manifests, demo
clips, and a survey response file whose per-question statistics mirror
the published study summaries.

These assets exercise the real code paths (ONNX inference, training,
benchmarking, analytics); they make no claim about real-world accuracy.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import cv2
import numpy as np

from .classifier import AGE_CLASSES, GENDER_CLASSES
from .embedder import preprocess
from .onnxgraph import GraphBuilder

DEMO_CHECKPOINT_ID = "demo-synth-v1"
DEMO_EMBED_DIM = 64
DEMO_IMAGE_SIZE = 224
DEMO_POOL = 32  # 224 / 32 -> 7x7 grid; the towers keep the center 5x5
DETECTOR_INPUT = 160

# Published preprocessing constants reused by the demo card so the demo
# exercises the same standardization path as a real checkpoint.
_CARD_MEAN = (0.48145466, 0.4578275, 0.40821073)
_CARD_STD = (0.26862954, 0.26130258, 0.27577711)

# Rendering palette (RGB). Style 0 is the synthetic "Female" archetype,
# style 1 the "Male" one; age shifts hair toward gray and adds wrinkles.
_SKIN = {0: np.array([236, 188, 168]), 1: np.array([198, 152, 122])}
_HAIR_YOUNG = np.array([72, 48, 32])
_HAIR_OLD = np.array([132, 128, 124])

# Detector calibration (pinned; see tests for the behavioral checks).
_SKIN_REF = (np.array(_SKIN[0]) + np.array(_SKIN[1])) / 2.0 / 255.0
_TAU = 0.02
_PIXEL_GAIN = 200.0
_SCORE_GAIN = 14.0
_SCORE_MID = 0.22
_RING_PENALTY = 1.5
# (window, stride) anchor scales over the 160x160 detector input; each
# anchor is scored by its window's skin coverage minus a penalty on the
# surrounding ring's coverage, which rejects windows nested inside a
# larger face.
_ANCHOR_SCALES = ((32, 16), (48, 16), (64, 16), (96, 32))
_RING_STEPS = 1  # ring thickness in stride units


# ---------------------------------------------------------------------------
# Face rendering
# ---------------------------------------------------------------------------

def render_face(canvas: np.ndarray, cx: int, cy: int, size: int, style: int,
                age_group: int, rng: np.random.Generator) -> None:
    """Draw one stylized face onto ``canvas`` (RGB uint8, modified in place)."""
    age_frac = age_group / 8.0
    jitter = rng.integers(-6, 7, size=3)
    skin = np.clip(_SKIN[style] + jitter, 0, 255).astype(int)
    hair = np.clip(
        _HAIR_YOUNG + (_HAIR_OLD - _HAIR_YOUNG) * age_frac + rng.integers(-8, 9, 3),
        0, 255,
    ).astype(int)

    def color(arr):
        return tuple(int(v) for v in arr)

    face_w, face_h = int(0.42 * size), int(0.50 * size)
    if style == 0:
        # long hair: larger ellipse behind the face plus side falls
        cv2.ellipse(canvas, (cx, cy), (int(0.52 * size), int(0.58 * size)),
                    0, 0, 360, color(hair), -1)
        fall_w = int(0.14 * size)
        fall_top = cy - int(0.1 * size)
        fall_bot = min(canvas.shape[0], cy + int(0.55 * size))
        for sx in (cx - int(0.46 * size), cx + int(0.46 * size) - fall_w):
            cv2.rectangle(canvas, (sx, fall_top), (sx + fall_w, fall_bot),
                          color(hair), -1)
    else:
        # short cap over the top of the head
        cv2.ellipse(canvas, (cx, cy - int(0.18 * size)),
                    (int(0.46 * size), int(0.34 * size)), 0, 180, 360,
                    color(hair), -1)

    cv2.ellipse(canvas, (cx, cy), (face_w, face_h), 0, 0, 360, color(skin), -1)
    if style == 1:
        # blockier jaw
        cv2.rectangle(canvas, (cx - int(0.30 * size), cy + int(0.18 * size)),
                      (cx + int(0.30 * size), cy + int(0.42 * size)),
                      color(skin), -1)

    eye = (38, 30, 30)
    eye_r = max(2, int(0.035 * size))
    eye_dy = cy - int(0.10 * size)
    for ex in (cx - int(0.16 * size), cx + int(0.16 * size)):
        cv2.circle(canvas, (ex, eye_dy), eye_r, eye, -1)
    cv2.line(canvas, (cx - int(0.12 * size), cy + int(0.26 * size)),
             (cx + int(0.12 * size), cy + int(0.26 * size)),
             (130, 62, 62), max(1, int(0.02 * size)))

    wrinkle = color(np.clip(skin - 46, 0, 255))
    thickness = max(1, size // 80)
    for w in range(age_group):
        wy = cy - int(0.30 * size) + int(0.065 * size) * w
        cv2.line(canvas, (cx - int(0.20 * size), wy), (cx + int(0.20 * size), wy),
                 wrinkle, thickness)


def make_portrait(style: int, age_group: int, rng: np.random.Generator,
                  img_size: int = 112) -> np.ndarray:
    """A single labeled portrait.

    Backgrounds alternate between neutral gray and dark scene-like tones,
    and the face fill varies, so trained heads tolerate the framing of
    detector crops.
    """
    if rng.random() < 0.5:
        base = np.array([rng.integers(96, 120)] * 3)
    else:
        base = np.array([rng.integers(20, 50), rng.integers(20, 50),
                         rng.integers(36, 70)])
    canvas = np.tile(base.astype(np.uint8), (img_size, img_size, 1))
    noise = rng.integers(-10, 11, size=(img_size, img_size, 1))
    canvas = np.clip(canvas.astype(int) + noise, 0, 255).astype(np.uint8)
    size = int(img_size * rng.uniform(0.62, 0.88))
    cx = img_size // 2 + int(rng.integers(-5, 6))
    cy = img_size // 2 + int(rng.integers(-5, 6))
    render_face(canvas, cx, cy, size, style, age_group, rng)
    return canvas


# ---------------------------------------------------------------------------
# ONNX model builders
# ---------------------------------------------------------------------------

def _pooled_grid(image: np.ndarray) -> np.ndarray:
    """Python twin of the vision tower's pooling stage.

    Pools the preprocessed tensor to a 7x7 grid and keeps the center 5x5
    cells (the face region under typical crop margins), 75 features.
    """
    tensor = preprocess(image, DEMO_IMAGE_SIZE, _CARD_MEAN, _CARD_STD)
    grid = DEMO_IMAGE_SIZE // DEMO_POOL
    pooled = tensor.reshape(3, grid, DEMO_POOL, grid, DEMO_POOL).mean(axis=(2, 4))
    return pooled[:, 1:grid - 1, 1:grid - 1].reshape(-1)


def _projection(seed: int):
    rng = np.random.default_rng(seed)
    n_features = 3 * (DEMO_IMAGE_SIZE // DEMO_POOL - 2) ** 2
    weights = rng.normal(0.0, 1.0 / np.sqrt(n_features),
                         (DEMO_EMBED_DIM, n_features)).astype(np.float32)
    bias = rng.normal(0.0, 0.01, DEMO_EMBED_DIM).astype(np.float32)
    return weights, bias


def build_vision_tower(path, seed: int, cal_mean: np.ndarray,
                       cal_std: np.ndarray) -> None:
    """Pooled-grid tower with per-cell whitening and a fixed projection.

    ``cal_mean``/``cal_std`` are per-feature calibration constants; the
    whitening suppresses high-variance background cells so cosine
    comparisons are driven by the stable face cells.
    """
    weights, bias = _projection(seed)
    grid = DEMO_IMAGE_SIZE // DEMO_POOL
    inner = grid - 2
    g = GraphBuilder("vision_tower")
    g.add_input("image", ["N", 3, DEMO_IMAGE_SIZE, DEMO_IMAGE_SIZE])
    pooled = g.node("AveragePool", ["image"],
                    kernel_shape=[DEMO_POOL, DEMO_POOL],
                    strides=[DEMO_POOL, DEMO_POOL])
    starts = g.constant(np.array([1, 1], dtype=np.int64))
    ends = g.constant(np.array([grid - 1, grid - 1], dtype=np.int64))
    axes = g.constant(np.array([2, 3], dtype=np.int64))
    center = g.node("Slice", [pooled, starts, ends, axes])
    g.constant(cal_mean.reshape(1, 3, inner, inner).astype(np.float32), "cal_mean")
    g.constant(cal_std.reshape(1, 3, inner, inner).astype(np.float32), "cal_std")
    centered = g.node("Sub", [center, "cal_mean"])
    whitened = g.node("Div", [centered, "cal_std"])
    flat = g.node("Flatten", [whitened], axis=1)
    g.constant(weights, "proj_w")
    g.constant(bias, "proj_b")
    g.node("Gemm", [flat, "proj_w", "proj_b"], "embedding", transB=1)
    g.add_output("embedding", ["N", DEMO_EMBED_DIM])
    g.save(path)


def build_text_tower(path, concept_matrix: np.ndarray, seed: int) -> None:
    """Text tower: bag-of-words -> word-concept mix -> shared projection."""
    weights, bias = _projection(seed)
    g = GraphBuilder("text_tower")
    vocab_size = concept_matrix.shape[0]
    g.add_input("bow", ["N", vocab_size])
    g.constant(concept_matrix.astype(np.float32), "concepts")
    mixed = g.node("MatMul", ["bow", "concepts"])
    g.constant(weights, "proj_w")
    g.constant(bias, "proj_b")
    g.node("Gemm", [mixed, "proj_w", "proj_b"], "embedding", transB=1)
    g.add_output("embedding", ["N", DEMO_EMBED_DIM])
    g.save(path)


def _anchor_boxes() -> np.ndarray:
    """Anchor corner boxes for the ring-scored inner grid of each scale."""
    boxes = []
    for window, stride in _ANCHOR_SCALES:
        grid = (DETECTOR_INPUT - window) // stride + 1
        for i in range(_RING_STEPS, grid - _RING_STEPS):
            for j in range(_RING_STEPS, grid - _RING_STEPS):
                boxes.append([
                    j * stride / DETECTOR_INPUT,
                    i * stride / DETECTOR_INPUT,
                    (j * stride + window) / DETECTOR_INPUT,
                    (i * stride + window) / DETECTOR_INPUT,
                ])
    return np.array(boxes, dtype=np.float32)


def build_detector(path) -> None:
    """Skin-coverage dense detector over a fixed anchor grid."""
    g = GraphBuilder("face_detector")
    g.add_input("image", [1, 3, DETECTOR_INPUT, DETECTOR_INPUT])
    g.constant(_SKIN_REF.reshape(1, 3, 1, 1).astype(np.float32), "skin_ref")
    diff = g.node("Sub", ["image", "skin_ref"])
    sq = g.node("Mul", [diff, diff])
    dist = g.node("ReduceMean", [sq], axes=[1], keepdims=1)
    g.constant(np.array(_TAU, dtype=np.float32).reshape(1, 1, 1, 1), "tau")
    margin = g.node("Sub", ["tau", dist])
    g.constant(np.array(_PIXEL_GAIN, dtype=np.float32).reshape(1, 1, 1, 1), "pixel_gain")
    scaled = g.node("Mul", [margin, "pixel_gain"])
    skinness = g.node("Sigmoid", [scaled])

    per_scale = []
    for window, stride in _ANCHOR_SCALES:
        grid = (DETECTOR_INPUT - window) // stride + 1
        outer = window + 2 * stride * _RING_STEPS
        # window coverage c and enclosing-window coverage s; the ring mean
        # q = (s*outer^2 - c*window^2) / (outer^2 - window^2), so the score
        # argument c - penalty*q is the linear combination a*c - b*s below.
        ring_area = float(outer ** 2 - window ** 2)
        coef_center = 1.0 + _RING_PENALTY * window ** 2 / ring_area
        coef_outer = _RING_PENALTY * outer ** 2 / ring_area

        center = g.node("AveragePool", [skinness],
                        kernel_shape=[window, window], strides=[stride, stride])
        surround = g.node("AveragePool", [skinness],
                          kernel_shape=[outer, outer], strides=[stride, stride])
        lo, hi = _RING_STEPS, grid - _RING_STEPS
        starts = g.constant(np.array([lo, lo], dtype=np.int64))
        ends = g.constant(np.array([hi, hi], dtype=np.int64))
        axes = g.constant(np.array([2, 3], dtype=np.int64))
        inner = g.node("Slice", [center, starts, ends, axes])
        a = g.constant(np.array(coef_center, np.float32).reshape(1, 1, 1, 1))
        b = g.constant(np.array(coef_outer, np.float32).reshape(1, 1, 1, 1))
        arg = g.node("Sub", [g.node("Mul", [inner, a]), g.node("Mul", [surround, b])])
        per_scale.append(g.node("Flatten", [arg], axis=1))

    merged = per_scale[0] if len(per_scale) == 1 else g.node(
        "Concat", per_scale, axis=1
    )
    g.constant(np.array(_SCORE_MID, dtype=np.float32).reshape(1, 1), "score_mid")
    centered = g.node("Sub", [merged, "score_mid"])
    g.constant(np.array(_SCORE_GAIN, dtype=np.float32).reshape(1, 1), "score_gain")
    sharpened = g.node("Mul", [centered, "score_gain"])
    g.node("Sigmoid", [sharpened], "scores")

    anchors = _anchor_boxes()
    g.constant(anchors, "anchor_boxes")
    g.node("Identity", ["anchor_boxes"], "boxes")
    g.add_output("boxes", list(anchors.shape))
    g.add_output("scores", [1, anchors.shape[0]])
    g.save(path)


_FILLERS = ("the", "face", "of", "a", "person", "in", "age", "group",
            "photo", "portrait")


def build_encoder_dir(model_dir, seed: int = 7) -> Path:
    """Generate the demo encoder checkpoint directory.

    Calibration renders fix the whitening constants baked into the vision
    tower; the text tower's word-concept rows are the whitened mean
    features of rendered samples of each class, so image and text
    embeddings share a space by construction. Filler words carry no
    concept mass.
    """
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    per_gender = {0: [], 1: []}
    per_age = {i: [] for i in range(9)}
    everything = []
    for style in (0, 1):
        for age_group in range(9):
            for _ in range(16):
                feats = _pooled_grid(make_portrait(style, age_group, rng))
                per_gender[style].append(feats)
                per_age[age_group].append(feats)
                everything.append(feats)
    stacked = np.stack(everything)
    cal_mean = stacked.mean(axis=0)
    cal_std = np.maximum(stacked.std(axis=0), 1e-3)

    def whitened_mean(rows):
        return (np.mean(rows, axis=0) - cal_mean) / cal_std

    vocab_words = list(_FILLERS) + ["man", "woman", "old", "young"] + list(AGE_CLASSES)
    vocab = {"<unk>": 0}
    for word in vocab_words:
        vocab[word] = len(vocab)

    concepts = np.zeros((len(vocab), cal_mean.size), dtype=np.float32)
    concepts[vocab["woman"]] = whitened_mean(per_gender[0])
    concepts[vocab["man"]] = whitened_mean(per_gender[1])
    for i, group in enumerate(AGE_CLASSES):
        concepts[vocab[group]] = whitened_mean(per_age[i])
    concepts[vocab["young"]] = whitened_mean(per_age[0] + per_age[1] + per_age[2])
    concepts[vocab["old"]] = whitened_mean(per_age[6] + per_age[7] + per_age[8])

    build_vision_tower(model_dir / "vision.onnx", seed=1234,
                       cal_mean=cal_mean, cal_std=cal_std)
    build_text_tower(model_dir / "text.onnx", concepts, seed=1234)
    (model_dir / "vocab.json").write_text(json.dumps(vocab, indent=1) + "\n")
    card = {
        "checkpoint_id": DEMO_CHECKPOINT_ID,
        "embed_dim": DEMO_EMBED_DIM,
        "image_size": DEMO_IMAGE_SIZE,
        "mean": list(_CARD_MEAN),
        "std": list(_CARD_STD),
        "context_length": 16,
        "logit_scale": 100.0,
        "text_input": "bow",
        "vision_file": "vision.onnx",
        "text_file": "text.onnx",
        "vocab_file": "vocab.json",
    }
    (model_dir / "card.json").write_text(json.dumps(card, indent=2) + "\n")
    return model_dir


# ---------------------------------------------------------------------------
# Datasets, clips, survey fixture
# ---------------------------------------------------------------------------

def make_dataset(out_dir, n_train: int = 480, n_val: int = 240, seed: int = 11):
    """FairFace-shaped synthetic dataset: images plus CSV manifests."""
    out_dir = Path(out_dir)
    rng = np.random.default_rng(seed)
    manifests = {}
    for split, count in (("train", n_train), ("val", n_val)):
        split_dir = out_dir / split
        split_dir.mkdir(parents=True, exist_ok=True)
        rows = []
        for idx in range(count):
            style = int(rng.integers(0, 2))
            age_group = int(rng.integers(0, 9))
            image = make_portrait(style, age_group, rng)
            rel = f"{split}/{idx:05d}.png"
            cv2.imwrite(str(out_dir / rel), cv2.cvtColor(image, cv2.COLOR_RGB2BGR))
            rows.append((rel, AGE_CLASSES[age_group], GENDER_CLASSES[style]))
        manifest = out_dir / f"{split}_manifest.csv"
        with open(manifest, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["file", "age", "gender"])
            writer.writerows(rows)
        manifests[split] = manifest
    return manifests


def make_clip(path, cast, seconds: float = 6.0, fps: float = 4.0,
              frame_size=(480, 480), seed: int = 3) -> None:
    """Write a synthetic clip; ``cast`` is a list of (style, age_group) faces.

    Cast members appear in "scenes" of at most two non-overlapping slots,
    cycling through the cast so each member gets equal screen time.
    """
    rng = np.random.default_rng(seed)
    w, h = frame_size
    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), fps, (w, h))
    if not writer.isOpened():
        raise RuntimeError(f"cannot open video writer for {path}")
    n_frames = int(round(seconds * fps))
    scenes = [cast[i:i + 2] for i in range(0, len(cast), 2)] or [[]]
    frames_per_scene = max(1, n_frames // len(scenes))
    slots = [0.5] if max(len(s) for s in scenes) <= 1 else [0.28, 0.72]
    for t in range(n_frames):
        frame = np.full((h, w, 3), 28, dtype=np.uint8)
        frame[:, :, 2] = 48  # cool backdrop, far from skin tones
        scene = scenes[min(t // frames_per_scene, len(scenes) - 1)]
        for slot, (style, age_group) in zip(slots, scene):
            cx = int(w * slot + 10 * np.sin(t / 3.0 + slot * 7))
            cy = int(h * 0.5 + 8 * np.cos(t / 4.0 + slot * 5))
            render_face(frame, cx, cy, 150, style, age_group, rng)
        writer.write(cv2.cvtColor(frame, cv2.COLOR_RGB2BGR))
    writer.release()


# Survey fixture: per-question data whose sufficient statistics match the
# published study summaries (Q2.1's 19-of-30 count is stated outright; the
# other compositions were fit to the reported means/intervals).
_BINARY_COUNTS = {
    # code: (n_correct, n_wrong, n_idk)
    "Q2.1": (19, 11, 0),
    "Q2.2": (26, 3, 1),
    "Q2.3": (25, 3, 2),
    "Q2.4": (18, 12, 0),
    "Q2.5": (23, 7, 0),
    "Q2.6": (24, 6, 0),
    "Q2.7": (23, 7, 0),
}
_MULTISELECT_VECTORS = (
    ["1111"] * 15 + ["1101"] * 10 + ["0101"] * 1 + ["1000"] * 3 + ["0000"] * 1
)
_LIKERT_COUNTS = {
    # code: {score: count}, 30 participants each
    "Q2.9": {2: 4, 3: 19, 4: 1, 5: 6},
    "Q2.10": {1: 3, 2: 11, 3: 12, 4: 4},
    "Q3.1": {1: 2, 2: 7, 3: 10, 4: 8, 5: 3},
    "Q3.2": {1: 2, 2: 6, 3: 10, 4: 8, 5: 4},
    "Q3.3": {1: 2, 2: 5, 3: 9, 4: 7, 5: 7},
    "Q3.4": {1: 2, 2: 4, 3: 7, 4: 8, 5: 9},
    "Q3.5": {1: 1, 2: 3, 3: 8, 4: 8, 5: 10},
    "Q3.6": {1: 2, 2: 7, 3: 8, 4: 7, 5: 6},
    "Q3.7": {1: 12, 2: 6, 3: 6, 4: 3, 5: 3},
    "Q3.8": {1: 1, 2: 2, 3: 9, 4: 9, 5: 9},
    "Q3.9": {1: 1, 2: 8, 3: 9, 4: 8, 5: 4},
}


def make_survey_csv(path) -> None:
    rows = []
    for code, (n_correct, n_wrong, n_idk) in _BINARY_COUNTS.items():
        responses = ["1"] * n_correct + ["0"] * n_wrong + ["idk"] * n_idk
        rows.extend((f"P{i + 1:02d}", code, r) for i, r in enumerate(responses))
    rows.extend(
        (f"P{i + 1:02d}", "Q2.8", vec) for i, vec in enumerate(_MULTISELECT_VECTORS)
    )
    for code, counts in _LIKERT_COUNTS.items():
        responses = [str(score) for score, n in sorted(counts.items()) for _ in range(n)]
        rows.extend((f"P{i + 1:02d}", code, r) for i, r in enumerate(responses))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["participant_id", "question_code", "response"])
        writer.writerows(rows)


# Hand-authored film documents with the published headline shares; the
# intersections, confidences, and bias shares are display fixtures chosen
# to satisfy every marginal-consistency invariant.
FILM_FIXTURES = [
    {
        "film_id": "film-1", "n_faces": 6841,
        "female_pct": 68.29, "over50_pct": 12.52,
        "female_over50_pct": 9.83, "male_over50_pct": 2.69,
        "gender_confidence": 97.0, "age_confidence": 87.0,
    },
    {
        "film_id": "film-2", "n_faces": 2723,
        "female_pct": 66.66, "over50_pct": 46.29,
        "female_over50_pct": 31.12, "male_over50_pct": 15.17,
        "gender_confidence": 96.0, "age_confidence": 91.0,
    },
    {
        "film_id": "film-3", "n_faces": 2677,
        "female_pct": 27.22, "over50_pct": 8.88,
        "female_over50_pct": 0.0, "male_over50_pct": 8.88,
        "gender_confidence": 98.0, "age_confidence": 84.0,
    },
]

FIXTURE_BIAS = {
    "validation_set": "fixture-validation",
    "gender_actual": {"Female": 46.8, "Male": 53.2},
    "gender_predicted": {"Female": 46.3, "Male": 53.7},
    "age_actual": {"Over50": 14.9, "UpTo50": 85.1},
    "age_predicted": {"Over50": 13.1, "UpTo50": 86.9},
}


def film_fixture_documents() -> list[dict]:
    from .aggregate import BiasProfile, FilmAnalytics, analytics_document

    bias = BiasProfile(**FIXTURE_BIAS)
    docs = []
    for spec in FILM_FIXTURES:
        female = spec["female_pct"]
        over = spec["over50_pct"]
        f_over = spec["female_over50_pct"]
        m_over = spec["male_over50_pct"]
        analytics = FilmAnalytics(
            film_id=spec["film_id"],
            n_faces=spec["n_faces"],
            female_pct=female,
            male_pct=round(100.0 - female, 2),
            over50_pct=over,
            upto50_pct=round(100.0 - over, 2),
            intersection_pcts=(
                f_over,
                round(female - f_over, 2),
                m_over,
                round(100.0 - female - m_over, 2),
            ),
            gender_confidence=spec["gender_confidence"],
            age_confidence=spec["age_confidence"],
            config_fingerprint="fixture",
        )
        docs.append(analytics_document(analytics, bias))
    return docs


def write_film_fixtures(out_dir) -> list[Path]:
    from .aggregate import document_to_json

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for doc in film_fixture_documents():
        path = out_dir / f"{doc['film_id']}.json"
        path.write_text(document_to_json(doc))
        paths.append(path)
    return paths


def make_demo(out_dir, seed: int = 0) -> dict:
    """Generate the full demo asset bundle; returns the path map."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    encoder_dir = build_encoder_dir(out_dir / "encoder", seed=7 + seed)
    detector_path = out_dir / "detector.onnx"
    build_detector(detector_path)
    manifests = make_dataset(out_dir / "dataset", seed=11 + seed)
    clip_single = out_dir / "clip_single_face.avi"
    make_clip(clip_single, [(0, 4)], seed=3 + seed)
    clip_mixed = out_dir / "clip_mixed_cast.avi"
    make_clip(clip_mixed, [(0, 2), (0, 7), (1, 3), (1, 8)], seconds=8.0,
              seed=5 + seed)
    clip_elder = out_dir / "clip_elder_cast.avi"
    make_clip(clip_elder, [(0, 8), (1, 7)], seconds=5.0, seed=9 + seed)
    survey_csv = out_dir / "survey_responses.csv"
    make_survey_csv(survey_csv)
    fixture_dir = out_dir / "film_fixtures"
    write_film_fixtures(fixture_dir)
    return {
        "encoder": encoder_dir,
        "detector": detector_path,
        "train_manifest": manifests["train"],
        "val_manifest": manifests["val"],
        "dataset_root": out_dir / "dataset",
        "clip_single": clip_single,
        "clip_mixed": clip_mixed,
        "clip_elder": clip_elder,
        "survey": survey_csv,
        "film_fixtures": fixture_dir,
    }
