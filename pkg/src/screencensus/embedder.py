"""Vision-language embeddings for face crops and text prompts.

Encoder weights are ONNX files executed through OpenCV's DNN backend. A
checkpoint is a directory holding the vision tower, text tower, tokenizer
vocabulary, and a ``card.json`` with the preprocessing constants (spatial
size, channel mean/std, context length). Those constants are data: they
ship in the checkpoint card, are mirrored in ``assets/`` for the default
published encoder family, and are pinned by a golden-tensor test.

Embeddings are cached on disk keyed by (checkpoint id, content hash) so
benchmark reruns skip encoder inference.
"""

from __future__ import annotations

import hashlib
import json
import re
import struct
import threading
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
from PIL import Image

from .errors import InputError, ModelLoadError

_ASSETS = Path(__file__).parent / "assets"
DEFAULT_CARD = _ASSETS / "encoder_vit_b32_card.json"

_CACHE_MAGIC = b"SCEMB001"


@dataclass(frozen=True)
class Embedding:
    """Fixed-dimension real vector in the shared image-text space."""

    vector: np.ndarray
    checkpoint_id: str = ""

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.float32).reshape(-1)
        object.__setattr__(self, "vector", vec)
        if vec.size == 0 or not np.all(np.isfinite(vec)):
            raise InputError("embedding must be a non-empty finite vector")

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def unit(self) -> np.ndarray:
        norm = self.norm
        if norm == 0.0:
            raise InputError("embedding has zero norm")
        return self.vector / norm


def cosine(a: Embedding, b: Embedding) -> float:
    va = a.vector.astype(np.float64)
    vb = b.vector.astype(np.float64)
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise InputError("cannot take cosine with a zero vector")
    return float(va @ vb / (na * nb))


# ---------------------------------------------------------------------------
# Preprocessing
# ---------------------------------------------------------------------------

def preprocess(pixels, image_size: int, mean, std) -> np.ndarray:
    """Resize/crop/standardize a raster to the encoder input tensor.

    The shorter side is resized to ``image_size`` with bicubic
    interpolation, the center ``image_size`` square is cropped, and each
    channel is standardized with the checkpoint constants. Accepts uint8
    (0..255) or float (0..1) HxWx3 arrays; returns float32 (3, S, S).
    """
    arr = np.asarray(pixels)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"expected a HxWx3 raster, got shape {arr.shape}")
    h, w = arr.shape[:2]
    # shorter side -> image_size; the long side truncates, matching the
    # published reference recipe
    if h <= w:
        new_h, new_w = image_size, max(1, int(image_size * w / h))
    else:
        new_h, new_w = max(1, int(image_size * h / w)), image_size

    if arr.dtype == np.uint8:
        img = Image.fromarray(arr, mode="RGB").resize((new_w, new_h), Image.BICUBIC)
        resized = np.asarray(img, dtype=np.float32) / 255.0
    else:
        arr = arr.astype(np.float32)
        channels = [
            np.asarray(
                Image.fromarray(arr[:, :, c], mode="F").resize((new_w, new_h), Image.BICUBIC)
            )
            for c in range(3)
        ]
        resized = np.stack(channels, axis=2)

    top = int(round((new_h - image_size) / 2.0))
    left = int(round((new_w - image_size) / 2.0))
    cropped = resized[top:top + image_size, left:left + image_size]
    mean = np.asarray(mean, dtype=np.float32).reshape(1, 1, 3)
    std = np.asarray(std, dtype=np.float32).reshape(1, 1, 3)
    standardized = (cropped - mean) / std
    return np.ascontiguousarray(standardized.transpose(2, 0, 1))


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:[-+][a-z0-9]*)*")


class Tokenizer:
    """Lowercasing word tokenizer over a JSON vocabulary file.

    Tokens keep internal hyphens/plus signs so age-group names like
    "50-59" and "70+" stay single tokens. Unknown words map to the
    ``<unk>`` id.
    """

    def __init__(self, vocab: dict[str, int], context_length: int):
        self.vocab = dict(vocab)
        self.context_length = int(context_length)
        if "<unk>" not in self.vocab:
            raise ModelLoadError("tokenizer vocabulary must define <unk>")
        self.unk_id = self.vocab["<unk>"]
        self.size = max(self.vocab.values()) + 1

    @classmethod
    def from_file(cls, path, context_length: int) -> "Tokenizer":
        try:
            vocab = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ModelLoadError(f"cannot read vocabulary {path}: {exc}") from exc
        return cls(vocab, context_length)

    def tokenize(self, text: str) -> list[int]:
        if not text or not text.strip():
            raise InputError("prompt must be non-empty")
        words = _TOKEN_RE.findall(text.lower())
        if not words:
            raise InputError(f"prompt {text!r} contains no tokenizable words")
        if len(words) > self.context_length:
            raise InputError(
                f"prompt has {len(words)} tokens, over the context budget of "
                f"{self.context_length}"
            )
        return [self.vocab.get(w, self.unk_id) for w in words]

    def bag_of_words(self, text: str) -> np.ndarray:
        ids = self.tokenize(text)
        vec = np.zeros(self.size, dtype=np.float32)
        for tid in ids:
            vec[tid] += 1.0
        return vec / len(ids)


# ---------------------------------------------------------------------------
# Encoder
# ---------------------------------------------------------------------------

class Encoder:
    """Vision + text towers of one checkpoint, loaded from a directory.

    Layout: ``vision.onnx``, ``text.onnx``, ``vocab.json``, ``card.json``
    (file names may be overridden inside the card). Sessions are immutable
    after load; forward passes are serialized internally so the object is
    shareable across workers.
    """

    def __init__(self, model_dir):
        model_dir = Path(model_dir)
        card_path = model_dir / "card.json"
        if not card_path.exists():
            raise ModelLoadError(f"encoder card not found: {card_path}")
        try:
            card = json.loads(card_path.read_text())
        except json.JSONDecodeError as exc:
            raise ModelLoadError(f"invalid encoder card {card_path}: {exc}") from exc
        self.card = card
        self.checkpoint_id = card["checkpoint_id"]
        self.dim = int(card["embed_dim"])
        self.image_size = int(card["image_size"])
        self.mean = tuple(card["mean"])
        self.std = tuple(card["std"])
        self.logit_scale = float(card.get("logit_scale", 100.0))
        self.text_input = card.get("text_input", "bow")
        self.tokenizer = Tokenizer.from_file(
            model_dir / card.get("vocab_file", "vocab.json"),
            card["context_length"],
        )
        self._vision = _load_net(model_dir / card.get("vision_file", "vision.onnx"))
        self._text = _load_net(model_dir / card.get("text_file", "text.onnx"))
        self._lock = threading.Lock()

    def preprocess(self, pixels) -> np.ndarray:
        return preprocess(pixels, self.image_size, self.mean, self.std)

    def embed_images(self, rasters) -> np.ndarray:
        """Batch-encode rasters (or FaceCrops); returns (N, dim) float32."""
        rasters = list(rasters)
        if not rasters:
            return np.zeros((0, self.dim), dtype=np.float32)
        batch = np.stack([self.preprocess(getattr(r, "pixels", r)) for r in rasters])
        out = self._forward(self._vision, batch)
        if out.shape != (len(rasters), self.dim):
            raise ModelLoadError(
                f"vision tower returned shape {out.shape}, expected "
                f"({len(rasters)}, {self.dim})"
            )
        return out

    def embed_image(self, crop) -> Embedding:
        return Embedding(self.embed_images([crop])[0], self.checkpoint_id)

    def embed_text(self, prompt: str) -> Embedding:
        if self.text_input == "bow":
            vec = self.tokenizer.bag_of_words(prompt)[None, :]
        else:  # token id sequence, padded to the context length
            ids = self.tokenizer.tokenize(prompt)
            padded = np.zeros((1, self.tokenizer.context_length), dtype=np.float32)
            padded[0, : len(ids)] = ids
            vec = padded
        out = self._forward(self._text, vec.astype(np.float32))
        return Embedding(out[0], self.checkpoint_id)

    def _forward(self, net, blob: np.ndarray) -> np.ndarray:
        with self._lock:
            net.setInput(blob)
            return np.asarray(net.forward(), dtype=np.float32)


def _load_net(path: Path):
    if not Path(path).exists():
        raise ModelLoadError(f"model file not found: {path}")
    try:
        return cv2.dnn.readNetFromONNX(str(path))
    except cv2.error as exc:
        raise ModelLoadError(f"cannot load ONNX model {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Disk cache
# ---------------------------------------------------------------------------

def image_content_hash(pixels: np.ndarray) -> str:
    arr = np.ascontiguousarray(pixels)
    digest = hashlib.sha256()
    digest.update(str(arr.shape).encode())
    digest.update(str(arr.dtype).encode())
    digest.update(arr.tobytes())
    return digest.hexdigest()


def text_content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class EmbeddingCache:
    """One record per (checkpoint id, content hash) key.

    Record layout: magic, u32 header length, header JSON
    ``{checkpoint_id, dim, kind}``, then the raw little-endian float32
    vector.
    """

    def __init__(self, cache_dir):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, checkpoint_id: str, content_hash: str) -> Path:
        key = hashlib.sha256(f"{checkpoint_id}\x00{content_hash}".encode()).hexdigest()
        return self.cache_dir / f"{key}.emb"

    def get(self, checkpoint_id: str, content_hash: str) -> np.ndarray | None:
        path = self._path(checkpoint_id, content_hash)
        if not path.exists():
            return None
        raw = path.read_bytes()
        if raw[: len(_CACHE_MAGIC)] != _CACHE_MAGIC:
            return None
        offset = len(_CACHE_MAGIC)
        (header_len,) = struct.unpack_from("<I", raw, offset)
        offset += 4
        header = json.loads(raw[offset: offset + header_len])
        offset += header_len
        vec = np.frombuffer(raw, dtype="<f4", offset=offset)
        if header.get("checkpoint_id") != checkpoint_id or vec.size != header.get("dim"):
            return None
        return vec.copy()

    def put(self, checkpoint_id: str, content_hash: str, vector: np.ndarray,
            kind: str = "image") -> None:
        vec = np.asarray(vector, dtype="<f4").reshape(-1)
        header = json.dumps(
            {"checkpoint_id": checkpoint_id, "dim": int(vec.size), "kind": kind}
        ).encode()
        payload = _CACHE_MAGIC + struct.pack("<I", len(header)) + header + vec.tobytes()
        self._path(checkpoint_id, content_hash).write_bytes(payload)


def embed_images_cached(encoder: Encoder, cache: EmbeddingCache | None, rasters) -> np.ndarray:
    """Encode rasters, reusing cached vectors where present."""
    rasters = list(rasters)
    if cache is None:
        return encoder.embed_images(rasters)
    out = np.zeros((len(rasters), encoder.dim), dtype=np.float32)
    misses = []
    hashes = []
    for i, raster in enumerate(rasters):
        pixels = getattr(raster, "pixels", raster)
        content = image_content_hash(pixels)
        hashes.append(content)
        hit = cache.get(encoder.checkpoint_id, content)
        if hit is None:
            misses.append(i)
        else:
            out[i] = hit
    if misses:
        fresh = encoder.embed_images([rasters[i] for i in misses])
        for j, i in enumerate(misses):
            out[i] = fresh[j]
            cache.put(encoder.checkpoint_id, hashes[i], fresh[j])
    return out


def embed_text_cached(encoder: Encoder, cache: EmbeddingCache | None, prompt: str) -> Embedding:
    if cache is None:
        return encoder.embed_text(prompt)
    content = text_content_hash(prompt)
    hit = cache.get(encoder.checkpoint_id, content)
    if hit is not None:
        return Embedding(hit, encoder.checkpoint_id)
    emb = encoder.embed_text(prompt)
    cache.put(encoder.checkpoint_id, content, emb.vector, kind="text")
    return emb
