"""Media ingestion: video frame sampling and labeled-image manifests.

Videos decode through OpenCV's bundled FFmpeg backend. Frames are
delivered in timestamp order as 8-bit RGB; sampling is deterministic, so
re-running on the same file with the same rate yields identical frames.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
from PIL import Image

from .classifier import AGE_CLASSES, GENDER_CLASSES
from .errors import FormatError, InputError

DEFAULT_FPS = 1.0  # sampling policy is configurable and recorded in outputs


@dataclass(frozen=True)
class Frame:
    frame_index: int  # ordinal in the sampled stream
    timestamp: float  # seconds
    pixels: np.ndarray  # HxWx3 uint8 RGB


@dataclass(frozen=True)
class LabeledImage:
    path: str
    gender_label: str
    age_label: str


def sample_frames(video_path, rate: float = DEFAULT_FPS):
    """Yield frames sampled at ``rate`` per second, in timestamp order.

    The k-th emitted frame carries timestamp k/rate and the pixels of the
    nearest source frame. A zero-duration stream yields nothing. Decoding
    is sequential (no seeking), which keeps the output reproducible.
    """
    if rate <= 0:
        raise InputError(f"sampling rate must be positive, got {rate}")
    video_path = Path(video_path)
    if not video_path.exists():
        raise InputError(f"video not found: {video_path}")
    capture = cv2.VideoCapture(str(video_path))
    try:
        if not capture.isOpened():
            raise InputError(f"cannot decode video: {video_path}")
        native_fps = capture.get(cv2.CAP_PROP_FPS)
        n_source = int(capture.get(cv2.CAP_PROP_FRAME_COUNT))
        if native_fps <= 0 or n_source <= 0:
            return  # zero-duration stream
        duration = n_source / native_fps

        # Ticks at k/rate for k while k/rate < duration; each tick maps to
        # its nearest source frame (ties resolved by round-half-even).
        n_ticks = int(np.ceil(duration * rate - 1e-9))
        wanted: dict[int, list[int]] = {}
        for k in range(n_ticks):
            src = min(n_source - 1, round(k / rate * native_fps))
            wanted.setdefault(src, []).append(k)
        if not wanted:
            return
        last_needed = max(wanted)

        src_index = 0
        while src_index <= last_needed:
            ok, bgr = capture.read()
            if not ok:
                break
            for k in wanted.get(src_index, ()):
                rgb = np.ascontiguousarray(cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB))
                yield Frame(frame_index=k, timestamp=k / rate, pixels=rgb)
            src_index += 1
    finally:
        capture.release()


def load_image(path) -> np.ndarray:
    """Decode an image file to HxWx3 uint8 RGB."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot decode image {path}: {exc}") from exc


def load_manifest(manifest_path) -> list[LabeledImage]:
    """Parse a FairFace-style CSV manifest into labeled images.

    Required columns: file, age, gender (extra columns such as race and
    service_test are tolerated). Label strings are matched case-sensitively
    against the canonical taxonomies so dataset drift fails loudly; output
    order equals row order.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise InputError(f"manifest not found: {manifest_path}")
    items = []
    with open(manifest_path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = set(reader.fieldnames or [])
        missing = {"file", "age", "gender"} - header
        if missing:
            raise FormatError(
                f"{manifest_path}: missing column(s) {', '.join(sorted(missing))}"
            )
        for row_no, row in enumerate(reader, start=2):
            gender = row["gender"].strip()
            age = row["age"].strip()
            if gender not in GENDER_CLASSES:
                raise FormatError(
                    f"{manifest_path}: row {row_no}: unknown gender label {gender!r}"
                )
            if age not in AGE_CLASSES:
                raise FormatError(
                    f"{manifest_path}: row {row_no}: unknown age label {age!r}"
                )
            items.append(LabeledImage(path=row["file"].strip(),
                                      gender_label=gender, age_label=age))
    return items
