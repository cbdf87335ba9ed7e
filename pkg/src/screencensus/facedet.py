"""Face detection over frames, emitting cropped face regions.

The detector is a single-shot-style dense ONNX model (see the model card
in ``assets/model_card.md``) run through OpenCV DNN. Candidate boxes are
thresholded, de-duplicated with non-maximum suppression, expanded by a
configurable margin, clamped to the frame, and returned as pixel crops
sorted by descending confidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from .errors import InputError, ModelLoadError

DEFAULT_THRESHOLD = 0.9
DEFAULT_MIN_FACE_SIZE = 20
DEFAULT_CROP_MARGIN = 0.10
NMS_IOU = 0.25


@dataclass(frozen=True)
class FaceCrop:
    """One detected face region from a frame."""

    source_frame: int
    bbox: tuple[int, int, int, int]  # x, y, w, h in frame pixels
    detection_confidence: float
    pixels: np.ndarray  # HxWx3 uint8 crop, margin included


def _iou(a, b) -> float:
    ax1, ay1, ax2, ay2 = a
    bx1, by1, bx2, by2 = b
    ix1, iy1 = max(ax1, bx1), max(ay1, by1)
    ix2, iy2 = min(ax2, bx2), min(ay2, by2)
    iw, ih = max(0.0, ix2 - ix1), max(0.0, iy2 - iy1)
    inter = iw * ih
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    return inter / union if union > 0 else 0.0


def nms(boxes: np.ndarray, scores: np.ndarray, iou_threshold: float = NMS_IOU):
    """Greedy hard NMS; candidates ordered by (-score, y1, x1) for determinism."""
    order = sorted(
        range(len(scores)),
        key=lambda i: (-scores[i], boxes[i][1], boxes[i][0]),
    )
    keep = []
    for i in order:
        if all(_iou(boxes[i], boxes[j]) <= iou_threshold for j in keep):
            keep.append(i)
    return keep


class FaceDetector:
    """ONNX dense detector plus deterministic post-processing."""

    def __init__(self, model_path, input_size: int = 160,
                 min_face_size: int = DEFAULT_MIN_FACE_SIZE,
                 crop_margin: float = DEFAULT_CROP_MARGIN,
                 nms_iou: float = NMS_IOU):
        model_path = Path(model_path)
        if not model_path.exists():
            raise ModelLoadError(f"detector model not found: {model_path}")
        try:
            self._net = cv2.dnn.readNetFromONNX(str(model_path))
        except cv2.error as exc:
            raise ModelLoadError(f"cannot load detector {model_path}: {exc}") from exc
        self.model_path = model_path
        self.input_size = int(input_size)
        self.nms_iou = float(nms_iou)
        self.min_face_size = int(min_face_size)
        self.crop_margin = float(crop_margin)

    def raw_detections(self, pixels: np.ndarray):
        """Candidate boxes (frame pixel coords) and scores for one raster.

        The frame is letterboxed into the square detector input (scaled to
        the long side, padded black right/bottom) so faces keep their
        aspect ratio; boxes are mapped back through the same transform.
        """
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise InputError(f"expected a HxWx3 raster, got shape {pixels.shape}")
        h, w = pixels.shape[:2]
        if h < 1 or w < 1:
            raise InputError("zero-area frame")
        scale = self.input_size / max(h, w)
        new_w, new_h = max(1, round(w * scale)), max(1, round(h * scale))
        resized = cv2.resize(pixels, (new_w, new_h), interpolation=cv2.INTER_LINEAR)
        canvas = np.zeros((self.input_size, self.input_size, 3), dtype=np.uint8)
        canvas[:new_h, :new_w] = resized
        blob = canvas.astype(np.float32).transpose(2, 0, 1)[None] / 255.0
        self._net.setInput(blob)
        boxes, scores = self._net.forward(["boxes", "scores"])
        boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
        boxes = boxes * self.input_size / scale  # back to frame pixels
        return boxes, np.asarray(scores, dtype=np.float64).reshape(-1)

    def detect(self, frame, threshold: float = DEFAULT_THRESHOLD) -> list[FaceCrop]:
        """Faces in a frame with confidence >= threshold, best first."""
        if not (0.0 <= threshold <= 1.0):
            raise InputError(f"threshold must be in [0, 1], got {threshold}")
        pixels = getattr(frame, "pixels", frame)
        frame_index = getattr(frame, "frame_index", 0)
        boxes, scores = self.raw_detections(np.asarray(pixels))

        mask = scores >= threshold
        boxes, scores = boxes[mask], scores[mask]
        if len(scores) == 0:
            return []
        keep = nms(boxes, scores, self.nms_iou)
        boxes, scores = boxes[keep], scores[keep]

        h, w = pixels.shape[:2]
        crops = []
        for box, score in zip(boxes, scores):
            x1, y1, x2, y2 = box
            margin_x = self.crop_margin * (x2 - x1)
            margin_y = self.crop_margin * (y2 - y1)
            px1 = int(np.clip(np.floor(x1 - margin_x), 0, w - 1))
            py1 = int(np.clip(np.floor(y1 - margin_y), 0, h - 1))
            px2 = int(np.clip(np.ceil(x2 + margin_x), px1 + 1, w))
            py2 = int(np.clip(np.ceil(y2 + margin_y), py1 + 1, h))
            if px2 - px1 < self.min_face_size or py2 - py1 < self.min_face_size:
                continue
            crops.append(FaceCrop(
                source_frame=frame_index,
                bbox=(px1, py1, px2 - px1, py2 - py1),
                detection_confidence=float(score),
                pixels=np.ascontiguousarray(pixels[py1:py2, px1:px2]),
            ))
        crops.sort(key=lambda c: (-c.detection_confidence, c.bbox[1], c.bbox[0]))
        return crops


def detect_faces(frame, detector: FaceDetector,
                 threshold: float = DEFAULT_THRESHOLD) -> list[FaceCrop]:
    return detector.detect(frame, threshold)
