"""Run configuration and the fingerprint embedded in every artifact."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import InputError


@dataclass(frozen=True)
class RunConfig:
    """Everything that affects pipeline outputs, in one hashable place."""

    checkpoint_id: str = ""
    detector_path: str = ""
    fps: float = 1.0
    detection_threshold: float = 0.9
    min_face_size: int = 20
    crop_margin: float = 0.10
    gender_head_path: str = ""
    age_head_path: str = ""
    age_confidence_mode: str = "binarized"
    logit_scale: float = 100.0
    output_dir: str = ""
    seed: int = 0
    extras: dict = field(default_factory=dict)

    def fingerprint(self) -> str:
        # output_dir is excluded: where artifacts land does not affect
        # results, and reruns into different directories must still be
        # byte-identical.
        payload = asdict(self)
        payload.pop("output_dir")
        encoded = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(encoded.encode()).hexdigest()[:16]

    def require_files(self, *attrs: str) -> None:
        """Check the referenced files exist before any work starts."""
        for attr in attrs:
            value = getattr(self, attr)
            if not value:
                raise InputError(f"run config is missing {attr}")
            if not Path(value).exists():
                raise InputError(f"{attr} does not exist: {value}")
