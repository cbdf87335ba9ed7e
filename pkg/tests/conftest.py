"""Shared fixtures: the synthetic asset bundle, built once per session."""

from __future__ import annotations

import numpy as np
import pytest

from screencensus import synthetic
from screencensus.classifier import TrainConfig, train_head
from screencensus.embedder import Encoder
from screencensus.facedet import FaceDetector
from screencensus.pipeline import embed_dataset


@pytest.fixture(scope="session")
def demo_paths(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo_assets")
    return synthetic.make_demo(out, seed=0)


@pytest.fixture(scope="session")
def encoder(demo_paths) -> Encoder:
    return Encoder(demo_paths["encoder"])


@pytest.fixture(scope="session")
def detector(demo_paths) -> FaceDetector:
    return FaceDetector(demo_paths["detector"])


@pytest.fixture(scope="session")
def train_pack(demo_paths, encoder):
    vectors, genders, ages, paths = embed_dataset(
        demo_paths["train_manifest"], demo_paths["dataset_root"], encoder
    )
    return vectors, genders, ages, paths


@pytest.fixture(scope="session")
def val_pack(demo_paths, encoder):
    vectors, genders, ages, paths = embed_dataset(
        demo_paths["val_manifest"], demo_paths["dataset_root"], encoder
    )
    return vectors, genders, ages, paths


@pytest.fixture(scope="session")
def gender_head(train_pack):
    vectors, genders, _, _ = train_pack
    return train_head((vectors, genders), TrainConfig(task="gender", seed=0))


@pytest.fixture(scope="session")
def age_head(train_pack):
    vectors, _, ages, _ = train_pack
    return train_head((vectors, ages), TrainConfig(task="age", seed=0))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240)
