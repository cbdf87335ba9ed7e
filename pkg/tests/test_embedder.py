"""Encoder stack: preprocessing, tokenizer, sessions, disk cache."""

from pathlib import Path

import numpy as np
import pytest

from screencensus.embedder import (
    Embedding,
    EmbeddingCache,
    Encoder,
    Tokenizer,
    cosine,
    embed_images_cached,
    embed_text_cached,
    image_content_hash,
    preprocess,
)
from screencensus.errors import InputError, ModelLoadError
from screencensus.synthetic import make_portrait

FIXTURES = Path(__file__).parent / "fixtures"


class TestPreprocess:
    def test_output_shape_contract(self, rng):
        for shape in ((50, 80), (300, 200), (224, 224), (37, 411)):
            img = rng.integers(0, 256, size=(*shape, 3), dtype=np.uint8)
            out = preprocess(img, 224, [0.5] * 3, [0.25] * 3)
            assert out.shape == (3, 224, 224)
            assert out.dtype == np.float32

    def test_constant_mean_image_standardizes_to_zero(self):
        mean = [0.48145466, 0.4578275, 0.40821073]
        img = np.ones((64, 64, 3), dtype=np.float32) * np.array(mean, dtype=np.float32)
        out = preprocess(img, 224, mean, [0.26862954, 0.26130258, 0.27577711])
        assert float(np.abs(out).max()) < 1e-5

    def test_matches_reference_golden_tensor(self):
        with np.load(FIXTURES / "preprocess_golden.npz") as z:
            img, expected = z["image"], z["expected"]
            size, mean, std = int(z["image_size"]), z["mean"], z["std"]
        mine = preprocess(img, size, mean, std)
        assert float(np.abs(mine - expected).max()) <= 1e-5

    def test_zero_area_rejected(self):
        with pytest.raises(InputError):
            preprocess(np.zeros((0, 10, 3), dtype=np.uint8), 224, [0.5] * 3, [1.0] * 3)
        with pytest.raises(InputError):
            preprocess(np.zeros((10, 10), dtype=np.uint8), 224, [0.5] * 3, [1.0] * 3)


class TestTokenizer:
    def vocab(self):
        return Tokenizer(
            {"<unk>": 0, "the": 1, "face": 2, "of": 3, "a": 4, "man": 5,
             "woman": 6, "50-59": 7, "70+": 8},
            context_length=8,
        )

    def test_basic_tokenization(self):
        tok = self.vocab()
        assert tok.tokenize("The face of a man") == [1, 2, 3, 4, 5]

    def test_age_group_tokens_survive(self):
        tok = self.vocab()
        assert tok.tokenize("50-59 70+") == [7, 8]

    def test_unknown_maps_to_unk(self):
        tok = self.vocab()
        assert tok.tokenize("zebra") == [0]

    def test_empty_prompt_rejected(self):
        with pytest.raises(InputError):
            self.vocab().tokenize("")
        with pytest.raises(InputError):
            self.vocab().tokenize("   !!! ")

    def test_over_budget_names_limit(self):
        with pytest.raises(InputError) as err:
            self.vocab().tokenize("a a a a a a a a a")
        assert "8" in str(err.value)

    def test_bag_of_words_normalized(self):
        tok = self.vocab()
        bow = tok.bag_of_words("face face man")
        assert abs(bow.sum() - 1.0) < 1e-6
        assert abs(bow[2] - 2 / 3) < 1e-6


class TestEncoder:
    def test_missing_model_dir(self, tmp_path):
        with pytest.raises(ModelLoadError):
            Encoder(tmp_path / "nope")

    def test_deterministic_embeddings(self, encoder, rng):
        img = make_portrait(0, 3, rng)
        a = encoder.embed_image(img)
        b = encoder.embed_image(img)
        assert cosine(a, b) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_array_equal(a.vector, b.vector)

    def test_distinct_inputs_distinct_embeddings(self, encoder, rng):
        a = encoder.embed_image(make_portrait(0, 0, rng))
        b = encoder.embed_image(make_portrait(1, 8, rng))
        assert cosine(a, b) < 1.0

    def test_batching_matches_single(self, encoder, rng):
        images = [make_portrait(i % 2, i % 9, rng) for i in range(6)]
        batch = encoder.embed_images(images)
        for i, img in enumerate(images):
            single = encoder.embed_images([img])[0]
            assert float(np.abs(batch[i] - single).max()) <= 1e-5

    def test_dimension_constant(self, encoder, rng):
        dims = {encoder.embed_image(make_portrait(0, i, rng)).dim for i in range(4)}
        dims.add(encoder.embed_text("the face of a woman").dim)
        assert dims == {encoder.dim}

    def test_text_prompts_distinct(self, encoder):
        man = encoder.embed_text("the face of a man")
        woman = encoder.embed_text("the face of a woman")
        assert cosine(man, woman) < 1.0

    def test_age_prompt_template_valid(self, encoder):
        emb = encoder.embed_text("A person in the 50-59 age group")
        assert emb.dim == encoder.dim
        assert emb.norm > 0

    def test_empty_prompt_rejected(self, encoder):
        with pytest.raises(InputError):
            encoder.embed_text("")

    def test_shared_space_sanity(self, encoder, rng):
        """Matching-concept text beats mismatching text on >= 90% of fixtures."""
        woman = encoder.embed_text("the face of a woman")
        man = encoder.embed_text("the face of a man")
        wins = 0
        n = 60
        for i in range(n):
            style = i % 2
            emb = encoder.embed_image(make_portrait(style, int(rng.integers(0, 9)), rng))
            c_w, c_m = cosine(emb, woman), cosine(emb, man)
            wins += (c_w > c_m) if style == 0 else (c_m > c_w)
        assert wins / n >= 0.90


class TestEmbedding:
    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            Embedding(np.array([1.0, np.inf]))

    def test_zero_vector_unit_rejected(self):
        emb = Embedding(np.zeros(4))
        with pytest.raises(InputError):
            emb.unit()


class TestCache:
    def test_roundtrip(self, tmp_path, rng):
        cache = EmbeddingCache(tmp_path / "cache")
        vec = rng.normal(size=16).astype(np.float32)
        cache.put("ckpt", "hash1", vec)
        got = cache.get("ckpt", "hash1")
        np.testing.assert_array_equal(got, vec)

    def test_miss_returns_none(self, tmp_path):
        cache = EmbeddingCache(tmp_path / "cache")
        assert cache.get("ckpt", "nope") is None

    def test_keyed_by_checkpoint(self, tmp_path, rng):
        cache = EmbeddingCache(tmp_path / "cache")
        cache.put("ckpt-a", "h", rng.normal(size=4).astype(np.float32))
        assert cache.get("ckpt-b", "h") is None

    def test_record_layout(self, tmp_path, rng):
        cache = EmbeddingCache(tmp_path / "cache")
        vec = rng.normal(size=8).astype(np.float32)
        cache.put("ckpt", "h", vec)
        record = next((tmp_path / "cache").glob("*.emb")).read_bytes()
        assert record.startswith(b"SCEMB001")
        assert record.endswith(vec.astype("<f4").tobytes())

    def test_cached_image_path_skips_encoder(self, tmp_path, encoder, rng):
        cache = EmbeddingCache(tmp_path / "cache")
        images = [make_portrait(0, 2, rng), make_portrait(1, 5, rng)]
        first = embed_images_cached(encoder, cache, images)
        # poison the encoder: a cache hit must not re-invoke it
        class Boom:
            checkpoint_id = encoder.checkpoint_id
            dim = encoder.dim
            def embed_images(self, _):
                raise AssertionError("cache miss on a warm cache")
        second = embed_images_cached(Boom(), cache, images)
        np.testing.assert_array_equal(first, second)

    def test_cached_text(self, tmp_path, encoder):
        cache = EmbeddingCache(tmp_path / "cache")
        a = embed_text_cached(encoder, cache, "the face of a woman")
        b = embed_text_cached(encoder, cache, "the face of a woman")
        np.testing.assert_array_equal(a.vector, b.vector)

    def test_image_content_hash_sensitivity(self, rng):
        img = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
        other = img.copy()
        other[0, 0, 0] ^= 1
        assert image_content_hash(img) != image_content_hash(other)
        assert image_content_hash(img) == image_content_hash(img.copy())


class TestOnnxExecutionTwin:
    def test_vision_tower_matches_numpy_reimplementation(self, encoder, rng):
        """Dual route: the cv2-executed ONNX graph must agree with a pure
        numpy replay of the tower definition (pool, whiten, project)."""
        from screencensus.synthetic import (
            _pooled_grid,
            _projection,
            make_portrait,
        )

        # replay the builder's calibration pass (same seed path as the
        # session fixture: make_demo(seed=0) -> build_encoder_dir(seed=7))
        cal_rng = np.random.default_rng(7)
        samples = []
        for style in (0, 1):
            for age_group in range(9):
                for _ in range(16):
                    samples.append(_pooled_grid(make_portrait(style, age_group, cal_rng)))
        stacked = np.stack(samples)
        cal_mean = stacked.mean(axis=0)
        cal_std = np.maximum(stacked.std(axis=0), 1e-3)
        weights, bias = _projection(1234)

        for style in (0, 1):
            img = make_portrait(style, int(rng.integers(0, 9)), rng)
            whitened = (_pooled_grid(img) - cal_mean) / cal_std
            expected = weights.astype(np.float64) @ whitened + bias
            got = encoder.embed_image(img).vector
            assert float(np.abs(got - expected).max()) <= 1e-4
