"""Video sampling and manifest loading."""

import cv2
import numpy as np
import pytest

from screencensus.errors import FormatError, InputError
from screencensus.ingest import Frame, load_image, load_manifest, sample_frames


def write_clip(path, n_frames, fps, size=(64, 48)):
    w, h = size
    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), fps, (w, h))
    assert writer.isOpened()
    for i in range(n_frames):
        frame = np.full((h, w, 3), (i * 37) % 256, dtype=np.uint8)
        writer.write(frame)
    writer.release()


class TestSampleFrames:
    def test_ten_second_video_at_one_fps(self, tmp_path):
        path = tmp_path / "ten.avi"
        write_clip(path, n_frames=100, fps=10.0)  # 10 s
        frames = list(sample_frames(path, rate=1.0))
        assert len(frames) == 10
        assert [f.timestamp for f in frames] == [float(k) for k in range(10)]
        assert [f.frame_index for f in frames] == list(range(10))

    def test_two_frame_clip_native_rate(self, tmp_path):
        path = tmp_path / "two.avi"
        write_clip(path, n_frames=2, fps=4.0)
        frames = list(sample_frames(path, rate=4.0))
        assert len(frames) == 2
        assert frames[0].timestamp < frames[1].timestamp

    def test_timestamps_strictly_increase(self, tmp_path):
        path = tmp_path / "clip.avi"
        write_clip(path, n_frames=30, fps=6.0)
        frames = list(sample_frames(path, rate=2.5))
        stamps = [f.timestamp for f in frames]
        assert all(b > a for a, b in zip(stamps, stamps[1:]))
        # 5 s at 2.5/s -> 12 or 13 samples (duration x rate +- 1)
        assert abs(len(frames) - 5.0 * 2.5) <= 1

    def test_deterministic_rerun(self, tmp_path):
        path = tmp_path / "clip.avi"
        write_clip(path, n_frames=24, fps=8.0)
        a = list(sample_frames(path, rate=3.0))
        b = list(sample_frames(path, rate=3.0))
        assert [f.frame_index for f in a] == [f.frame_index for f in b]
        assert [f.timestamp for f in a] == [f.timestamp for f in b]
        for fa, fb in zip(a, b):
            np.testing.assert_array_equal(fa.pixels, fb.pixels)

    def test_rgb_pixels(self, tmp_path):
        path = tmp_path / "c.avi"
        w = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), 4.0, (32, 32))
        frame = np.zeros((32, 32, 3), dtype=np.uint8)
        frame[:, :, 2] = 200  # red in BGR
        for _ in range(4):
            w.write(frame)
        w.release()
        sampled = next(iter(sample_frames(path, rate=4.0)))
        assert isinstance(sampled, Frame)
        r, g, b = sampled.pixels.mean(axis=(0, 1))
        assert r > 150 and b < 60  # decoded back as RGB

    def test_zero_rate_rejected(self, tmp_path):
        path = tmp_path / "c.avi"
        write_clip(path, 4, 4.0)
        with pytest.raises(InputError):
            list(sample_frames(path, rate=0.0))

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(InputError):
            list(sample_frames(tmp_path / "missing.avi", rate=1.0))

    def test_unreadable_file_rejected(self, tmp_path):
        path = tmp_path / "not_video.avi"
        path.write_bytes(b"this is not a video at all")
        with pytest.raises(InputError):
            list(sample_frames(path, rate=1.0))


class TestLoadManifest:
    def test_basic_row(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("file,age,gender\nval/1.jpg,50-59,Female\n")
        items = load_manifest(path)
        assert len(items) == 1
        assert items[0].path == "val/1.jpg"
        assert items[0].gender_label == "Female"
        assert items[0].age_label == "50-59"

    def test_extra_columns_tolerated(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "file,age,gender,race,service_test\nval/1.jpg,3-9,Male,East Asian,True\n"
        )
        assert len(load_manifest(path)) == 1

    def test_unknown_age_names_row(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("file,age,gender\nok.jpg,20-29,Male\nbad.jpg,fifty,Female\n")
        with pytest.raises(FormatError) as err:
            load_manifest(path)
        assert "row 3" in str(err.value)

    def test_case_sensitive_labels(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("file,age,gender\nx.jpg,20-29,female\n")
        with pytest.raises(FormatError):
            load_manifest(path)

    def test_missing_column_named(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("file,age\nx.jpg,20-29\n")
        with pytest.raises(FormatError) as err:
            load_manifest(path)
        assert "gender" in str(err.value)

    def test_row_order_preserved_and_counts(self, demo_paths):
        items = load_manifest(demo_paths["val_manifest"])
        with open(demo_paths["val_manifest"]) as fh:
            data_rows = sum(1 for _ in fh) - 1
        assert len(items) == data_rows
        # pure function of file bytes
        again = load_manifest(demo_paths["val_manifest"])
        assert items == again

    def test_load_image_rgb(self, demo_paths):
        items = load_manifest(demo_paths["val_manifest"])
        img = load_image(demo_paths["dataset_root"] / items[0].path)
        assert img.ndim == 3 and img.shape[2] == 3 and img.dtype == np.uint8

    def test_load_image_missing(self, tmp_path):
        with pytest.raises(InputError):
            load_image(tmp_path / "missing.png")
