import numpy as np
import pytest
from PIL import Image

from diffad.features import (
    ExtractorSpec,
    GridStatsExtractor,
    TOY_DIM,
    extract_all,
    normalize_image,
    toy_extract,
)
from diffad.manifest import EmbeddingStore, VideoRecord, write_embeddings


def make_frame_files(tmp_path, rng, n_videos=2, n_frames=40):
    records = []
    for v in range(n_videos):
        vid = f"v{v}"
        frame_dir = tmp_path / vid
        frame_dir.mkdir()
        paths = []
        for f in range(n_frames):
            img = rng.integers(0, 256, size=(224, 224, 3), dtype=np.uint8)
            p = frame_dir / f"f{f:03d}.png"
            Image.fromarray(img).save(p)
            paths.append(str(p))
        records.append(
            VideoRecord(vid, f"s{v}", "real", paths, str(tmp_path / f"{vid}.txt"), "train")
        )
    return records


class TestToyExtract:
    def test_constant_image_zero_stds_and_laplacian(self):
        img = np.full((224, 224, 3), 77, dtype=np.uint8)
        emb = toy_extract(img)
        assert emb.shape == (TOY_DIM,)
        per_cell = emb[:384].reshape(64, 6)
        assert np.all(per_cell[:, 3:] == 0.0)  # stds
        assert np.all(emb[384:] == 0.0)  # laplacian energy

    def test_identical_images_identical_embeddings(self, rng):
        img = rng.integers(0, 256, size=(224, 224, 3), dtype=np.uint8)
        assert np.array_equal(toy_extract(img), toy_extract(img.copy()))

    def test_cell_mean_matches_handrolled_loop(self, rng):
        img = rng.integers(0, 256, size=(224, 224, 3), dtype=np.uint8)
        emb = toy_extract(img)
        # cell (row 2, col 3), green channel
        norm = normalize_image(img)
        total = 0.0
        for y in range(2 * 28, 3 * 28):
            for x in range(3 * 28, 4 * 28):
                total += norm[y, x, 1]
        want = total / (28 * 28)
        got = emb[:384].reshape(8, 8, 6)[2, 3, 1]
        assert got == pytest.approx(want, abs=1e-12)

    def test_cell_std_matches_handrolled_loop(self, rng):
        img = rng.integers(0, 256, size=(224, 224, 3), dtype=np.uint8)
        emb = toy_extract(img)
        norm = normalize_image(img)
        cell = norm[5 * 28 : 6 * 28, 0:28, 2].ravel()
        want = np.sqrt(((cell - cell.mean()) ** 2).mean())
        got = emb[:384].reshape(8, 8, 6)[5, 0, 5]
        assert got == pytest.approx(want, abs=1e-12)

    def test_rejects_prenormalized_float_input(self, rng):
        img = rng.random((224, 224, 3))
        with pytest.raises(ValueError, match="uint8"):
            toy_extract(img)

    def test_rejects_wrong_size(self, rng):
        img = rng.integers(0, 256, size=(128, 128, 3), dtype=np.uint8)
        with pytest.raises(ValueError, match="224"):
            toy_extract(img)

    def test_transformer_stacks_embeddings(self, rng):
        imgs = rng.integers(0, 256, size=(3, 224, 224, 3), dtype=np.uint8)
        out = GridStatsExtractor().fit_transform(imgs)
        assert out.shape == (3, TOY_DIM)
        assert np.array_equal(out[1], toy_extract(imgs[1]))


class TestExtractorSpec:
    def test_toy_dim_is_fixed(self):
        assert ExtractorSpec().dim == TOY_DIM
        with pytest.raises(ValueError, match="fixed"):
            ExtractorSpec(kind="toy", dim=1792)

    def test_external_requires_path(self):
        with pytest.raises(ValueError, match="external_path"):
            ExtractorSpec(kind="external", dim=1792)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            ExtractorSpec(kind="resnet")


class TestExtractAll:
    def test_two_videos_forty_frames_toy(self, tmp_path, rng):
        records = make_frame_files(tmp_path, rng, n_videos=2, n_frames=40)
        store = extract_all(records, ExtractorSpec())
        assert store.dim == TOY_DIM
        assert len(store) == 80

    def test_rerun_is_bit_identical(self, tmp_path, rng):
        records = make_frame_files(tmp_path, rng, n_videos=1, n_frames=5)
        a = extract_all(records, ExtractorSpec())
        b = extract_all(records, ExtractorSpec())
        assert a.entries.keys() == b.entries.keys()
        for key in a.entries:
            assert a.entries[key].tobytes() == b.entries[key].tobytes()

    def test_external_store_exposes_declared_dim(self, tmp_path, rng):
        store = EmbeddingStore(dim=1792)
        record = VideoRecord("v0", "s0", "real", ["a.png", "b.png"], "lm.txt", "test")
        for i in range(2):
            store.put("v0", i, rng.normal(size=1792).astype(np.float32))
        path = tmp_path / "ext.bin"
        write_embeddings(store, path)
        spec = ExtractorSpec(kind="external", dim=1792, external_path=str(path))
        loaded = extract_all([record], spec)
        assert loaded.dim == 1792

    def test_external_missing_frame_rejected(self, tmp_path, rng):
        store = EmbeddingStore(dim=16)
        store.put("v0", 0, rng.normal(size=16).astype(np.float32))
        path = tmp_path / "ext.bin"
        write_embeddings(store, path)
        record = VideoRecord("v0", "s0", "real", ["a.png", "b.png"], "lm.txt", "test")
        spec = ExtractorSpec(kind="external", dim=16, external_path=str(path))
        with pytest.raises(KeyError, match="frame 1"):
            extract_all([record], spec)

    def test_missing_frame_file_raises(self, tmp_path):
        record = VideoRecord("v0", "s0", "real", [str(tmp_path / "nope.png")], "lm.txt", "train")
        with pytest.raises(FileNotFoundError):
            extract_all([record], ExtractorSpec())
