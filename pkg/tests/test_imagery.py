import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnrnn.errors import DatasetError, PgmError, UnsupportedPgmError
from cnrnn.imagery import (
    GrayImage,
    SplitMix64,
    encode_pgm,
    load_dataset,
    load_pgm,
    parse_pgm,
    synth_texture,
    tile,
    write_pgm,
)

from conftest import gray_images


class TestGrayImage:
    def test_flat_view_is_row_major(self):
        img = GrayImage.from_flat(3, 2, [0, 1, 2, 3, 4, 5], 5)
        assert img.width == 3 and img.height == 2
        assert img.pixels[1, 0] == 3
        assert img.data.tolist() == [0, 1, 2, 3, 4, 5]

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            GrayImage(np.array([[0, 256]]), 255)
        with pytest.raises(ValueError):
            GrayImage(np.array([[-1, 0]]), 255)

    def test_rejects_empty_and_bad_level(self):
        with pytest.raises(ValueError):
            GrayImage(np.zeros((0, 3), dtype=int))
        with pytest.raises(ValueError):
            GrayImage(np.zeros((2, 2), dtype=int), 0)

    def test_immutable(self):
        img = GrayImage(np.zeros((2, 2), dtype=int))
        with pytest.raises(ValueError):
            img.pixels[0, 0] = 1

    def test_does_not_alias_input(self):
        src = np.zeros((2, 2), dtype=int)
        img = GrayImage(src)
        src[0, 0] = 9
        assert img.pixels[0, 0] == 0


class TestPgm:
    def test_p5_example(self):
        img = parse_pgm(b"P5 2 2 255\n" + bytes([0, 255, 7, 9]))
        assert (img.width, img.height, img.max_level) == (2, 2, 255)
        assert img.data.tolist() == [0, 255, 7, 9]

    def test_p2_zeros(self):
        img = parse_pgm(b"P2\n3 3\n255\n0 0 0\n0 0 0\n0 0 0\n")
        assert img.shape == (3, 3)
        assert img.max_level == 255
        assert not img.data.any()

    def test_comments_in_header(self):
        img = parse_pgm(b"P2\n# made by hand\n2 1 # dims\n15\n3 15\n")
        assert img.max_level == 15
        assert img.data.tolist() == [3, 15]

    def test_sixteen_bit_big_endian(self):
        img = parse_pgm(b"P5\n2 1\n1000\n" + bytes([0x03, 0xE8, 0x00, 0x01]))
        assert img.data.tolist() == [1000, 1]

    def test_truncated_binary(self):
        with pytest.raises(PgmError, match="truncated"):
            parse_pgm(b"P5 2 2 255\n" + bytes([0, 1, 2]))

    def test_truncated_ascii(self):
        with pytest.raises(PgmError, match="truncated"):
            parse_pgm(b"P2 2 2 255\n1 2 3\n")

    def test_bad_magic_names_offset(self):
        with pytest.raises(PgmError) as exc:
            parse_pgm(b"P6 1 1 255\n\x00\x00\x00")
        assert exc.value.offset == 0
        assert "byte offset 0" in str(exc.value)

    def test_malformed_width_names_offset(self):
        with pytest.raises(PgmError) as exc:
            parse_pgm(b"P5 2x 2 255\n\x00")
        assert exc.value.offset == 3

    def test_maxval_too_large(self):
        with pytest.raises(UnsupportedPgmError):
            parse_pgm(b"P2 1 1 65536\n0\n")

    def test_sample_above_maxval(self):
        with pytest.raises(PgmError):
            parse_pgm(b"P2 1 1 10\n11\n")

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P5 2 2 255\n" + bytes([0, 255, 7, 9]))
        img = load_pgm(path)
        assert img.data.tolist() == [0, 255, 7, 9]

    @settings(max_examples=60, deadline=None)
    @given(gray_images(max_side=9), st.booleans())
    def test_round_trip(self, img, binary):
        assert parse_pgm(encode_pgm(img, binary)) == img

    def test_round_trip_sixteen_bit(self, tmp_path, rng):
        img = GrayImage(rng.integers(0, 4096, (5, 7)), 4095)
        write_pgm(img, tmp_path / "b.pgm")
        assert load_pgm(tmp_path / "b.pgm") == img


class TestTile:
    @pytest.mark.parametrize(
        "w, h, expected",
        [(512, 512, 16), (746, 538, 20), (128, 128, 1)],
    )
    def test_counts(self, w, h, expected):
        img = GrayImage(np.zeros((h, w), dtype=np.uint8))
        assert len(tile(img, 128, 128)) == expected

    def test_identity(self, rng):
        img = GrayImage(rng.integers(0, 256, (128, 128)))
        (only,) = tile(img, 128, 128)
        assert only == img

    def test_too_large(self):
        with pytest.raises(ValueError):
            tile(GrayImage(np.zeros((4, 4), dtype=int)), 5, 2)

    def test_inherits_max_level(self):
        parts = tile(GrayImage(np.zeros((4, 4), dtype=int), 15), 2, 2)
        assert {t.max_level for t in parts} == {15}

    @settings(max_examples=50, deadline=None)
    @given(gray_images(max_side=12), st.integers(1, 12), st.integers(1, 12))
    def test_count_and_reconstruction(self, img, tw, th):
        if tw > img.width or th > img.height:
            with pytest.raises(ValueError):
                tile(img, tw, th)
            return
        parts = tile(img, tw, th)
        nx, ny = img.width // tw, img.height // th
        assert len(parts) == nx * ny
        rows = [np.hstack([parts[y * nx + x].pixels for x in range(nx)]) for y in range(ny)]
        np.testing.assert_array_equal(np.vstack(rows), img.pixels[: ny * th, : nx * tw])


class TestSplitMix64:
    def test_reference_values(self):
        # published SplitMix64 outputs for seed 1234567
        gen = SplitMix64(1234567)
        assert gen.next_u64(3).tolist() == [
            6457827717110365317,
            3203168211198807973,
            9817491932198370423,
        ]

    def test_bulk_equals_stepwise(self):
        a = SplitMix64(99).next_u64(10)
        g = SplitMix64(99)
        b = np.concatenate([g.next_u64(3), g.next_u64(7)])
        np.testing.assert_array_equal(a, b)

    def test_integer_range(self):
        v = SplitMix64(5).integers(-3, 3, 1000)
        assert v.min() == -3 and v.max() == 3


class TestSynth:
    def test_checker_no_noise(self):
        img = synth_texture("checker", 4, 0, 0, 8)
        block = np.kron(np.array([[0, 1], [1, 0]]), np.ones((4, 4), dtype=int)) * 255
        np.testing.assert_array_equal(img.pixels, block)

    @pytest.mark.parametrize("kind", ["checker", "stripes", "blob-noise", "gradient-noise"])
    def test_deterministic(self, kind):
        a = synth_texture(kind, 5, 20, 42, 32, offset=(3, 1))
        b = synth_texture(kind, 5, 20, 42, 32, offset=(3, 1))
        assert a.pixels.tobytes() == b.pixels.tobytes()

    def test_seed_changes_pixels_not_family(self):
        a = synth_texture("stripes", 2, 30, 1, 64)
        b = synth_texture("stripes", 2, 30, 2, 64)
        assert a != b
        for img in (a, b):
            v = img.data
            # noisy 0/255 bands: values stay within 30 of either level, half each
            assert np.all((v <= 30) | (v >= 225))
            assert abs(np.mean(v >= 225) - 0.5) < 1e-12
        ha = np.histogram(a.data, bins=[0, 31, 225, 256])[0]
        hb = np.histogram(b.data, bins=[0, 31, 225, 256])[0]
        np.testing.assert_array_equal(ha, hb)

    def test_stripes_layout(self):
        img = synth_texture("stripes", 2, 0, 0, 8)
        assert img.pixels[0].tolist() == [0, 0, 255, 255, 0, 0, 255, 255]
        assert np.all(img.pixels == img.pixels[0])

    def test_blob_noise_depends_on_seed(self):
        assert synth_texture("blob-noise", 8, 0, 1, 32) != synth_texture("blob-noise", 8, 0, 2, 32)

    @pytest.mark.parametrize(
        "args",
        [("waves", 4, 0, 0, 8), ("checker", 0, 0, 0, 8), ("checker", 4, 0, 0, 7), ("checker", 4, -1, 0, 8)],
    )
    def test_preconditions(self, args):
        with pytest.raises(ValueError):
            synth_texture(*args)


class TestDataset:
    def _tree(self, root, layout):
        for cname, files in layout.items():
            (root / cname).mkdir()
            for fname, img in files.items():
                write_pgm(img, root / cname / fname)

    def test_lexicographic_classes(self, tmp_path):
        img = GrayImage(np.zeros((4, 4), dtype=int))
        self._tree(tmp_path, {"zebra": {"b.pgm": img, "a.pgm": img}, "apple": {"x.pgm": img}})
        ds = load_dataset(tmp_path)
        assert ds.class_names == ["apple", "zebra"]
        assert [(s.source_path, s.class_id) for s in ds.samples] == [
            ("apple/x.pgm", 0),
            ("zebra/a.pgm", 1),
            ("zebra/b.pgm", 1),
        ]

    def test_tiling(self, tmp_path):
        self._tree(tmp_path, {"a": {"big.pgm": GrayImage(np.zeros((8, 12), dtype=int))}})
        ds = load_dataset(tmp_path, (4, 4))
        assert len(ds) == 6
        assert [s.tile_index for s in ds.samples] == list(range(6))

    def test_empty(self, tmp_path):
        with pytest.raises(DatasetError):
            load_dataset(tmp_path)

    def test_bad_file(self, tmp_path):
        self._tree(tmp_path, {"a": {"ok.pgm": GrayImage(np.zeros((4, 4), dtype=int))}})
        (tmp_path / "a" / "bad.pgm").write_bytes(b"garbage")
        with pytest.raises(DatasetError, match="bad.pgm"):
            load_dataset(tmp_path)
        assert len(load_dataset(tmp_path, skip_bad=True)) == 1
