import os

import numpy as np
import pytest

from phasecsc import formats

from conftest import random_feasible_bank


def random_raster(rng, shape=(9, 7)):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestCimg:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        image = random_raster(rng)
        path = tmp_path / "a.cimg"
        formats.write_cimg(path, image)
        back = formats.read_cimg(path)
        assert back.dtype == np.complex128
        assert back.tobytes() == image.astype(np.complex128).tobytes()

    def test_write_read_write_is_stable(self, tmp_path):
        rng = np.random.default_rng(1)
        image = random_raster(rng)
        first = tmp_path / "a.cimg"
        second = tmp_path / "b.cimg"
        formats.write_cimg(first, image)
        formats.write_cimg(second, formats.read_cimg(first))
        assert first.read_bytes() == second.read_bytes()

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.cimg"
        path.write_bytes(b"NOPE" + bytes(20))
        with pytest.raises(formats.FormatError):
            formats.read_cimg(path)

    def test_truncated_payload_rejected(self, tmp_path):
        rng = np.random.default_rng(2)
        path = tmp_path / "short.cimg"
        formats.write_cimg(path, random_raster(rng))
        data = path.read_bytes()
        path.write_bytes(data[:-8])
        with pytest.raises(formats.FormatError):
            formats.read_cimg(path)

    def test_unknown_version_rejected(self, tmp_path):
        rng = np.random.default_rng(3)
        path = tmp_path / "v9.cimg"
        formats.write_cimg(path, random_raster(rng, (2, 2)))
        data = bytearray(path.read_bytes())
        data[4] = 9
        path.write_bytes(bytes(data))
        with pytest.raises(formats.FormatError):
            formats.read_cimg(path)

    def test_missing_file_is_oserror(self, tmp_path):
        with pytest.raises(OSError):
            formats.read_cimg(tmp_path / "absent.cimg")

    def test_no_temp_residue(self, tmp_path):
        rng = np.random.default_rng(4)
        formats.write_cimg(tmp_path / "a.cimg", random_raster(rng))
        assert [p.name for p in tmp_path.iterdir()] == ["a.cimg"]


class TestCdic:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        bank = random_feasible_bank(rng, 4, 3)
        path = tmp_path / "d.cdic"
        formats.write_cdic(path, bank)
        back = formats.read_cdic(path)
        assert back.shape == (4, 3, 3)
        assert back.tobytes() == bank.tobytes()

    def test_non_unit_norm_warns_but_loads(self, tmp_path):
        rng = np.random.default_rng(6)
        bank = 2.0 * random_feasible_bank(rng, 2, 3)
        path = tmp_path / "off.cdic"
        formats.write_cdic(path, bank)
        with pytest.warns(RuntimeWarning):
            back = formats.read_cdic(path)
        assert back.shape == (2, 3, 3)

    def test_magic_mismatch_between_formats(self, tmp_path):
        rng = np.random.default_rng(7)
        path = tmp_path / "x.cimg"
        formats.write_cimg(path, random_raster(rng, (3, 3)))
        with pytest.raises(formats.FormatError):
            formats.read_cdic(path)


class TestRendering:
    def test_png_written_and_input_untouched(self, tmp_path):
        rng = np.random.default_rng(8)
        image = random_raster(rng, (16, 16))
        snapshot = image.copy()
        path = tmp_path / "phase.png"
        formats.render_phase_png(path, image)
        assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        np.testing.assert_array_equal(image, snapshot)

    def test_constant_amplitude_renders_full_value(self, tmp_path):
        phase = np.linspace(-np.pi, np.pi, 64).reshape(8, 8)
        path = tmp_path / "flat.png"
        formats.render_phase_png(path, np.exp(1j * phase))
        assert path.exists()


class TestCsvAndTrace:
    def test_profile_row_count_matches_length(self, tmp_path):
        mean = np.linspace(-1, 1, 37)
        std = np.abs(mean)
        path = tmp_path / "profile.csv"
        formats.write_profile_csv(path, mean, std)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 37
        index, m0, s0 = lines[0].split(",")
        assert index == "0"
        assert abs(float(m0) - mean[0]) < 1e-10
        assert abs(float(s0) - std[0]) < 1e-10

    def test_profile_shape_mismatch_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            formats.write_profile_csv(tmp_path / "p.csv", np.zeros(4), np.zeros(5))

    def test_trace_lines(self, tmp_path):
        from phasecsc.solver import AdmmTrace

        trace = AdmmTrace()
        trace.append(1, 10.0, 0.5, 0.25)
        trace.append(2, 9.0, 0.25, 0.125)
        path = tmp_path / "trace.txt"
        formats.write_trace_txt(path, trace)
        lines = path.read_text().strip().split("\n")
        assert lines[0].startswith("1 ") and lines[1].startswith("2 ")
