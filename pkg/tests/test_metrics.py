import numpy as np
import pytest

import phasecsc as pc


def random_field(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestPsnr:
    def test_perfect_estimate_reports_infinity(self):
        rng = np.random.default_rng(0)
        truth = np.exp(1j * rng.uniform(-np.pi, np.pi, (32, 32)))
        assert pc.psnr(truth, truth.copy()) == np.inf

    def test_all_pi_error_closed_form(self):
        rng = np.random.default_rng(1)
        truth = np.exp(1j * rng.uniform(-np.pi, np.pi, (32, 32)))
        assert abs(pc.psnr(truth, -truth) - 10 * np.log10(4)) < 1e-9

    def test_invariant_under_common_complex_field(self):
        rng = np.random.default_rng(2)
        truth = np.exp(1j * rng.uniform(-np.pi, np.pi, (24, 24)))
        estimate = truth * np.exp(1j * 0.3 * rng.standard_normal((24, 24)))
        field = random_field(rng, (24, 24)) + 4.0  # bounded away from zero
        base = pc.psnr(truth, estimate)
        scaled = pc.psnr(truth * field, estimate * field)
        assert abs(base - scaled) < 1e-9

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            pc.psnr(np.ones((4, 4), complex), np.ones((4, 5), complex))


class TestResidualPhase:
    def test_identical_inputs_give_zero_map(self):
        rng = np.random.default_rng(3)
        truth = random_field(rng, (16, 16))
        np.testing.assert_array_equal(pc.residual_phase(truth, truth.copy()), 0.0)

    def test_global_offset_recovered(self):
        rng = np.random.default_rng(4)
        truth = np.exp(1j * rng.uniform(-np.pi, np.pi, (16, 16)))
        resid = pc.residual_phase(truth, truth * np.exp(1j * np.pi / 4))
        np.testing.assert_allclose(resid, np.pi / 4, atol=1e-12)

    def test_matches_per_pixel_atan2(self):
        rng = np.random.default_rng(5)
        a = random_field(rng, (12, 12))
        b = random_field(rng, (12, 12))
        out = pc.residual_phase(a, b)
        for i in range(12):
            for j in range(12):
                z = np.conj(a[i, j]) * b[i, j]
                assert abs(out[i, j] - np.arctan2(z.imag, z.real)) < 1e-12

    def test_range_is_wrapped(self):
        rng = np.random.default_rng(6)
        a = random_field(rng, (20, 20))
        b = random_field(rng, (20, 20))
        out = pc.residual_phase(a, b)
        assert np.all(out > -np.pi - 1e-15) and np.all(out <= np.pi + 1e-15)


class TestColinearity:
    def test_constant_phase_scores_one(self):
        cmap = pc.colinearity_map(np.full((32, 32), 0.7), 7)
        valid = cmap[np.isfinite(cmap)]
        assert valid.size == (32 - 6) ** 2
        np.testing.assert_allclose(valid, 1.0, atol=1e-12)

    def test_border_marked_invalid(self):
        cmap = pc.colinearity_map(np.zeros((16, 16)), 5)
        assert np.all(np.isnan(cmap[:2, :])) and np.all(np.isnan(cmap[-2:, :]))
        assert np.all(np.isnan(cmap[:, :2])) and np.all(np.isnan(cmap[:, -2:]))
        assert np.all(np.isfinite(cmap[2:-2, 2:-2]))

    def test_iid_uniform_phases_random_walk_level(self):
        rng = np.random.default_rng(7)
        phase = rng.uniform(-np.pi, np.pi, (128, 128))
        cmap = pc.colinearity_map(phase, 7)
        mean = np.nanmean(cmap)
        expected = (np.sqrt(np.pi) / 2) / np.sqrt(48)
        assert abs(mean - expected) < 0.2 * expected

    def test_scores_bounded(self):
        rng = np.random.default_rng(8)
        phase = rng.uniform(-np.pi, np.pi, (40, 40))
        cmap = pc.colinearity_map(phase, 7)
        valid = cmap[np.isfinite(cmap)]
        assert np.all(valid >= 0.0) and np.all(valid <= 1.0)

    def test_even_window_rejected(self):
        with pytest.raises(ValueError):
            pc.colinearity_map(np.zeros((16, 16)), 6)

    def test_too_small_image_rejected(self):
        with pytest.raises(ValueError):
            pc.colinearity_map(np.zeros((6, 6)), 7)


class TestReport:
    def test_histogram_integrates_to_one(self):
        rng = np.random.default_rng(9)
        truth = np.exp(1j * rng.uniform(-np.pi, np.pi, (48, 48)))
        estimate = truth * np.exp(1j * 0.1 * rng.standard_normal((48, 48)))
        rep = pc.report(truth, estimate, window=7, bins=40)
        integral = np.sum(rep.colinearity_histogram * np.diff(rep.colinearity_bin_edges))
        assert abs(integral - 1.0) < 1e-9
        assert rep.residual_phase.shape == (48, 48)
        assert np.isfinite(rep.psnr_db)
