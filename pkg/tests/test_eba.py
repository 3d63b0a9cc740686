from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from most.eba import (
    EbaConfig,
    KernelTooLarge,
    bin_indices,
    classify_row,
    entropy,
    entropy_threshold,
    foreground_tokens,
    pool_map,
)
from most.similarity import outer_product
from most.synthetic import two_blob_feature_map


def block_mean_tie_row(grid: int = 14, c: float = 1000.0) -> np.ndarray:
    """196 distinct values whose non-overlapping 2x2 blocks share one mean.

    Flat at kernel 2 (entropy 0) but near-max entropy at kernel 1, so with
    kernels (1, 2) exactly half the votes pass.
    """
    out = np.zeros((grid, grid))
    b = 0
    for bi in range(grid // 2):
        for bj in range(grid // 2):
            t, s = b + 1, 50 + b
            out[2 * bi, 2 * bj] = c + t
            out[2 * bi, 2 * bj + 1] = c - t
            out[2 * bi + 1, 2 * bj] = c + s
            out[2 * bi + 1, 2 * bj + 1] = c - s
            b += 1
    return out.ravel()


class TestConfig:
    def test_defaults(self):
        cfg = EbaConfig()
        assert cfg.kernels == (1, 2, 3, 4, 5)
        assert (cfg.tau_a, cfg.tau_b, cfg.bins) == (1.0, 0.5, 256)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kernels": ()},
            {"kernels": (0, 1)},
            {"kernels": (1, 3, 2)},
            {"kernels": (1, 1)},
            {"tau_b": 1.5},
            {"bins": 1},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            EbaConfig(**kwargs)


class TestPoolMap:
    def test_kernel_one_is_identity(self):
        grid = np.random.default_rng(0).random((5, 7))
        np.testing.assert_array_equal(pool_map(grid, 1), grid)

    def test_two_by_two_mean(self):
        np.testing.assert_array_equal(pool_map([[1.0, 2.0], [3.0, 4.0]], 2), [[2.5]])

    def test_partial_windows_average_actual_elements(self):
        out = pool_map(np.ones((3, 3)), 2)
        assert out.shape == (2, 2)
        np.testing.assert_array_equal(out, np.ones((2, 2)))

    def test_ceil_mode_shape(self):
        out = pool_map(np.arange(14 * 14).reshape(14, 14), 5)
        assert out.shape == (3, 3)

    def test_partial_window_means(self):
        grid = np.arange(9.0).reshape(3, 3)
        out = pool_map(grid, 2)
        assert out[0, 0] == pytest.approx((0 + 1 + 3 + 4) / 4)
        assert out[0, 1] == pytest.approx((2 + 5) / 2)
        assert out[1, 0] == pytest.approx((6 + 7) / 2)
        assert out[1, 1] == pytest.approx(8.0)

    def test_oversized_kernel_is_skippable(self):
        with pytest.raises(KernelTooLarge):
            pool_map(np.ones((3, 5)), 4)


class TestEntropy:
    def test_constant_map_is_exactly_zero(self):
        assert entropy(np.full((4, 4), 3.7), 256) == 0.0

    def test_uniform_four_bins(self):
        value = entropy(np.array([[0.0, 1 / 3], [2 / 3, 1.0]]), 4)
        assert value == pytest.approx(math.log(4), abs=1e-12)

    def test_multiplicity_pmf(self):
        # pmf {1/2, 1/4, 1/4} -> (3/2) ln 2
        value = entropy(np.array([[1.0, 1.0], [2.0, 3.0]]), 256)
        assert value == pytest.approx(1.5 * math.log(2), abs=1e-12)

    def test_max_value_lands_in_last_bin(self):
        idx = bin_indices(np.array([[0.0, 1.0]]), 256)
        assert list(idx) == [0, 255]

    @settings(max_examples=200, deadline=None)
    @given(
        h=st.integers(1, 8),
        w=st.integers(1, 8),
        bins=st.integers(2, 64),
        seed=st.integers(0, 2**31),
    )
    def test_bounds(self, h, w, bins, seed):
        grid = np.random.default_rng(seed).random((h, w))
        value = entropy(grid, bins)
        assert 0.0 <= value <= math.log(min(bins, h * w)) + 1e-12

    def test_affine_invariance_of_bins(self):
        rng = np.random.default_rng(11)
        identical = 0
        trials = 500
        for _ in range(trials):
            grid = rng.standard_normal((6, 6))
            s = float(rng.uniform(0.1, 10.0))
            t = float(rng.uniform(-5.0, 5.0))
            if np.array_equal(bin_indices(grid, 256), bin_indices(s * grid + t, 256)):
                identical += 1
        assert identical / trials >= 0.99


class TestEntropyThreshold:
    def test_single_cell_map(self):
        assert entropy_threshold(1, 1, EbaConfig()) == pytest.approx(1.0)

    def test_two_by_two(self):
        assert entropy_threshold(2, 2, EbaConfig()) == pytest.approx(1 + 0.5 * math.log(4))

    def test_full_grid(self):
        assert entropy_threshold(14, 14, EbaConfig()) == pytest.approx(
            1 + 0.5 * math.log(196)
        )

    def test_rectangular_generalization(self):
        assert entropy_threshold(3, 5, EbaConfig()) == pytest.approx(1 + 0.5 * math.log(15))


class TestClassifyRow:
    def test_constant_row_is_foreground(self):
        assert classify_row(np.ones(196), 14, 14) is True

    def test_uniform_random_rows_are_background(self):
        rng = np.random.default_rng(0)
        background = sum(
            not classify_row(rng.random(196), 14, 14) for _ in range(200)
        )
        assert background / 200 >= 0.95

    def test_exact_half_votes_is_background(self):
        row = block_mean_tie_row()
        cfg = EbaConfig(kernels=(1, 2))
        assert classify_row(row, 14, 14, cfg) is False
        # Sanity: the passing kernel alone flags it foreground.
        assert classify_row(row, 14, 14, EbaConfig(kernels=(2,))) is True
        assert classify_row(row, 14, 14, EbaConfig(kernels=(1,))) is False

    def test_oversized_kernels_shrink_the_vote(self):
        # Grid 3x3: kernels 4 and 5 are unusable, vote is over (1, 2, 3).
        row = np.ones(9)
        assert classify_row(row, 3, 3, EbaConfig()) is True


class TestForegroundTokens:
    def test_identical_tokens_all_foreground(self):
        data = np.ones((16, 4), dtype=np.float32)
        sim = data.astype(np.float64) @ data.astype(np.float64).T
        fg = foreground_tokens(sim, 4, 4)
        np.testing.assert_array_equal(fg, np.arange(16))

    def test_two_blob_fixture_recall_and_precision(self):
        fmap, _ = two_blob_feature_map()
        sim = outer_product(fmap)
        fg = set(foreground_tokens(sim, fmap.grid_h, fmap.grid_w).tolist())
        blob = {
            r * 14 + c
            for r0, c0, r1, c1 in [(2, 2, 6, 6), (8, 8, 12, 12)]
            for r in range(r0, r1)
            for c in range(c0, c1)
        }
        background = set(range(196)) - blob
        assert blob <= fg  # full recall of planted tokens
        assert len(fg & background) / len(background) <= 0.1

    def test_deterministic(self):
        fmap, _ = two_blob_feature_map(seed=5)
        sim = outer_product(fmap)
        a = foreground_tokens(sim, 14, 14)
        b = foreground_tokens(sim.copy(), 14, 14)
        np.testing.assert_array_equal(a, b)

    def test_scale_invariance_of_classification(self):
        fmap, _ = two_blob_feature_map(seed=9)
        sim = outer_product(fmap)
        fg1 = foreground_tokens(sim, 14, 14)
        fmap.data = (3.7 * fmap.data).astype(np.float32)
        fg2 = foreground_tokens(outer_product(fmap), 14, 14)
        np.testing.assert_array_equal(fg1, fg2)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            foreground_tokens(np.zeros((4, 4)), 3, 3)
