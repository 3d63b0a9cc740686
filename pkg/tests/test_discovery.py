from __future__ import annotations

import numpy as np
import pytest

from most.discovery import (
    assign,
    inertia_curve,
    kmeans,
    kmeans_best_of,
    kneedle,
    subsample,
)


def two_blobs(n_per: int = 50, separation: float = 50.0, seed: int = 0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n_per, 3))
    b = rng.standard_normal((n_per, 3)) + separation
    return np.vstack([a, b])


class TestKmeans:
    def test_one_cluster_per_point_has_zero_inertia(self):
        x = np.random.default_rng(0).standard_normal((12, 4))
        result = kmeans(x, k=12, seed=1)
        assert result.inertia == 0.0

    def test_separated_blobs_recovered_exactly(self):
        x = two_blobs()
        result = kmeans(x, k=2, seed=0)
        first, second = result.labels[:50], result.labels[50:]
        assert len(set(first.tolist())) == 1
        assert len(set(second.tolist())) == 1
        assert first[0] != second[0]

    def test_inertia_history_nonincreasing(self):
        x = np.random.default_rng(3).standard_normal((200, 5))
        result = kmeans(x, k=7, seed=2)
        hist = result.inertia_history
        assert all(b <= a * (1 + 1e-9) for a, b in zip(hist, hist[1:]))

    def test_deterministic_given_seed(self):
        x = np.random.default_rng(4).standard_normal((80, 4))
        a = kmeans(x, k=5, seed=9)
        b = kmeans(x, k=5, seed=9)
        np.testing.assert_array_equal(a.labels, b.labels)
        assert a.inertia == b.inertia

    def test_labels_are_nearest_centroids(self):
        x = np.random.default_rng(5).standard_normal((60, 3))
        result = kmeans(x, k=4, seed=0)
        d2 = ((x[:, None, :] - result.centroids[None, :, :]) ** 2).sum(axis=2)
        np.testing.assert_array_equal(result.labels, d2.argmin(axis=1))

    def test_assign_matches_kmeans_labels(self):
        x = np.random.default_rng(7).standard_normal((50, 4))
        result = kmeans(x, k=3, seed=1)
        np.testing.assert_array_equal(assign(x, result.centroids), result.labels)

    def test_duplicate_points_do_not_crash(self):
        x = np.vstack([np.zeros((10, 2)), np.ones((1, 2))])
        result = kmeans(x, k=3, seed=0)
        assert result.inertia == 0.0
        assert ((0 <= result.labels) & (result.labels < 3)).all()

    def test_inertia_monotone_in_k_with_restarts(self):
        x = np.random.default_rng(6).standard_normal((120, 4))
        inertias = [kmeans_best_of(x, k, seed=0, restarts=8).inertia for k in (1, 2, 4, 8, 16)]
        assert inertias == sorted(inertias, reverse=True)

    @pytest.mark.parametrize("k", [0, 13])
    def test_k_out_of_range_rejected(self, k):
        with pytest.raises(ValueError):
            kmeans(np.zeros((12, 2)), k=k)


class TestKneedle:
    def test_reference_curve(self):
        assert kneedle([1, 2, 3, 4, 5], [100, 20, 15, 12, 10]) == 2

    def test_linear_decay_warns_and_returns_smallest(self):
        with pytest.warns(UserWarning):
            assert kneedle([1, 2, 3, 4, 5], [100, 80, 60, 40, 20]) == 1

    def test_constant_curve_warns(self):
        with pytest.warns(UserWarning):
            assert kneedle([2, 4, 6], [5.0, 5.0, 5.0]) == 2

    @pytest.mark.parametrize("seed", range(10))
    def test_convex_curve_matches_exhaustive_scan(self, seed):
        rng = np.random.default_rng(seed)
        ks = list(range(1, 12))
        decay = float(rng.uniform(0.3, 0.8))
        inertias = [100.0 * decay**i + 5.0 for i in range(len(ks))]
        got = kneedle(ks, inertias)
        xs = [(k - ks[0]) / (ks[-1] - ks[0]) for k in ks]
        ys = [(v - inertias[-1]) / (inertias[0] - inertias[-1]) for v in inertias]
        gaps = [(1.0 - x) - y for x, y in zip(xs, ys)]
        assert got == ks[gaps.index(max(gaps))]

    def test_result_within_supplied_range(self):
        ks = [5, 10, 20, 40]
        got = kneedle(ks, [90.0, 30.0, 20.0, 18.0])
        assert got in ks

    @pytest.mark.parametrize(
        "ks,inertias",
        [
            ([1, 2], [5.0, 1.0]),
            ([1, 2, 2], [5.0, 3.0, 1.0]),
            ([1, 2, 3], [5.0, 6.0, 1.0]),
        ],
    )
    def test_invalid_inputs_rejected(self, ks, inertias):
        with pytest.raises(ValueError):
            kneedle(ks, inertias)


class TestInertiaCurve:
    def test_monotone_on_blobs(self):
        x = two_blobs(n_per=30)
        curve = inertia_curve(x, [1, 2, 3, 4], seed=0, restarts=4)
        assert curve == sorted(curve, reverse=True)
        # Splitting two genuine blobs gives the big drop at k=2.
        assert kneedle([1, 2, 3, 4], curve) == 2


class TestSubsample:
    def test_small_corpus_returned_whole(self):
        items = list(range(500))
        assert subsample(items, m=10000, seed=0) == items

    def test_deterministic(self):
        items = list(range(5000))
        assert subsample(items, m=100, seed=42) == subsample(items, m=100, seed=42)

    def test_subset_of_exact_size(self):
        items = list(range(5000))
        sample = subsample(items, m=100, seed=1)
        assert len(sample) == 100
        assert set(sample) <= set(items)
        assert sample == sorted(sample)  # corpus order preserved
