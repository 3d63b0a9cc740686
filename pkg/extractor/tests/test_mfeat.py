from __future__ import annotations

import numpy as np
import pytest

from most_extract.mfeat import MAGIC, read_mfeat, write_mfeat


def test_layout_bytes(tmp_path):
    path = tmp_path / "one.mfeat"
    write_mfeat(path, np.array([[0.5]], dtype=np.float32), 1, 1, 1, 1, 1)
    raw = path.read_bytes()
    assert len(raw) == 8 + 28 + 4
    assert raw[:8] == MAGIC
    assert list(np.frombuffer(raw[8:36], dtype="<u4")) == [1, 1, 1, 1, 1, 1, 1]


def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.standard_normal((6, 5)).astype(np.float32)
    path = tmp_path / "map.mfeat"
    write_mfeat(path, data, 2, 3, 16, 32, 48)
    header, back = read_mfeat(path)
    assert header == {"grid_h": 2, "grid_w": 3, "dim": 5, "patch": 16, "img_h": 32, "img_w": 48}
    np.testing.assert_array_equal(back, data)


def test_token_count_mismatch_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_mfeat(tmp_path / "bad.mfeat", np.zeros((5, 4), dtype=np.float32), 2, 3, 16, 32, 48)


def test_non_finite_rejected(tmp_path):
    data = np.zeros((6, 2), dtype=np.float32)
    data[0, 0] = np.nan
    with pytest.raises(ValueError):
        write_mfeat(tmp_path / "bad.mfeat", data, 2, 3, 16, 32, 48)


def test_reader_rejects_corruption(tmp_path):
    path = tmp_path / "map.mfeat"
    write_mfeat(path, np.zeros((1, 2), dtype=np.float32), 1, 1, 8, 8, 8)
    garbled = tmp_path / "garbled.mfeat"
    garbled.write_bytes(b"XXXXXXXX" + path.read_bytes()[8:])
    with pytest.raises(ValueError, match="bad magic"):
        read_mfeat(garbled)
    short = tmp_path / "short.mfeat"
    short.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(ValueError, match="expected"):
        read_mfeat(short)
