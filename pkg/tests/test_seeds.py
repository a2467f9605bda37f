import numpy as np
import pytest

from powergan.seeds import substream, substream_int


def test_same_name_same_stream():
    a = substream(42, "shift", 3, 7).random(8)
    b = substream(42, "shift", 3, 7).random(8)
    assert np.array_equal(a, b)


def test_different_names_differ():
    a = substream(42, "shift", 3).random(8)
    b = substream(42, "latent", 3).random(8)
    c = substream(42, "shift", 4).random(8)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_root_seed_changes_stream():
    assert not np.array_equal(substream(1, "x").random(4), substream(2, "x").random(4))


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        substream(-1, "x")


def test_substream_int_deterministic():
    assert substream_int(9, "init", 2) == substream_int(9, "init", 2)
    assert substream_int(9, "init", 2) != substream_int(9, "init", 3)
