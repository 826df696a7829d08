import numpy as np

from surfscale.rng import seed_record, stream


def test_same_key_same_stream():
    a = stream(7, 'x', 3).random(16)
    b = stream(7, 'x', 3).random(16)
    assert np.array_equal(a, b)


def test_different_keys_differ():
    a = stream(7, 'x', 3).random(16)
    b = stream(7, 'x', 4).random(16)
    c = stream(8, 'x', 3).random(16)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_string_and_int_keys_mix():
    a = stream(1, 'phase', 0, 'rep', 5).random(4)
    b = stream(1, 'phase', 0, 'rep', 5).random(4)
    assert np.array_equal(a, b)


def test_seed_record_is_stable_string():
    rec = seed_record(3, 'exp', 0, 12)
    assert isinstance(rec, str)
    assert rec == seed_record(3, 'exp', 0, 12)
    assert rec != seed_record(3, 'exp', 0, 13)
