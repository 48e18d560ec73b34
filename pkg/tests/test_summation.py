import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from varexp.summation import compensated_row_sums, compensated_sum


def test_cancellation_recovered():
    vals = np.array([1.0, 1e100, 1.0, -1e100])
    assert compensated_sum(vals) == 2.0
    assert np.sum(vals) != 2.0


def test_complex_componentwise():
    vals = np.array([1e16 + 1j, 1.0 - 1e16j, -1e16 + 1e16j])
    assert compensated_sum(vals) == complex(1.0, 1.0)


def test_rows_match_single_sums():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(7, 1000)) * 10.0 ** rng.integers(-8, 8, size=(7, 1000))
    rows = compensated_row_sums(m)
    assert [compensated_sum(r) for r in m] == rows.tolist()


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e12, 1e12), min_size=1, max_size=200))
def test_close_to_exactly_rounded_sum(xs):
    exact = math.fsum(xs)
    scale = max(1.0, sum(abs(x) for x in xs))
    assert abs(compensated_sum(np.array(xs)) - exact) <= 4e-16 * scale


def test_bit_reproducible():
    x = np.random.default_rng(1).random(100_000)
    assert compensated_sum(x) == compensated_sum(x.copy())
