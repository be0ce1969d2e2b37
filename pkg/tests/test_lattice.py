import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reluriesz import _constants
from reluriesz.lattice import (
    BallSpec,
    CapExceededError,
    bound_terms,
    count_ball,
    count_ball_recursive,
    enumerate_ball,
    enumerate_half_ball,
    log_upper_bound_N,
    lower_bound_W,
    weight_partial_sum,
    weight_rearrangement,
)


def _brute(t2, d):
    r = math.isqrt(int(t2))
    return [p for p in itertools.product(range(-r, r + 1), repeat=d) if sum(e * e for e in p) <= t2]


def test_enumerate_examples():
    assert enumerate_ball(BallSpec.from_radius(0.5, 3)).tolist() == [[0, 0, 0]]
    pts = {tuple(p) for p in enumerate_ball(BallSpec.from_radius(1.5, 2)).tolist()}
    assert pts == {(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)}
    assert len(enumerate_ball(BallSpec.from_radius(2, 2))) == 13


def test_half_ball_examples():
    half = {tuple(p) for p in enumerate_half_ball(BallSpec.from_radius(1.5, 2)).tolist()}
    assert half == {(1, 0), (1, 1), (1, -1), (0, 1)}
    assert enumerate_half_ball(BallSpec.from_radius(0.5, 2)).shape[0] == 0
    assert {tuple(p) for p in enumerate_half_ball(BallSpec.from_radius(1, 3)).tolist()} == {
        (1, 0, 0), (0, 1, 0), (0, 0, 1)}


def test_enumeration_is_lexicographic():
    pts = enumerate_ball(BallSpec.from_radius(2.5, 3)).tolist()
    assert pts == sorted(pts)


@pytest.mark.parametrize("t,d,n", [(1, 4, 9), (1.5, 2, 9), (0.99, 100, 1), (2, 2, 13), (1, 1, 3)])
def test_count_examples(t, d, n):
    assert count_ball(BallSpec.from_radius(t, d)) == n


def test_exact_squared_radius():
    assert count_ball(BallSpec.from_squared(2, 2)) == 9
    assert count_ball_recursive(BallSpec.from_squared(2, 2)) == 9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 20), st.integers(1, 4))
def test_counts_agree_with_brute_force(t2, d):
    spec = BallSpec.from_squared(t2, d)
    n = len(_brute(t2, d))
    assert count_ball(spec) == count_ball_recursive(spec) == len(enumerate_ball(spec)) == n
    assert 2 * len(enumerate_half_ball(spec)) + 1 == n


def test_cap():
    with pytest.raises(CapExceededError):
        enumerate_ball(BallSpec.from_radius(10, 4), cap=100)


def test_bound_examples():
    c1, c2 = _constants.C1, _constants.C2
    li, lii = bound_terms(BallSpec.from_radius(1, 4))  # t = sqrt(d)/2
    assert li == pytest.approx(4 * math.log(c1 / 2))
    assert log_upper_bound_N(BallSpec.from_radius(1, 4)) == pytest.approx(4 * math.log(c1 / 2))
    _, lii = bound_terms(BallSpec.from_radius(1, 2))
    assert lii == pytest.approx(math.log(2 * c2))


def test_bounds_hold_on_grid():
    for d in range(1, 9):
        for t in np.arange(0.5, 6.01, 0.5):
            spec = BallSpec.from_radius(float(t), d)
            assert math.log(count_ball(spec)) <= log_upper_bound_N(spec) + 1e-12


def test_invalid_specs():
    with pytest.raises(ValueError):
        BallSpec.from_radius(-1, 2)
    with pytest.raises(ValueError):
        BallSpec.from_radius(1, 0)
    with pytest.raises(ValueError):
        BallSpec.from_radius(math.inf, 2)


def test_weight_rearrangement_examples():
    w, idx = weight_rearrangement(3, 2, 1.0)
    assert w.tolist() == pytest.approx([1, 1, math.sqrt(2)])
    assert weight_rearrangement(2, 5, 0.0)[0].tolist() == [1.0, 1.0]


def test_weight_rearrangement_exceeds_radius():
    for d, s in ((2, 0.5), (3, 1.0)):
        w, _ = weight_rearrangement(200, d, s)
        assert np.all(np.diff(w) >= 0)
        for t in (1, 1.5, 2, 3):
            if count_ball(BallSpec.from_radius(t, d)) < 200:
                # fewer lattice points than n inside t B: the n-th weight exceeds t^s
                n = count_ball(BallSpec.from_radius(t, d))
                if (n - 1) // 2 < 200:
                    assert w[(n - 1) // 2] > t**s


def test_weight_partial_sums():
    assert weight_partial_sum(1, 3, 0.5) == 1.0
    brute = sorted(math.hypot(*k) for k in enumerate_half_ball(BallSpec.from_radius(3, 2)).tolist())
    assert weight_partial_sum(4, 2, 1.0) == pytest.approx(sum(brute[:4]))


def test_lower_bound_W_regimes():
    c2 = _constants.C2
    assert lower_bound_W(10, 2, 0.5) == 10.0
    assert lower_bound_W(int(c2 * 2), 2, 0.0) == pytest.approx(c2 * 2)
    for d in (2, 4, 8):
        for s in (0.25, 0.75):
            w, _ = weight_rearrangement(10_000, d, s)
            W = np.cumsum(w)
            for ell in (1, 10, 100, 1000, 3000, 10_000):
                assert lower_bound_W(ell, d, s) <= W[ell - 1] * (1 + 1e-12)
