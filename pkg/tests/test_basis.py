import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reluriesz.basis import (
    BasisId,
    Kind,
    MultiIndex,
    basis_l2_norm,
    eval_basis,
    eval_basis_batch,
    eval_scalar,
    is_positive_leading,
)


@pytest.mark.parametrize("kind,t,expected", [
    ("cos", 0.0, 1.0), ("cos", 0.5, -1.0), ("cos", 0.25, 0.0),
    ("sin", 0.125, 0.5), ("cos", 2.25, 0.0),
])
def test_eval_scalar_values(kind, t, expected):
    assert eval_scalar(kind, t) == pytest.approx(expected, abs=1e-15)


def test_generators_interpolate_trig_at_quarter_points():
    for j in range(8):
        t = j / 4
        assert eval_scalar("cos", t) == pytest.approx(math.cos(2 * math.pi * t), abs=1e-12)
        assert eval_scalar("sin", t) == pytest.approx(math.sin(2 * math.pi * t), abs=1e-12)


@given(st.floats(-50, 50, allow_nan=False))
def test_generator_period_and_shift(t):
    assert eval_scalar("cos", t + 1) == pytest.approx(eval_scalar("cos", t), abs=1e-9)
    assert eval_scalar("sin", t) == pytest.approx(eval_scalar("cos", t + 0.75), abs=1e-9)
    assert -1 <= eval_scalar("cos", t) <= 1


def test_eval_scalar_rejects_nonfinite():
    with pytest.raises(ValueError):
        eval_scalar("cos", math.inf)


def test_eval_basis_examples():
    assert eval_basis(BasisId.cos(1, 2), (0.5, 0.25)) == pytest.approx(1.0)
    assert eval_basis(BasisId.const(3), (0.1, 0.7, 0.3)) == 1.0
    assert eval_basis(BasisId.sin(1), (0.125,)) == pytest.approx(0.5)


def test_eval_basis_dimension_mismatch():
    with pytest.raises(ValueError):
        eval_basis(BasisId.cos(1, 2), (0.5,))


@pytest.mark.parametrize("k,expected", [((1, -2), True), ((0, -1), False), ((0, 0), False), ((0, 3), True)])
def test_positive_leading(k, expected):
    assert is_positive_leading(k) is expected


def test_basis_id_rejects_non_half_lattice():
    with pytest.raises(ValueError):
        BasisId.cos(-1, 2)
    with pytest.raises(ValueError):
        BasisId.sin(0, 0)


def test_l2_norms():
    assert basis_l2_norm(BasisId.const(2)) == 1.0
    assert basis_l2_norm(BasisId.cos(1)) == pytest.approx(0.5773502691896258, abs=1e-15)
    assert basis_l2_norm(BasisId.sin(5, 3)) == pytest.approx(3 ** -0.5)


def test_batch_matches_scalar():
    rng = np.random.default_rng(0)
    ids = [BasisId.const(2), BasisId.cos(1, -1), BasisId.sin(2, 3)]
    x = rng.random((50, 2))
    M = eval_basis_batch(ids, x)
    for i, p in enumerate(x):
        for j, b in enumerate(ids):
            assert M[i, j] == pytest.approx(eval_basis(b, p), abs=1e-12)


def test_multiindex_norms():
    m = MultiIndex.of(3, -4)
    assert m.norm1() == 7 and m.norm2_sq() == 25 and m.norm2() == 5.0
    assert m.scaled(3).entries == (9, -12)
    assert Kind("cos") is Kind.COS
