import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reluriesz import _constants
from reluriesz.approx import (
    approximate_barron,
    approximate_sobolev,
    best_n_term,
    lp_error_mc,
    lp_norm_mc,
    radius_for_eps,
    sigma_upper_bound,
    truncate_radius,
)
from reluriesz.coeffs import RieszCoeffs
from reluriesz.constructions import build
from reluriesz.gram import l2_distance
from reluriesz.spectrum import make_rng, norm, random_unit_ball


def test_radius_for_eps():
    assert radius_for_eps(0.5, 0.1, 1.0) == pytest.approx(100.0)
    assert radius_for_eps(0.999999, 2.0, 2.0) == pytest.approx(1.0)
    vals = [radius_for_eps(0.5, e, 1.0) for e in np.linspace(0.05, 0.95, 20)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        radius_for_eps(0.5, 0.0, 1.0)


def test_truncate_radius():
    c = RieszCoeffs(2, 1.0, {(1, 0): (1.0, 2.0)})
    head, bound = truncate_radius(c, 2, 0.5)
    assert head == c and bound == 0.0
    R, s = 3.0, 0.5
    one = RieszCoeffs(1, 0.0, {(6,): ((6.0) ** -s, 0.0)})
    _, bound = truncate_radius(one, R, s)
    assert bound == pytest.approx(R**-s)
    for seed in range(5):
        f = random_unit_ball("Fs", 2, s, 6, seed=seed)
        head, bound = truncate_radius(f, 3, s)
        assert l2_distance(f, head) <= bound


def test_best_n_term():
    c = RieszCoeffs(1, 0.0, {(1,): (1.0, 0.5), (2,): (0.25, 0.0)})
    sel, sigma = best_n_term(c, 1)
    assert sigma == pytest.approx(math.sqrt(5) / 4)
    assert sel.terms == {(1,): (1.0, 0.0)}
    assert best_n_term(c, 5)[1] == 0.0
    assert best_n_term(c, 0)[1] == pytest.approx(math.sqrt(1 + 0.25 + 1 / 16))


def test_best_n_term_ties_are_lexicographic():
    c = RieszCoeffs(1, 0.0, {(2,): (1.0, 1.0), (1,): (0.0, 1.0)})
    sel, _ = best_n_term(c, 2)
    assert sel.terms == {(1,): (0.0, 1.0), (2,): (1.0, 0.0)}


def test_sigma_bound_1d_rate():
    b = [sigma_upper_bound(n, 1, 0.0) for n in (1, 4, 16)]
    assert b[0] / b[1] == pytest.approx(2.0) and b[1] / b[2] == pytest.approx(2.0)


def _profile(n, d, s):
    c1, c2 = _constants.C1, _constants.C2
    if n <= c2 * d:
        return 1.0 / n
    if n <= (c1 / 2) ** d:
        return (math.log(c2 * d) / math.log(n)) ** s / n
    return d ** (-s) * n ** (-2 * s / d - 1)


def test_sigma_bound_regimes():
    s = 0.5
    C = _constants.sigma_constant(s)
    # d = 5 is the first dimension where the middle regime is nonempty
    assert _constants.C2 * 4 > (_constants.C1 / 2) ** 4 and _constants.C2 * 5 < (_constants.C1 / 2) ** 5
    for d, ns in ((2, (1, 2999, 3000, 3001, 10**5)), (5, (7499, 7500, 7501, 9160, 9161, 9162, 10**6))):
        for n in ns:
            assert sigma_upper_bound(n, d, s) == pytest.approx(math.sqrt(C * _profile(n, d, s)), rel=1e-12)


def test_sigma_bound_continuity_at_first_boundary():
    # 1/n and (log(c2 d)/log n)^s / n agree at n = c2 d
    d, s = 5, 0.5
    n0 = _constants.C2 * d
    assert _profile(n0, d, s) == pytest.approx((math.log(n0) / math.log(n0)) ** s / n0)
    left, right = sigma_upper_bound(int(n0), d, s), sigma_upper_bound(int(n0) + 1, d, s)
    assert right / left == pytest.approx(math.sqrt(n0 / (n0 + 1) * (math.log(n0) / math.log(n0 + 1)) ** s))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 0.95))
def test_rearranged_unit_sequence_decay(seed, s):
    rng = make_rng(seed)
    a = rng.standard_normal(300) * rng.random(300) ** 3
    w = np.arange(1, 301, dtype=float) ** s
    a /= np.sum(w * np.abs(a))
    star = np.sort(np.abs(a))[::-1]
    ell = np.arange(1, 301)
    assert np.all(star <= (s + 1) * ell ** (-s - 1.0) + 1e-15)


def test_sobolev_exact_when_inside():
    f = random_unit_ball("Fs", 2, 0.5, 3, seed=1)
    net, rep = approximate_sobolev(f, 0.5, radius=3)
    assert rep.error_l2_exact <= 1e-10
    x = make_rng(2).random((500, 2))
    assert np.max(np.abs(net(x) - f.evaluate(x))) <= 1e-9


def test_sobolev_certificates_and_sizes():
    f = random_unit_ball("Ws", 2, 0.75, 64, seed=0, decay=1.75)
    for R in (2, 4, 8, 16):
        net, rep = approximate_sobolev(f, 0.75, radius=R)
        assert rep.error_l2_exact <= rep.error_bound_certified
        assert rep.width <= rep.extras["width_bound"]
        assert rep.depth <= rep.extras["depth_bound"]
        assert rep.space == "Ws"


def test_sobolev_eps_path():
    f = random_unit_ball("Ws", 1, 0.5, 8, seed=3, decay=1.0)
    _, rep = approximate_sobolev(f, 0.5, 0.5)
    assert rep.radius == pytest.approx(radius_for_eps(0.5, 0.5, _constants.sobolev_constant(0.5)))
    assert rep.error_l2_exact <= 0.5 * rep.input_norm
    with pytest.raises(ValueError):
        approximate_sobolev(f, 1.0, 0.1)


def test_barron_one_sparse():
    f = random_unit_ball("BsSeq", 2, 0.5, 2, sparsity=1, seed=5)
    net, rep = approximate_barron(f, 0.5, 0.1)
    assert rep.n_terms == 1 and rep.error_l2_exact <= 1e-12


def test_barron_tail_term():
    s, eps = 0.5, 0.5
    R = radius_for_eps(s, eps, 2.0)
    k = 2 * math.ceil(R)
    f = RieszCoeffs(1, 0.0, {(k,): (k**-s, 0.0)})
    _, rep = approximate_barron(f, s, eps)
    assert rep.extras["tail_l2_coeffs"] <= (2 * R) ** -s


def test_barron_targets():
    for d, R in ((2, 6), (8, 1.5)):
        for seed in range(10):
            f = random_unit_ball("Bs", d, 0.5, R, seed=seed)
            _, rep = approximate_barron(f, 0.5, 0.1)
            assert rep.error_l2_exact <= 0.1 * rep.input_norm
            assert rep.error_l2_exact <= rep.error_bound_certified
            assert rep.width <= 4 * max(rep.n_terms, 1)


def test_lp_estimates():
    f = random_unit_ball("Fs", 2, 0.5, 2, seed=1)
    net = build(f)
    assert lp_error_mc(f, net, 2.0, 2000).value <= 1e-9
    far = 0
    for seed in range(20):
        g = random_unit_ball("Fs", 2, 0.5, 3, seed=seed)
        h = RieszCoeffs(2, g.alpha0, dict(list(g.terms.items())[:3]))
        est = lp_error_mc(g, build(h), 2.0, 20_000, seed)
        far += abs(est.value - l2_distance(g, h)) > 3 * est.stderr
        inf = lp_error_mc(g, build(h), math.inf, 4096, seed)
        assert inf.value >= lp_error_mc(g, build(h), 2.0, 4096, seed).value
    assert far <= 2
    with pytest.raises(ValueError):
        lp_norm_mc(lambda x: x[:, 0], 1, 1.0)


def test_report_dict():
    f = random_unit_ball("Fs", 1, 0.5, 4, seed=0)
    _, rep = approximate_sobolev(f, 0.5, radius=2)
    d = rep.to_dict()
    assert {"width", "depth", "params", "error_l2_exact", "error_bound_certified"} <= set(d)
    assert norm("Fs", 0.5, f) == pytest.approx(rep.input_norm)
