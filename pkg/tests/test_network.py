import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reluriesz.constructions import build_hat, build_stacked
from reluriesz.coeffs import RieszCoeffs
from reluriesz.network import (
    AffineMap,
    NetworkFormatError,
    ReluNetwork,
    deserialize,
    eval_net,
    nonzero_params,
    param_count,
    serialize,
)


def test_param_count_examples():
    assert param_count(4, 3, 2) == 57
    assert param_count(2, 1, 1) == 7
    with pytest.raises(ValueError):
        param_count(0, 1, 1)


def test_nonzero_params_within_budget():
    c = RieszCoeffs(2, 0.3, {(1, 0): (1.0, 0.5), (1, 1): (0.0, -2.0)})
    net = build_stacked(c)
    assert nonzero_params(net) <= param_count(4 * 2, net.depth, 2)


def test_affine_map_validation():
    with pytest.raises(ValueError):
        AffineMap(np.ones((2, 3)), np.ones(3))
    with pytest.raises(ValueError):
        AffineMap(np.array([[np.nan]]), np.zeros(1))
    A = AffineMap(np.ones((1, 2)), np.zeros(1))
    with pytest.raises(ValueError):
        A.weights[0, 0] = 3.0


def test_network_validation():
    with pytest.raises(ValueError):
        ReluNetwork(2, [AffineMap(np.ones((3, 2)), np.zeros(3)), AffineMap(np.ones((1, 2)), np.zeros(1))])
    with pytest.raises(ValueError):
        ReluNetwork(2, [AffineMap(np.ones((2, 2)), np.zeros(2))])


def test_eval_scalar_and_batch():
    h = build_hat()
    assert eval_net(h, 0.25) == pytest.approx(0.5)
    assert eval_net(h, [0.5]) == pytest.approx(1.0)
    out = eval_net(h, np.array([[0.0], [0.5], [1.0]]))
    np.testing.assert_allclose(out, [0, 1, 0], atol=1e-15)
    with pytest.raises(ValueError):
        eval_net(h, [0.1, 0.2])


def test_hat_roundtrip_bytes():
    h = build_hat()
    data = serialize(h)
    back = deserialize(data)
    assert back == h and serialize(back) == data


def test_hand_written_document():
    doc = {"format_version": 1, "dim_in": 1, "width": 2, "depth": 1, "activation": "relu",
           "layers": [{"weights": [[1.0], [1.0]], "bias": [0.0, -0.5]},
                      {"weights": [[2.0, -4.0]], "bias": [0.0]}], "metadata": {}}
    net = deserialize(json.dumps(doc))
    assert eval_net(net, 0.5) == pytest.approx(1.0)


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d["layers"][1].update(bias=[0.0, 1.0]), "$.layers[1]"),
    (lambda d: d.update(activation="tanh"), "activation"),
    (lambda d: d.update(depth=5), "depth"),
    (lambda d: d["layers"][0].update(weights=[[1.0]]), "$.layers[0]"),
    (lambda d: d.pop("layers"), "layers"),
])
def test_malformed_documents(mutate, where):
    doc = json.loads(serialize(build_hat()))
    mutate(doc)
    with pytest.raises(NetworkFormatError, match=__import__("re").escape(where)):
        deserialize(json.dumps(doc))


def test_truncated_file():
    data = serialize(build_hat())
    with pytest.raises(NetworkFormatError):
        deserialize(data[: len(data) // 2])


def test_nan_rejected():
    doc = json.loads(serialize(build_hat()))
    text = json.dumps(doc).replace("2.0", "NaN", 1)
    with pytest.raises(NetworkFormatError):
        deserialize(text)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=4), st.integers(1, 4), st.integers(0, 2**31))
def test_roundtrip_random(widths, d, seed):
    rng = np.random.default_rng(seed)
    sizes = [d] + widths + [1]
    net = ReluNetwork(d, [AffineMap(rng.standard_normal((b, a)), rng.standard_normal(b))
                          for a, b in zip(sizes[:-1], sizes[1:])])
    back = deserialize(serialize(net))
    assert back == net
    x = rng.random((20, d))
    assert eval_net(back, x).tobytes() == eval_net(net, x).tobytes()
    assert net.depth == len(widths) and net.width == max(widths)
