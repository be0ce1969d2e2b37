"""Feed-forward ReLU networks: data model, evaluation, audits and JSON I/O.

A network with ``L`` hidden layers is the composition

    A_L o ReLU o A_{L-1} o ... o ReLU o A_0

of ``L + 1`` affine maps; the last one has a single output row.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AffineMap",
    "ReluNetwork",
    "NetworkFormatError",
    "FORMAT_VERSION",
    "eval_net",
    "param_count",
    "nonzero_params",
    "serialize",
    "deserialize",
]

FORMAT_VERSION = 1


class NetworkFormatError(ValueError):
    """Malformed or inconsistent network document."""


@dataclass(frozen=True, eq=False)
class AffineMap:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray     # (out,)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, ndmin=2)
        b = np.array(self.bias, dtype=float).reshape(-1)
        if w.shape[0] != b.shape[0]:
            raise ValueError(f"weights have {w.shape[0]} rows but bias has {b.shape[0]} entries")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValueError("affine map entries must be finite")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def n_out(self) -> int:
        return self.weights.shape[0]

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return z @ self.weights.T + self.bias

    def __eq__(self, other):
        return (isinstance(other, AffineMap)
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.bias, other.bias))


@dataclass(frozen=True, eq=False)
class ReluNetwork:
    dim_in: int
    layers: tuple[AffineMap, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("a network needs at least one affine map")
        if layers[0].n_in != self.dim_in:
            raise ValueError(f"first layer takes {layers[0].n_in} inputs, dim_in is {self.dim_in}")
        for i in range(len(layers) - 1):
            if layers[i].n_out != layers[i + 1].n_in:
                raise ValueError(f"layer {i} outputs {layers[i].n_out}, layer {i + 1} takes {layers[i + 1].n_in}")
        if layers[-1].n_out != 1:
            raise ValueError("the last affine map must have a single output")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def depth(self) -> int:
        """Number of hidden layers ``L``."""
        return len(self.layers) - 1

    @property
    def width(self) -> int:
        """Largest hidden width (0 for a purely affine network)."""
        return max((A.n_out for A in self.layers[:-1]), default=0)

    @property
    def hidden_widths(self) -> list[int]:
        return [A.n_out for A in self.layers[:-1]]

    def max_abs_weight(self) -> float:
        return max(max(np.max(np.abs(A.weights), initial=0.0), np.max(np.abs(A.bias), initial=0.0))
                   for A in self.layers)

    def __call__(self, x):
        return eval_net(self, x)

    def __eq__(self, other):
        return (isinstance(other, ReluNetwork) and self.dim_in == other.dim_in
                and self.layers == other.layers and self.metadata == other.metadata)


def eval_net(net: ReluNetwork, x):
    """Evaluate at one point (returns a float) or at an ``(n, d)`` batch."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim <= 1
    z = arr.reshape(1, -1) if single else arr
    if arr.ndim == 0 and net.dim_in == 1:
        z = arr.reshape(1, 1)
    if z.shape[1] != net.dim_in:
        raise ValueError(f"input has dimension {z.shape[1]}, network expects {net.dim_in}")
    for A in net.layers[:-1]:
        z = np.maximum(A(z), 0.0)
    out = net.layers[-1](z)[:, 0]
    return float(out[0]) if single else out


def param_count(W: int, L: int, d: int) -> int:
    """Parameters of a fully connected width-``W`` depth-``L`` network on ``R^d``."""
    if min(W, L, d) < 1:
        raise ValueError("W, L and d must be positive")
    return W * (d + 1) + (L - 1) * W * (W + 1) + W + 1


def nonzero_params(net: ReluNetwork) -> int:
    return int(sum(np.count_nonzero(A.weights) + np.count_nonzero(A.bias) for A in net.layers))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def to_document(net: ReluNetwork) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "dim_in": net.dim_in,
        "width": net.width,
        "depth": net.depth,
        "activation": "relu",
        "layers": [{"weights": A.weights.tolist(), "bias": A.bias.tolist()} for A in net.layers],
        "metadata": _jsonable(net.metadata),
    }


def serialize(net: ReluNetwork) -> bytes:
    # json writes floats with repr, the shortest string that round-trips
    return json.dumps(to_document(net), sort_keys=True, allow_nan=False).encode("utf-8")


def _need(doc, key, kind, path):
    if key not in doc:
        raise NetworkFormatError(f"{path}: missing field '{key}'")
    val = doc[key]
    if kind is float:
        ok = isinstance(val, (int, float)) and not isinstance(val, bool)
    else:
        ok = isinstance(val, kind) and not (kind is int and isinstance(val, bool))
    if not ok:
        raise NetworkFormatError(f"{path}.{key}: expected {kind.__name__}")
    return val


def _matrix(val, path) -> np.ndarray:
    if not isinstance(val, list) or not all(isinstance(r, list) for r in val):
        raise NetworkFormatError(f"{path}: expected a list of rows")
    lens = {len(r) for r in val}
    if len(lens) > 1:
        raise NetworkFormatError(f"{path}: ragged rows")
    for i, row in enumerate(val):
        for j, v in enumerate(row):
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise NetworkFormatError(f"{path}[{i}][{j}]: expected a finite number")
    return np.array(val, dtype=float).reshape(len(val), lens.pop() if lens else 0)


def from_document(doc) -> ReluNetwork:
    if not isinstance(doc, dict):
        raise NetworkFormatError("$: expected an object")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise NetworkFormatError(f"$.format_version: unsupported version {version!r}")
    if doc.get("activation", "relu") != "relu":
        raise NetworkFormatError("$.activation: only 'relu' is supported")
    dim_in = _need(doc, "dim_in", int, "$")
    raw_layers = _need(doc, "layers", list, "$")
    layers = []
    for i, raw in enumerate(raw_layers):
        path = f"$.layers[{i}]"
        if not isinstance(raw, dict):
            raise NetworkFormatError(f"{path}: expected an object")
        w = _matrix(_need(raw, "weights", list, path), f"{path}.weights")
        b = _matrix([_need(raw, "bias", list, path)], f"{path}.bias")[0]
        try:
            layers.append(AffineMap(w, b))
        except ValueError as exc:
            raise NetworkFormatError(f"{path}: {exc}") from exc
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise NetworkFormatError("$.metadata: expected an object")
    try:
        net = ReluNetwork(dim_in, tuple(layers), meta)
    except ValueError as exc:
        raise NetworkFormatError(f"$.layers: {exc}") from exc
    if "depth" in doc and doc["depth"] != net.depth:
        raise NetworkFormatError(f"$.depth: declared {doc['depth']}, layers give {net.depth}")
    if "width" in doc and doc["width"] != net.width:
        raise NetworkFormatError(f"$.width: declared {doc['width']}, layers give {net.width}")
    return net


def deserialize(data: bytes | str) -> ReluNetwork:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"$: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return from_document(doc)
