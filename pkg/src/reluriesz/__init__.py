"""Exact ReLU networks for piecewise-linear Riesz expansions on the unit cube."""

from .basis import BasisId, Kind, MultiIndex, eval_basis, eval_basis_batch, eval_scalar
from .coeffs import FourierCoeffs, RieszCoeffs, load_coeffs, loads_coeffs, dumps_coeffs
from .constructions import (
    audit,
    build,
    build_generator_net,
    build_hat,
    build_inline,
    build_stacked,
    pad_depth,
)
from .gram import GramMatrix, gram_entry, gram_matrix, l2_distance, l2_inner, l2_norm
from .lattice import BallSpec, count_ball, enumerate_ball, enumerate_half_ball, upper_bound_N
from .network import AffineMap, ReluNetwork, deserialize, eval_net, param_count, serialize
from .spectrum import (
    Space,
    fourier_to_riesz,
    generator_fourier_coefficient,
    mobius,
    norm,
    random_unit_ball,
    riesz_to_fourier,
)

__version__ = "0.1.0"
