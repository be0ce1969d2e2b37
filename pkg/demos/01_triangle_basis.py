# %% [markdown]
# # Triangle waves as a basis
#
# The two generators are piecewise-linear cousins of cos and sin.
# We check their Fourier content and the conditioning of a small Gram matrix.

# %%
import numpy as np

from reluriesz import BasisId, eval_basis_batch, fourier_to_riesz, gram_matrix
from reluriesz.coeffs import FourierCoeffs
from reluriesz.recovery import vr_ids

t = np.linspace(0, 1, 9)[:, None]
vals = eval_basis_batch([BasisId.cos(1), BasisId.sin(1)], t)
print(np.column_stack([t[:, 0], vals]))

# %% [markdown]
# A pure cosine expands into triangle waves with Mobius weights.

# %%
f = FourierCoeffs(1, 0.0, {(1,): (1.0, 0.0)})
g, tail = fourier_to_riesz(f, L=20)
print("tail bound:", tail)
for k, (a, b) in sorted(g.terms.items())[:6]:
    print(k, round(a, 6), round(b, 6))

# %%
x = np.random.default_rng(0).random((2000, 1))
print("max error:", np.max(np.abs(g.evaluate(x) - np.cos(2 * np.pi * x[:, 0]))))

# %% [markdown]
# Normalized Gram eigenvalues stay close to one.

# %%
for d in (1, 2, 3):
    G = gram_matrix(vr_ids(4, d))
    ev = G.normalized().eigenvalues()
    print(d, len(ev), ev.min().round(4), ev.max().round(4))
