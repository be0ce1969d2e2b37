# %% [markdown]
# # Approximation rates and recovery from samples

# %%
import numpy as np

from reluriesz import random_unit_ball
from reluriesz.approx import approximate_barron, approximate_sobolev
from reluriesz.recovery import basis_pursuit_recover, draw_samples, least_squares_recover

f = random_unit_ball("Ws", 2, 0.75, 32, seed=0, decay=1.75)
rows = []
for R in (2, 4, 8, 16):
    net, rep = approximate_sobolev(f, 0.75, radius=R)
    rows.append((R, net.width, rep.error_l2_exact, rep.error_bound_certified))
    print(rows[-1])

# %%
R, err = np.array([(r[0], r[2]) for r in rows]).T
print("fitted slope:", np.polyfit(np.log(R), np.log(err), 1)[0])

# %% [markdown]
# Sparse functions: best n-term selection.

# %%
g = random_unit_ball("Bs", 3, 0.5, 2, seed=3)
for eps in (0.4, 0.2, 0.1):
    _, rep = approximate_barron(g, 0.5, eps)
    print(eps, rep.n_terms, rep.error_l2_exact / rep.input_norm)

# %% [markdown]
# Recovering coefficients from point samples.

# %%
h = random_unit_ball("Fs", 2, 0.5, 2, seed=5)
S = draw_samples(h, 60, seed=2)
_, ls = least_squares_recover(S, 2, truth=h)
_, bp = basis_pursuit_recover(S, 2, 1e-8, truth=h)
print("LS", ls.error_l2_exact, "BP", bp.error_l2_exact)
