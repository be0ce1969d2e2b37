# %% [markdown]
# # Exact networks
#
# Any finite triangle-wave expansion is realized exactly by a ReLU net.

# %%
import numpy as np

from reluriesz import audit, build, random_unit_ball, serialize, deserialize

c = random_unit_ball("Fs", 2, 0.5, 3, seed=11)
print(len(c.terms), "terms")

# %%
x = np.random.default_rng(1).random((5000, 2))
for arch in ("stacked", "inline"):
    net = build(c, arch)
    err = np.max(np.abs(net(x) - c.evaluate(x)))
    print(f"{arch:8s} width={net.width:3d} depth={net.depth:3d} err={err:.1e}")

# %% [markdown]
# The audit re-checks size and weight bounds; serialization round-trips bit-for-bit.

# %%
net = build(c)
print(audit(net)["ok"])
again = deserialize(serialize(net))
print(np.array_equal(again(x), net(x)))
