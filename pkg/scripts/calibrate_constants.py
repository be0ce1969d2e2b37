"""Recompute the calibration tables stored in reluriesz/_constants.py.

    python scripts/calibrate_constants.py            # print the tables
    python scripts/calibrate_constants.py --write    # rewrite _constants.py in place

W_LOWER_TABLE   min over d = 2..8, (c1/2)^d <= ell <= 1e4 of W(ell) / (d^(s/2) ell^(s/d+1))
SIGMA_TABLE     max over d in {2, 4, 8}, n <= 1e3 of n * sum_{k > n} W(k)^-2
                (every tested n lies in the first regime n <= c2 d; the sum past
                K_MAX is bounded by 1/K_MAX because W(k) >= k)
SOBOLEV_TABLE   2 x max over a seeded ensemble of ||f - head_R||_2 R^s / ||f||_{W^s}
"""

from __future__ import annotations

import argparse
import math
import pathlib
import re

import numpy as np

from reluriesz import _constants
from reluriesz.gram import l2_distance
from reluriesz.lattice import weight_rearrangement
from reluriesz.spectrum import norm, random_unit_ball, riesz_head

K_MAX = 100_000


def w_lower(s):
    best = math.inf
    top = _constants.C1 / 2
    for d in range(2, 9):
        start = math.ceil(top**d)
        if start > 10_000:
            continue
        w, _ = weight_rearrangement(10_000, d, s)
        W = np.cumsum(w)
        ell = np.arange(1, 10_001)
        sel = ell >= start
        ratio = W[sel] / (d ** (s / 2) * ell[sel] ** (s / d + 1))
        best = min(best, float(ratio.min()))
    return best


def sigma(s):
    worst = 0.0
    for d in (2, 4, 8):
        w, _ = weight_rearrangement(K_MAX, d, s)
        inv2 = np.cumsum(w) ** -2.0
        # tails[n] = sum_{k > n} W(k)^-2 for n = 0..K_MAX-1, plus the bound past K_MAX
        tails = np.concatenate([np.cumsum(inv2[::-1])[::-1], [0.0]]) + 1.0 / K_MAX
        n = np.arange(1, 1001)
        worst = max(worst, float(np.max(n * tails[n])))
    return worst


def sobolev(s, seeds=range(6), radii=(2, 4, 8), r_max=32):
    worst = 0.0
    for d in (1, 2):
        for seed in seeds:
            f = random_unit_ball("Ws", d, s, r_max, seed=seed, decay=s + d / 2)
            fn = norm("Ws", s, f)
            for R in radii:
                err = l2_distance(f, riesz_head(f, R))
                worst = max(worst, err * R**s / fn)
    return 2.0 * worst


def tables():
    grid = _constants.S_GRID
    return {
        "W_LOWER_TABLE": tuple(w_lower(s) for s in grid),
        "SIGMA_TABLE": tuple(sigma(s) for s in grid),
        "SOBOLEV_TABLE": tuple(sobolev(s) for s in grid),
    }


def fmt(values):
    body = ",\n".join(f"    {v!r}" for v in values)
    return f"(\n{body},\n)"


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--write", action="store_true", help="rewrite _constants.py")
    args = ap.parse_args()
    out = tables()
    if not args.write:
        for name, vals in out.items():
            print(f"{name} = {fmt(vals)}")
        return
    path = pathlib.Path(_constants.__file__)
    text = path.read_text()
    for name, vals in out.items():
        text = re.sub(rf"^{name} = (None|\(.*?\n\))$", f"{name} = {fmt(vals)}", text, count=1,
                      flags=re.S | re.M)
    path.write_text(text)
    print(f"updated {path}")


if __name__ == "__main__":
    main()
