"""Shared parameter grids (12 points per lattice family)."""

import itertools

from skellamk.processes import ProcessSpec
from skellamk.subordinators import SubordinatorSpec

T = (0.5, 2.0)


def _grid():
    out = {}
    out["skellam"] = [(ProcessSpec.skellam(a, b), t) for (a, b), t in itertools.product([(1, 1), (0.3, 2), (4, 0.5), (0.1, 0.1), (5, 5), (1, 3)], T)]
    out["ppok"] = [(ProcessSpec.ppok(k, lam), t) for k, lam, t in itertools.product((1, 2, 4), (0.5, 2.0), T)]
    out["spok"] = [(ProcessSpec.spok(k, a, b), t) for k, (a, b), t in itertools.product((1, 2, 3), [(1, 1), (2, 0.5)], T)]
    out["sfpp"] = [(ProcessSpec.sfpp(a, lam), t) for a, lam, t in itertools.product((0.5, 0.8, 1.0), (0.5, 2.0), T)]
    out["tsfpp"] = [(ProcessSpec.tsfpp(a, mu, lam), t) for a, (mu, lam), t in itertools.product((0.3, 0.7), [(1, 1), (0.3, 2), (2, 0.5)], T)]
    out["sfsp"] = [(ProcessSpec.sfsp(a1, a2, l1, l2), t) for (a1, a2), (l1, l2), t in itertools.product([(0.6, 0.9), (0.9, 0.9), (1.0, 1.0)], [(1, 1), (2, 0.5)], T)]
    out["tsfsp"] = [
        (ProcessSpec.tsfsp(a1, m1, a2, m2, l1, l2), t)
        for (a1, m1, a2, m2), (l1, l2), t in itertools.product([(0.6, 1, 0.7, 2), (0.4, 0.5, 0.9, 1.0), (1.0, 1.0, 1.0, 1.0)], [(1, 1.5), (2, 0.5)], T)
    ]
    subs = [
        SubordinatorSpec.gamma_sub(2.0, 3.0),
        SubordinatorSpec.gamma_sub(1.0, 1.0),
        SubordinatorSpec.tempered_stable(0.5, 1.0),
        SubordinatorSpec.inverse_gaussian(1.0, 2.0),
    ]
    out["tcspok"] = [(ProcessSpec.tcspok(k, 1.0, b, sub), t) for sub, k, b, t in itertools.product(subs, (1, 2), (0.5,), T)][:12]
    out["tcspok"] += [(ProcessSpec.tcspok(3, 1.0, 1.0, subs[0]), 1.0)]
    return out


GRID = _grid()
FLAT = [(fam, spec, t) for fam, pts in GRID.items() for spec, t in pts]
