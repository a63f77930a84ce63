"""Atomic Levy measures and the Levy-Khintchine consistency check."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..specfun import KahanSum, gen_binomial, signed_binomial_table
from ..subordinators import bernstein, bernstein_taylor
from .transforms import char_exponent

__all__ = ["LevyMeasure", "levy_measure", "levy_khintchine_residual", "lk_bound"]

_ROUND = 1e-14


@dataclass(frozen=True)
class LevyMeasure:
    """Point masses at non-zero integers.

    ``truncation_bound`` is the total mass of the atoms left out.
    """

    atoms: tuple
    truncation_bound: float = 0.0

    def __post_init__(self):
        atoms = tuple(sorted((int(x), float(w)) for x, w in self.atoms))
        locs = [x for x, _ in atoms]
        if len(set(locs)) != len(locs):
            raise ValueError("atom locations must be distinct")
        if any(x == 0 for x in locs):
            raise ValueError("no atom at the origin")
        if any(not w > 0 for _, w in atoms):
            raise ValueError("atom masses must be positive")
        if self.truncation_bound < 0:
            raise ValueError("truncation_bound must be non-negative")
        object.__setattr__(self, "atoms", atoms)

    @property
    def total_mass(self):
        return math.fsum(w for _, w in self.atoms)

    def mass(self, x):
        return dict(self.atoms).get(int(x), 0.0)

    def exponent(self, theta):
        """sum over atoms of mass * (1 - e^{i theta x})."""
        acc_re, acc_im = KahanSum(), KahanSum()
        for x, w in self.atoms:
            z = w * (1 - cmath.exp(1j * theta * x))
            acc_re.add(z.real)
            acc_im.add(z.imag)
        return complex(acc_re.value, acc_im.value)

    def to_dict(self):
        return {"atoms": [[x, w] for x, w in self.atoms], "truncation_bound": self.truncation_bound}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple((int(x), float(w)) for x, w in d["atoms"]), float(d["truncation_bound"]))


def _sfpp_atoms(alpha, lam, n):
    scale = lam**alpha
    c = signed_binomial_table([alpha], n)[0]  # (-1)^j C(alpha, j)
    masses = -scale * c[1:]
    # sum_{j<=n} (-1)^j C(alpha, j) = (-1)^n C(alpha - 1, n): exactly the omitted mass
    rest = scale * (-1) ** n * gen_binomial(alpha - 1, n)
    return [(j, m) for j, m in enumerate(masses, 1) if m > 0], max(rest, 0.0)


def _tsfpp_atoms(alpha, mu, lam, n):
    c = signed_binomial_table([alpha], n)[0]
    j = np.arange(1, n + 1)
    y = lam / (lam + mu)
    masses = -c[1:] * (lam + mu) ** alpha * np.exp(j * math.log(y))
    total = (lam + mu) ** alpha - mu**alpha
    rest = total - math.fsum(masses) + _ROUND * total
    return [(int(i), float(m)) for i, m in zip(j, masses) if m > 0], max(rest, 0.0)


def _one_sided_atoms(spec, truncation):
    fam = spec.family
    if fam == "sfpp":
        if spec.alpha1 == 1:
            return [(1, spec.l1)], 0.0
        return _sfpp_atoms(spec.alpha1, spec.l1, truncation)
    if fam == "tsfpp":
        if spec.alpha1 == 1:
            return [(1, spec.l1)], 0.0
        return _tsfpp_atoms(spec.alpha1, spec.mu1, spec.l1, truncation)
    raise ValueError(fam)


def _tcspok_atoms(spec, truncation, variant):
    k, l1, l2 = spec.k, spec.l1, spec.l2
    c = k * (l1 + l2)
    # b_n = c^n/n! int y^n e^{-cy} pi(dy): coefficients of f(c) - f(c - c u)
    b = bernstein_taylor(spec.sub, c, truncation, scale=c)
    if variant == "closed":
        q, step = np.array([l2, 0.0, l1]) / (l1 + l2), 1
    else:
        q = np.zeros(2 * k + 1)
        q[k + 1 :], q[:k] = l1 / c, l2 / c
        step = k
    nu = np.zeros(2 * step * truncation + 1)
    centre = step * truncation
    power = np.ones(1)
    for n in range(1, truncation + 1):
        power = np.convolve(power, q)
        h = step * n
        nu[centre - h : centre + h + 1] += b[n] * power
    nu[centre] = 0.0
    f_c = float(bernstein(spec.sub, c))
    # every jump of the mixture lands somewhere, including back at 0
    rest = f_c - math.fsum(b[1 : truncation + 1]) + _ROUND * f_c
    atoms = [(int(m), float(w)) for m, w in zip(range(-centre, centre + 1), nu) if w > 0]
    return atoms, max(rest, 0.0)


def levy_measure(spec, truncation=200, variant="conv"):
    """Atoms of the Levy measure; infinite families are cut after ``truncation`` terms."""
    fam = spec.family
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    k, l1, l2 = spec.k, spec.l1, spec.l2
    if fam == "skellam":
        atoms, rest = [(1, l1), (-1, l2)], 0.0
    elif fam == "ppok":
        atoms, rest = [(j, l1) for j in range(1, k + 1)], 0.0
    elif fam == "spok":
        if variant == "closed":
            atoms = [(1, k * l1), (-1, k * l2)]
        else:
            atoms = [(j, l1) for j in range(1, k + 1)] + [(-j, l2) for j in range(1, k + 1)]
        rest = 0.0
    elif fam in ("sfpp", "tsfpp"):
        atoms, rest = _one_sided_atoms(spec, truncation)
    elif fam in ("sfsp", "tsfsp"):
        a, b = spec.components()
        up, r1 = _one_sided_atoms(a, truncation)
        down, r2 = _one_sided_atoms(b, truncation)
        atoms, rest = up + [(-x, w) for x, w in down], r1 + r2
    elif fam == "tcspok":
        atoms, rest = _tcspok_atoms(spec, truncation, variant)
    else:
        raise ValueError(f"{fam} is not a Levy process")
    return LevyMeasure(tuple((x, w) for x, w in atoms if w > 0), rest)


def lk_bound(measure):
    """|1 - e^{i theta x}| <= 2, so the omitted atoms move psi by at most twice their mass."""
    return 2 * measure.truncation_bound + _ROUND * max(1.0, measure.total_mass)


def levy_khintchine_residual(spec, theta, truncation=200, variant="conv"):
    """|psi(theta) - sum_atoms mass (1 - e^{i theta x})|; returns (residual, bound)."""
    nu = levy_measure(spec, truncation, variant)
    psi = char_exponent(spec, theta, variant)
    return abs(psi - nu.exponent(theta)), lk_bound(nu)
