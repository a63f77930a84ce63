"""Fractional differences and residuals of the difference-differential equations.

Each residual compares a Richardson-extrapolated central difference in t
of the tabulated probabilities against the right-hand side of the
family's forward equation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .analytic.levy import levy_measure
from .analytic.tables import pmf_table
from .analytic.transforms import mgf
from .specfun import gen_binomial, signed_binomial_table

__all__ = [
    "FracDiffSpec",
    "SupportError",
    "frac_diff",
    "governing_rhs",
    "governing_residual",
    "time_derivative",
    "initial_mass",
    "mgf_ode_residual",
]


class SupportError(ValueError):
    pass


@dataclass(frozen=True)
class FracDiffSpec:
    """(1 - B)^alpha or (1 - F)^alpha cut after ``truncation`` terms."""

    order: float
    direction: str = "backward"
    truncation: int = 100

    def __post_init__(self):
        if not 0 < self.order <= 1:
            raise ValueError("order must lie in (0, 1]")
        if self.direction not in ("backward", "forward"):
            raise ValueError("direction is 'backward' or 'forward'")
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1")

    def coefficients(self):
        """(-1)^j C(alpha, j), j = 0..truncation."""
        return signed_binomial_table([self.order], self.truncation)[0]

    def tail_weight(self):
        """sum_{j > truncation} |C(alpha, j)|, exact for 0 < alpha <= 1."""
        if self.order == 1:
            return 0.0
        return abs(gen_binomial(self.order - 1, self.truncation))


def _lower_exact(table):
    # one-sided laws vanish below 0, so the window edge there is not a truncation
    return table.spec.one_sided and table.m_lo <= 0


def frac_diff(opspec, table, m, return_bound=False):
    """sum_j (-1)^j C(alpha, j) p(m -/+ j) over the table's values.

    With ``return_bound`` also returns a bound on the omitted terms.
    """
    c = opspec.coefficients()
    n = opspec.truncation
    m = int(m)
    if opspec.direction == "backward":
        if m - n < table.m_lo and not _lower_exact(table):
            raise SupportError(f"window starts at {table.m_lo}; need {m - n}")
        idx = m - np.arange(n + 1)
    else:
        if m + n > table.m_hi:
            raise SupportError(f"window ends at {table.m_hi}; need {m + n}")
        idx = m + np.arange(n + 1)
    vals = np.array([table.prob(i) for i in idx])
    value = math.fsum(c * vals)
    if not return_bound:
        return value
    peak = float(np.max(np.abs(table.probs))) if table.probs.size else 0.0
    return value, opspec.tail_weight() * peak


# --- right-hand sides ---------------------------------------------------------


def governing_rhs(spec, table, m, truncation=100, ppok_index="j", variant="conv"):
    """Right side of d/dt P(X(t) = m) for the family, evaluated on ``table``.

    ``ppok_index="k"`` uses p_{n-k} inside the PPoK sum instead of p_{n-j}
    (the alternative reading of that equation; it does not hold).
    """
    fam = spec.family
    p = table.prob
    if fam == "skellam":
        return spec.l1 * (p(m - 1) - p(m)) + spec.l2 * (p(m + 1) - p(m))
    if fam == "ppok":
        k, lam = spec.k, spec.l1
        if m < 0:
            return 0.0
        js = range(1, min(m, k) + 1)
        if ppok_index == "k":
            s = sum(p(m - k) for _ in js)
        else:
            s = sum(p(m - j) for j in js)
        return -k * lam * p(m) + lam * s
    if fam == "spok" and variant == "conv":
        k = spec.k
        up = sum(p(m - j) for j in range(1, k + 1))
        down = sum(p(m + j) for j in range(1, k + 1))
        return -k * (spec.l1 + spec.l2) * p(m) + spec.l1 * up + spec.l2 * down
    if fam == "sfpp" and spec.alpha1 < 1:
        op = FracDiffSpec(spec.alpha1, "backward", truncation)
        return -(spec.l1**spec.alpha1) * frac_diff(op, table, m)
    if fam == "sfsp" and spec.alpha1 < 1 and spec.alpha2 < 1:
        b = FracDiffSpec(spec.alpha1, "backward", truncation)
        f = FracDiffSpec(spec.alpha2, "forward", truncation)
        return -(spec.l1**spec.alpha1) * frac_diff(b, table, m) - spec.l2**spec.alpha2 * frac_diff(
            f, table, m
        )
    # every other family is a Levy process with atomic measure nu:
    # d/dt P_m = sum_x nu(x) (P_{m-x} - P_m)
    nu = levy_measure(spec, truncation, variant)
    return math.fsum(w * (p(m - x) - p(m)) for x, w in nu.atoms)


def time_derivative(spec, t, dt, ms, tol=1e-14, variant="conv"):
    """d/dt P(X(t) = m) for each m by central differences with one Richardson step."""
    if not 0 < dt < t:
        raise ValueError("need 0 < dt < t")

    def probs(s):
        tab = pmf_table(spec, s, tol, variant=variant)
        return np.array([tab.prob(m) for m in ms])

    d1 = (probs(t + dt) - probs(t - dt)) / (2 * dt)
    d2 = (probs(t + dt / 2) - probs(t - dt / 2)) / dt
    return (4 * d2 - d1) / 3


def governing_residual(
    spec, t, dt=None, window=None, truncation=100, ppok_index="j", variant="conv", tol=1e-14
):
    """max over the window of |d/dt P_m - rhs_m|.

    The default window is the central part of the table: the mean (or 0)
    plus or minus 15.
    """
    if dt is None:
        dt = 1e-4 * t
    table = pmf_table(spec, t, tol, variant=variant)
    if window is None:
        centre = int(round(table.mean()))
        window = (centre - 15, centre + 15)
        if spec.one_sided:
            window = (max(0, window[0]), window[1])
    ms = list(range(window[0], window[1] + 1))
    lhs = time_derivative(spec, t, dt, ms, tol, variant)
    rhs = np.array([governing_rhs(spec, table, m, truncation, ppok_index, variant) for m in ms])
    return float(np.max(np.abs(lhs - rhs)))


def initial_mass(spec, t=1e-8, variant="conv"):
    """P(X(t) = 0) at a tiny time; should be within 1e-6 of 1."""
    return pmf_table(spec, t, 1e-14, variant=variant).prob(0)


def mgf_ode_residual(spec, theta, t, h=None):
    """Relative gap between d/dt M(theta, t) and -M K(theta) for the SFSP MGF
    M = exp(-t K(theta)), K = l1^a1 (1 - e^theta)^a1 + l2^a2 (1 - e^-theta)^a2."""
    if spec.family != "sfsp":
        raise ValueError("MGF equation is stated for the SFSP")
    if h is None:
        h = 1e-4 * t
    z1 = (1 - cmath.exp(theta)) ** spec.alpha1 if theta != 0 else 0j
    z2 = (1 - cmath.exp(-theta)) ** spec.alpha2 if theta != 0 else 0j
    K = spec.l1**spec.alpha1 * z1 + spec.l2**spec.alpha2 * z2
    M = lambda s: mgf(spec, theta, s)  # noqa: E731
    d1 = (M(t + h) - M(t - h)) / (2 * h)
    d2 = (M(t + h / 2) - M(t - h / 2)) / h
    lhs = (4 * d2 - d1) / 3
    rhs = -M(t) * K
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)
