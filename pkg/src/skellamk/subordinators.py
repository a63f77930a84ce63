"""Driftless Levy subordinators: Bernstein exponents, exact increment
samplers and the Laplace-transform moment functional E[exp(-cD) D^n]."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SubordinatorSpec",
    "SamplerStats",
    "UnsupportedFamilyError",
    "PrecisionLossError",
    "laplace_exponent",
    "bernstein",
    "bernstein_taylor",
    "levy_moment_integrals",
    "sample_increment",
    "stable_unit",
    "subordinator_moments",
    "lt_moment_coefficients",
    "lt_derivative_moment",
    "lt_derivative_moment_mc",
]

FAMILIES = ("gamma", "tempered_stable", "inverse_gaussian", "stable")

# smallest positive double; gamma draws with tiny shape underflow below it
_TINY = np.nextafter(0.0, 1.0)


class UnsupportedFamilyError(ValueError):
    pass


class PrecisionLossError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SubordinatorSpec:
    """One of the four driftless subordinator families.

    gamma(p, alpha):            f(s) = p log(1 + s/alpha)
    tempered_stable(alpha, mu): f(s) = (s + mu)^alpha - mu^alpha
    inverse_gaussian(gamma, delta): f(s) = delta (sqrt(2 s + gamma^2) - gamma)
    stable(alpha):              f(s) = s^alpha
    """

    family: str
    alpha: float = 0.0
    p: float = 0.0
    mu: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        fam = self.family
        if fam == "gamma":
            ok = self.p > 0 and self.alpha > 0
        elif fam == "tempered_stable":
            ok = 0 < self.alpha < 1 and self.mu > 0
        elif fam == "inverse_gaussian":
            ok = self.gamma > 0 and self.delta > 0
        elif fam == "stable":
            ok = 0 < self.alpha < 1
        else:
            raise ValueError(f"unknown subordinator family {fam!r}")
        if not ok:
            raise ValueError(f"invalid parameters for {fam} subordinator: {self}")

    @classmethod
    def gamma_sub(cls, p, alpha):
        return cls("gamma", alpha=alpha, p=p)

    @classmethod
    def tempered_stable(cls, alpha, mu):
        return cls("tempered_stable", alpha=alpha, mu=mu)

    @classmethod
    def inverse_gaussian(cls, gamma, delta):
        return cls("inverse_gaussian", gamma=gamma, delta=delta)

    @classmethod
    def stable(cls, alpha):
        return cls("stable", alpha=alpha)

    def params(self):
        keys = {
            "gamma": ("p", "alpha"),
            "tempered_stable": ("alpha", "mu"),
            "inverse_gaussian": ("gamma", "delta"),
            "stable": ("alpha",),
        }[self.family]
        return {k: getattr(self, k) for k in keys}

    def to_dict(self):
        return {"family": self.family, **self.params()}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        return cls(d.pop("family"), **{k: float(v) for k, v in d.items()})

    @property
    def domain_lower(self):
        """Infimum of the real arguments where f stays finite (for Chernoff bounds)."""
        return {
            "gamma": -self.alpha,
            "tempered_stable": -self.mu,
            "inverse_gaussian": -0.5 * self.gamma**2,
            "stable": 0.0,
        }[self.family]


@dataclass
class SamplerStats:
    """Acceptance-rejection bookkeeping for the tempered stable sampler."""

    proposals: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposals if self.proposals else float("nan")


def bernstein(spec, z):
    """f(z) for real or complex z (principal branches)."""
    fam = spec.family
    cpx = isinstance(z, complex)
    log = cmath.log if cpx else math.log
    sqrt = cmath.sqrt if cpx else math.sqrt
    if fam == "gamma":
        return spec.p * log(1 + z / spec.alpha)
    if fam == "tempered_stable":
        return (z + spec.mu) ** spec.alpha - spec.mu**spec.alpha
    if fam == "inverse_gaussian":
        return spec.delta * (sqrt(2 * z + spec.gamma**2) - spec.gamma)
    return z**spec.alpha


def laplace_exponent(spec, s):
    """Bernstein function f(s) with E[exp(-s D(t))] = exp(-t f(s))."""
    if s < 0:
        raise ValueError(f"laplace_exponent requires s >= 0, got {s}")
    if s == 0:
        return 0.0
    return float(bernstein(spec, float(s)))


def bernstein_taylor(spec, s, n_max, scale=1.0):
    """b_j = (-1)^(j+1) f^(j)(s) / j! * scale^j for j = 0..n_max (b_0 = f(s)).

    Every b_j (j >= 1) is non-negative because f is a Bernstein function.
    ``scale`` is folded in before exponentiation to keep b_j finite.
    """
    b = np.empty(n_max + 1)
    b[0] = bernstein(spec, float(s))
    j = np.arange(1, n_max + 1, dtype=float)
    fam = spec.family
    if fam == "gamma":
        b[1:] = spec.p / j * np.exp(j * math.log(scale / (spec.alpha + s)))
        return b
    if fam == "tempered_stable":
        a, base = spec.alpha, s + spec.mu
    elif fam == "stable":
        a, base = spec.alpha, s
        if s <= 0:
            raise ValueError("stable derivatives need s > 0")
    else:  # inverse Gaussian: delta * sqrt(2) * (s + gamma^2/2)^(1/2)
        a, base = 0.5, s + 0.5 * spec.gamma**2
    coef = np.empty(n_max)
    c = 1.0
    for i in range(n_max):
        c *= (a - i) / (i + 1)
        coef[i] = c
    signs = np.where(np.arange(1, n_max + 1) % 2 == 1, 1.0, -1.0)
    pre = spec.delta * math.sqrt(2.0) if fam == "inverse_gaussian" else 1.0
    b[1:] = pre * signs * coef * base**a * np.exp(j * math.log(scale / base))
    return b


def levy_moment_integrals(spec, c, n_max):
    """I_n = int y^n e^{-c y} nu(dy) / n! = b_n(c) for n = 1..n_max."""
    return bernstein_taylor(spec, c, n_max)[1:]


def stable_unit(rng, alpha, size=None):
    """Draws of D_alpha(1), the unit-time stable subordinator with
    E[exp(-s D)] = exp(-s^alpha), from two uniforms."""
    u = rng.random(size)
    v = rng.random(size)
    # (0,1) open interval; rng.random can return exactly 0
    u = np.where(u == 0.0, 0.5, u)
    v = np.where(v == 0.0, 0.5, v)
    pu = np.pi * u
    num = np.sin(alpha * pu) * np.sin((1 - alpha) * pu) ** (1 / alpha - 1)
    den = np.sin(pu) ** (1 / alpha) * np.abs(np.log(v)) ** (1 / alpha - 1)
    return num / den


def sample_increment(spec, dt, rng, size=None, stats=None):
    """Exact draws of D(dt).  Returns a float when ``size`` is None."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = 1 if size is None else int(np.prod(size))
    fam = spec.family
    if fam == "stable":
        out = dt ** (1 / spec.alpha) * stable_unit(rng, spec.alpha, n)
    elif fam == "tempered_stable":
        out = _tempered_stable(spec, dt, rng, n, stats)
    elif fam == "gamma":
        shape = spec.p * dt
        out = rng.gamma(shape, 1.0 / spec.alpha, n)
    else:
        mean = spec.delta * dt / spec.gamma
        out = rng.wald(mean, (spec.delta * dt) ** 2, n)
    out = np.maximum(out, _TINY)
    if size is None:
        return float(out[0])
    return out.reshape(size)


def _tempered_stable(spec, dt, rng, n, stats):
    out = np.empty(n)
    todo = np.arange(n)
    scale = dt ** (1 / spec.alpha)
    while todo.size:
        cand = scale * stable_unit(rng, spec.alpha, todo.size)
        w = rng.random(todo.size)
        ok = w <= np.exp(-spec.mu * cand)
        if stats is not None:
            stats.proposals += todo.size
            stats.accepted += int(ok.sum())
        out[todo[ok]] = cand[ok]
        todo = todo[~ok]
    return out


def subordinator_moments(spec, t):
    """(E[D(t)], Var[D(t)]); the stable family has no finite moments."""
    fam = spec.family
    if fam == "stable":
        raise UnsupportedFamilyError("moments of the stable subordinator are infinite")
    if fam == "gamma":
        return spec.p * t / spec.alpha, spec.p * t / spec.alpha**2
    if fam == "tempered_stable":
        a, mu = spec.alpha, spec.mu
        return t * a * mu ** (a - 1), t * a * (1 - a) * mu ** (a - 2)
    return t * spec.delta / spec.gamma, t * spec.delta / spec.gamma**3


def lt_moment_coefficients(spec, c, t, n_max):
    """a_n = E[exp(-c D(t)) D(t)^n] / n! for n = 0..n_max.

    Uses exact Taylor-mode differentiation of exp(-t f(s)):
        a_{n+1} = t/(n+1) sum_{j=0}^{n} (j+1) b_{j+1} a_{n-j},
    with b_j the signed Taylor coefficients of f at c.  All terms are
    non-negative, so there is no cancellation.
    """
    if c <= 0 and spec.family == "stable":
        raise ValueError("c must be positive")
    b = bernstein_taylor(spec, c, max(n_max, 1))
    a = np.empty(n_max + 1)
    a[0] = math.exp(-t * b[0])
    w = np.arange(1, n_max + 1) * b[1 : n_max + 1]
    for n in range(n_max):
        a[n + 1] = t / (n + 1) * np.dot(w[: n + 1], a[n::-1])
    return a


def lt_derivative_moment(spec, c, n, t, method="exact"):
    """E[exp(-c D(t)) D(t)^n] = (-1)^n d^n/ds^n exp(-t f(s)) at s = c.

    method="exact" uses the Taylor recursion; method="richardson" uses
    nested central differences with three-level Richardson extrapolation
    and raises PrecisionLossError when its own error estimate exceeds
    1e-6 relative.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if n < 0 or n > 40:
        raise ValueError("n must be in 0..40")
    if spec.family == "stable" and n >= 1:
        raise UnsupportedFamilyError("stable subordinator has no finite moments")
    if n == 0:
        return math.exp(-t * laplace_exponent(spec, c))
    if method == "exact":
        a = lt_moment_coefficients(spec, c, t, n)
        return float(a[n] * math.factorial(n))
    if method == "richardson":
        return _richardson_derivative(spec, c, n, t)
    raise ValueError(f"unknown method {method!r}")


def _richardson_derivative(spec, c, n, t):
    lower = spec.domain_lower
    g = lambda s: math.exp(-t * float(bernstein(spec, s)))
    eps = np.finfo(float).eps
    h = max(1e-4, 1e-3 * c, 0.5 * eps ** (1.0 / (n + 6)) * max(1.0, c))
    # keep every stencil point inside the domain of f
    h = min(h, 0.9 * (c - lower) / (n / 2.0 + 1e-12))
    weights = [(-1) ** j * math.comb(n, j) for j in range(n + 1)]

    def central(hh):
        s = sum(w * g(c + (n / 2.0 - j) * hh) for j, w in enumerate(weights))
        return s / hh**n

    d = [central(h / 2**i) for i in range(3)]
    r1 = [(4 * d[i + 1] - d[i]) / 3 for i in range(2)]
    r2 = (16 * r1[1] - r1[0]) / 15
    err = abs(r2 - r1[1])
    val = (-1) ** n * r2
    if err > 1e-6 * max(abs(val), 1e-300):
        raise PrecisionLossError(
            f"Richardson estimate of order-{n} derivative lost precision "
            f"(error estimate {err:.2e}, value {val:.3e})"
        )
    return val


def lt_derivative_moment_mc(spec, c, n, t, rng, n_draws=1_000_000):
    """Monte Carlo estimate of E[exp(-c D(t)) D(t)^n] and its standard error."""
    d = sample_increment(spec, t, rng, size=n_draws)
    x = np.exp(-c * d) * d**n
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(n_draws))
