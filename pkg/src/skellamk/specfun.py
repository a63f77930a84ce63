"""Special functions: log-gamma, reciprocal gamma, integer-order Bessel I,
generalized binomial coefficients and the Fox-Wright 1psi1 series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SeriesResult",
    "NonConvergenceError",
    "log_gamma",
    "recip_gamma",
    "bessel_i",
    "gen_binomial",
    "signed_binomial_table",
    "fox_wright_1psi1",
    "KahanSum",
]

MAX_TERMS = 1_000_000


class NonConvergenceError(ArithmeticError):
    """A series failed to meet its stopping rule within the term budget."""

    def __init__(self, message, terms_used=0, last_term=float("nan")):
        super().__init__(f"{message} (terms used={terms_used}, last term={last_term:.3e})")
        self.terms_used = terms_used
        self.last_term = last_term


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    truncation_bound: float
    converged: bool = True

    def __float__(self):
        return float(self.value)


class KahanSum:
    """Compensated (Neumaier) running sum."""

    __slots__ = ("total", "comp")

    def __init__(self):
        self.total = 0.0
        self.comp = 0.0

    def add(self, x):
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    @property
    def value(self):
        return self.total + self.comp


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _is_nonpositive_integer(x):
    return x <= 0 and float(x).is_integer()


def recip_gamma(x):
    """1/Gamma(x), entire; exactly 0 at the poles 0, -1, -2, ..."""
    if _is_nonpositive_integer(x):
        return 0.0
    if x > 171.0:
        return math.exp(-math.lgamma(x))
    if x < 0:
        # reflection keeps precision for large negative arguments
        s = math.sin(math.pi * x)
        return s * math.gamma(1.0 - x) / math.pi
    return 1.0 / math.gamma(x)


def bessel_i(n, z, tol=1e-16, log_scale=0.0):
    """Modified Bessel function I_n(z) of integer order by its power series.

    ``log_scale`` multiplies the result by exp(-log_scale) inside the
    summation so callers can fold in an exponential prefactor without
    overflowing intermediate terms.
    """
    if n < 0 or int(n) != n:
        raise ValueError("order must be a non-negative integer")
    if z < 0:
        raise ValueError("argument must be non-negative")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = int(n)
    if z == 0:
        return SeriesResult(1.0 if n == 0 else 0.0, 1, 0.0)
    h = 0.5 * z
    log_t0 = n * math.log(h) - math.lgamma(n + 1) - log_scale
    if log_t0 > 709.0:
        raise OverflowError(f"I_{n}({z}) leading term exceeds float range")
    term = math.exp(log_t0)
    h2 = h * h
    acc = KahanSum()
    acc.add(term)
    k = 0
    while True:
        ratio = h2 / ((k + 1) * (k + n + 1))
        nxt = term * ratio
        if not math.isfinite(nxt):
            raise OverflowError(f"I_{n}({z}) series terms exceed float range")
        k += 1
        if ratio < 1.0:
            # remaining terms are dominated by a geometric series in `ratio`
            bound = nxt / (1.0 - ratio)
            if bound < tol * max(acc.value, 1e-300) or nxt == 0.0:
                acc.add(nxt)
                return SeriesResult(acc.value, k + 1, bound)
        acc.add(nxt)
        term = nxt
        if k > MAX_TERMS:
            raise NonConvergenceError("bessel_i", k, term)


def gen_binomial(alpha, n):
    """Generalized binomial coefficient alpha (alpha-1) ... (alpha-n+1) / n!."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    out = 1.0
    for j in range(int(n)):
        out *= (alpha - j) / (j + 1)
    return out


def signed_binomial_table(betas, n_max):
    """Matrix C[r, j] = (-1)^j binom(betas[r], j) for j = 0..n_max.

    Built by the stable recursion C[j] = C[j-1] (j - 1 - beta) / j, which is
    the coefficient of u^j in (1 - u)^beta.
    """
    betas = np.asarray(betas, dtype=float)
    j = np.arange(1, n_max + 1, dtype=float)
    factors = (j[None, :] - 1.0 - betas[:, None]) / j[None, :]
    out = np.ones((betas.size, n_max + 1))
    out[:, 1:] = np.cumprod(factors, axis=1)
    return out


def fox_wright_1psi1(a, A, b, B, z, tol=1e-15):
    """Fox-Wright function sum_r Gamma(a + A r) / Gamma(b + B r) z^r / r!.

    Only the regime used by the fractional Poisson PMFs is supported:
    0 < A <= 1, B > 0 and z <= 0.  Terms whose denominator sits on a pole
    of Gamma contribute exactly zero.
    """
    if not (0 < A <= 1) or B <= 0:
        raise ValueError("require 0 < A <= 1 and B > 0")
    if z > 0:
        raise ValueError("require z <= 0")
    if tol <= 0:
        raise ValueError("tol must be positive")

    def coeff(r):
        num_arg = a + A * r
        if _is_nonpositive_integer(num_arg):
            raise ValueError(f"Gamma({num_arg}) pole in numerator")
        rg = recip_gamma(b + B * r)
        if rg == 0.0:
            return 0.0
        g = math.gamma(num_arg) if num_arg < 171 else math.exp(math.lgamma(num_arg))
        return g * rg

    if z == 0:
        return SeriesResult(coeff(0), 1, 0.0)

    acc = KahanSum()
    log_absz = math.log(-z)
    prev_mag = None
    r = 0
    while r <= MAX_TERMS:
        c = coeff(r)
        if c != 0.0:
            log_mag = r * log_absz - math.lgamma(r + 1)
            if log_mag + math.log(abs(c)) > 700:
                raise NonConvergenceError("fox_wright_1psi1 terms leave the floating range", r, math.inf)
            mag = abs(c) * math.exp(log_mag)
            sign = -1.0 if (r % 2 == 1) ^ (c < 0) else 1.0
            acc.add(sign * mag)
            regular = (b + B * r) > 1 and (a + A * r) > 1
            if regular and prev_mag is not None and r > -z:
                # past the peak: next terms shrink at least geometrically
                c1 = coeff(r + 1)
                nxt = abs(c1) * math.exp(log_mag + log_absz - math.log(r + 1))
                ratio = nxt / mag if mag > 0 else 0.0
                if ratio < 1.0:
                    bound = nxt / (1.0 - ratio)
                    if bound < tol * max(1.0, abs(acc.value)):
                        return SeriesResult(acc.value, r + 1, bound)
            prev_mag = mag
        r += 1
    raise NonConvergenceError("fox_wright_1psi1", r, prev_mag or 0.0)
