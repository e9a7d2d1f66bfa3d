"""Symmetric log-concave-tail distribution families.

A family is described through the tail function N(t) = -ln P(|X| >= t),
which is convex for shape exponents r >= 1.  Distributions are rescaled so
that the survival function equals e^-1 at t = 1; every downstream norm and
bound assumes that normalization.

Families:

* ``weibull``   -- survival exp(-t^r); already normalized, N(t) = t^r.
* ``gaussian``  -- alias for ``weibull`` with r = 2 (N(t) = t^2).
* ``exp-power`` -- density proportional to exp(-|x|^r); the tail is the
  regularized upper incomplete gamma Q(1/r, t^r), rescaled.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

WEIBULL = "weibull"
GAUSSIAN = "gaussian"
EXP_POWER = "exp-power"

_FAMILIES = (WEIBULL, GAUSSIAN, EXP_POWER)

#: survival level defining the normalization scale
_TARGET = math.exp(-1.0)


class InvalidShapeError(ValueError):
    """Shape exponent outside the log-concave-tail range r >= 1."""


@dataclass(frozen=True)
class TailDistribution:
    """A normalized symmetric distribution with log-concave tails."""

    family: str
    r: float
    scale: float
    normalized: bool = True

    # -- tail function -------------------------------------------------

    def survival(self, t):
        """P(|X| >= t) for t >= 0."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("survival is defined for t >= 0")
        if self.family == EXP_POWER:
            return special.gammaincc(1.0 / self.r, (t * self.scale) ** self.r)
        return np.exp(-(t ** self.r))

    def tail_N(self, t):
        """N(t) = -ln P(|X| >= t)."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("tail_N is defined for t >= 0")
        if self.family == EXP_POWER:
            with np.errstate(divide="ignore"):
                return -np.log(self.survival(t))
        return t ** self.r

    def tail_N_inv(self, b):
        """Inverse of the tail function: t with N(t) = b."""
        b = np.asarray(b, dtype=float)
        if self.family == EXP_POWER:
            u = special.gammainccinv(1.0 / self.r, np.exp(-b))
            return u ** (1.0 / self.r) / self.scale
        return b ** (1.0 / self.r)

    def tail_N_prime(self, t):
        """Derivative N'(t); nondecreasing by log-concavity."""
        t = np.asarray(t, dtype=float)
        if self.family == EXP_POWER:
            u = (t * self.scale) ** self.r
            log_f = (
                math.log(self.r * self.scale)
                - u
                - math.lgamma(1.0 / self.r)
            )
            a = 1.0 / self.r
            with np.errstate(divide="ignore"):
                log_q = np.log(special.gammaincc(a, u))
            # Q(a, u) ~ u^{a-1} e^{-u} / Gamma(a) once gammaincc underflows
            asym = (a - 1.0) * np.log(np.maximum(u, 1e-300)) - u - math.lgamma(a)
            log_q = np.where(np.isfinite(log_q), log_q, asym)
            return np.exp(log_f - log_q)
        return self.r * t ** (self.r - 1.0)

    def tail_N_prime_inv(self, v):
        """Inverse of N' on [1, inf); v must be >= N'(1)."""
        v = np.asarray(v, dtype=float)
        if self.linear_tail:
            raise ValueError("N' is constant for r = 1")
        if self.family == EXP_POWER:
            xs, dns, _ = _exp_power_prime_table(self)
            x = np.interp(v, dns, xs)
            return x
        # weibull: N'(t) = r t^(r-1)
        if self.r == 1.0:
            raise ValueError("N' is constant for r = 1")
        return (v / self.r) ** (1.0 / (self.r - 1.0))

    def tail_N_at_prime(self, v):
        """N evaluated where N' equals v, i.e. N(N'^{-1}(v)).

        Single table interpolation for exp-power tails, which keeps the
        allocator's bisection off the slow incomplete-gamma path.
        """
        v = np.asarray(v, dtype=float)
        if self.linear_tail:
            raise ValueError("N' is constant for r = 1")
        if self.family == EXP_POWER:
            xs, dns, ns = _exp_power_prime_table(self)
            return np.interp(v, dns, ns)
        return (v / self.r) ** (self.r / (self.r - 1.0))

    @property
    def linear_tail(self):
        """True when N is asymptotically linear (r = 1 families)."""
        return self.r == 1.0

    def hat_N(self, t):
        """Quadratic truncation: t^2 on [-1, 1], N(|t|) outside."""
        t = np.abs(np.asarray(t, dtype=float))
        return np.where(t <= 1.0, t * t, self.tail_N(np.maximum(t, 1.0)))

    # -- density of |X| ------------------------------------------------

    def abs_density(self, t):
        """Density of |X| at t > 0."""
        t = np.asarray(t, dtype=float)
        if self.family == EXP_POWER:
            u = (t * self.scale) ** self.r
            return (
                self.r
                * self.scale
                * np.exp(-u - math.lgamma(1.0 / self.r))
            )
        return self.r * t ** (self.r - 1.0) * np.exp(-(t ** self.r))

    def log_abs_density(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == EXP_POWER:
            u = (t * self.scale) ** self.r
            return (
                math.log(self.r * self.scale) - u - math.lgamma(1.0 / self.r)
            )
        with np.errstate(divide="ignore"):
            return (
                math.log(self.r)
                + (self.r - 1.0) * np.log(t)
                - t ** self.r
            )

    # -- sampling and moments ------------------------------------------

    def sample(self, rng, count):
        """Inverse-survival-transform draws, sign-symmetrized."""
        if count < 0:
            raise ValueError("count must be >= 0")
        if count == 0:
            return np.empty(0)
        u = rng.uniform(size=count)
        if self.family == EXP_POWER:
            mag = special.gammainccinv(1.0 / self.r, u) ** (1.0 / self.r)
            mag /= self.scale
        else:
            mag = (-np.log(u)) ** (1.0 / self.r)
        signs = rng.integers(0, 2, size=count) * 2 - 1
        return signs * mag

    def raw_moment(self, k):
        """E X^k by quadrature; odd moments are 0 by symmetry."""
        if k % 2 == 1:
            return 0.0
        val, _ = integrate.quad(
            lambda t: k * t ** (k - 1) * float(self.survival(t)),
            0.0,
            np.inf,
            epsrel=1e-9,
            limit=200,
        )
        return val

    @functools.cached_property
    def variance(self):
        return self.raw_moment(2)

    @property
    def unit_variance_scale(self):
        """Divide draws by this to get a unit-variance view."""
        return math.sqrt(self.variance)


@functools.lru_cache(maxsize=64)
def _exp_power_prime_table(d):
    """Monotone table of (x, N'(x), N(x)) on [1, x_hi] for interpolation."""
    x_hi = float(d.tail_N_inv(512.0))
    xs = np.geomspace(1.0, x_hi, 1 << 16)
    dns = np.asarray(d.tail_N_prime(xs))
    ns = np.asarray(d.tail_N(xs))
    return xs, dns, ns


def make_distribution(family, r=None):
    """Build a normalized distribution of the given family and shape."""
    if family == GAUSSIAN:
        r = 2.0 if r is None else float(r)
        if r != 2.0:
            raise InvalidShapeError("gaussian family is the r = 2 member")
        return TailDistribution(GAUSSIAN, 2.0, 1.0)
    if r is None:
        raise InvalidShapeError("shape exponent r is required")
    r = float(r)
    if r < 1.0:
        raise InvalidShapeError(f"shape exponent r = {r} < 1 breaks tail convexity")
    if family == WEIBULL:
        return TailDistribution(WEIBULL, r, 1.0)
    if family == EXP_POWER:
        raw_survival = lambda s: special.gammaincc(1.0 / r, s ** r) - _TARGET
        scale = optimize.brentq(raw_survival, 1e-8, 16.0, xtol=1e-14, rtol=8.9e-16)
        d = TailDistribution(EXP_POWER, r, scale)
        assert abs(float(d.survival(1.0)) - _TARGET) < 1e-10
        return d
    raise ValueError(f"unknown family {family!r}; expected one of {_FAMILIES}")


# Operation-style wrappers used across the package and in tests.

def tail_N(d, t):
    return d.tail_N(t)


def hat_N(d, t):
    return d.hat_N(t)


def sample(d, rng, count):
    return d.sample(rng, count)


def raw_moment(d, k):
    return d.raw_moment(k)
