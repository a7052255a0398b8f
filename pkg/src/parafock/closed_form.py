"""Analytic results for the linear birth-death process with carrying capacity.

The linear model factorises into ``p`` independent two-state bins. Per bin
the resummed propagator sums over a horizon T are the four interval factors

    I01 = (beta/gamma) (e^{beta T} - e^{-mu T})      empty  -> occupied
    I10 = (mu/gamma)   (e^{beta T} - e^{-mu T})      occupied -> empty
    I00 = (mu/gamma) e^{beta T} + (beta/gamma) e^{-mu T}
    I11 = (beta/gamma) e^{beta T} + (mu/gamma) e^{-mu T}

(``gamma = beta + mu``), each carrying an overall e^{beta T} that the prefactor
``e^{-p beta T}`` removes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConsistencyError, DegenerateRateError, DomainError, ParameterError
from .fock import falling_factorial

Z00_TOL = 1e-10


@dataclass(frozen=True)
class IntervalFactors:
    I00: float
    I01: float
    I10: float
    I11: float
    beta: float
    mu: float
    T: float

    @property
    def gamma(self):
        return self.beta + self.mu

    @property
    def nu(self):
        return self.mu - self.beta


def linear_mean(p, beta, mu, n0, T, allow_degenerate=False):
    """<n>(T) = (beta p / gamma)(1 - e^{-gamma T}) + n0 e^{-gamma T}."""
    gamma = beta + mu
    if gamma == 0:
        if allow_degenerate:
            return float(n0)
        raise DegenerateRateError("linear mean undefined for beta + mu = 0")
    decay = math.exp(-gamma * T)
    return beta * p / gamma * (1.0 - decay) + n0 * decay


def interval_factors(beta, mu, T):
    gamma = beta + mu
    if gamma == 0:
        raise DegenerateRateError("interval factors undefined for beta + mu = 0")
    grow = math.exp(beta * T)
    decay = math.exp(-mu * T)
    # -expm1 keeps the difference accurate at small T
    gap = grow * -math.expm1(-gamma * T)
    return IntervalFactors(
        I00=mu / gamma * grow + beta / gamma * decay,
        I01=beta / gamma * gap,
        I10=mu / gamma * gap,
        I11=beta / gamma * grow + mu / gamma * decay,
        beta=beta,
        mu=mu,
        T=T,
    )


def _hypergeometric_sum(p, n0, r, f, power):
    total = 0.0
    for a in range(p - n0 + 1):
        for b in range(n0 + 1):
            weight = power(a + b, r)
            if weight == 0:
                continue
            total += (
                weight
                * math.comb(p - n0, a)
                * math.comb(n0, b)
                * f.I01**a
                * f.I00 ** (p - n0 - a)
                * f.I11**b
                * f.I10 ** (n0 - b)
            )
    return total


def linear_factorial_moment(p, n0, r, beta, mu, T, weight="falling"):
    """<(n)_r>(T) from the hypergeometric double sum over interval factors.

    ``weight="falling"`` uses (a+b)_r (the factorial moment). ``weight="power"``
    uses the literal (a+b)^r, kept for comparison; it equals the raw moment
    <n^r>, not <(n)_r>, once r >= 2. The normalisation Z(0,0) is taken from the
    r = 0 sum and must equal 1.
    """
    if not 0 <= n0 <= p:
        raise ParameterError(f"initial occupancy {n0} outside 0..{p}")
    if r < 0:
        raise ParameterError("moment order must be >= 0")
    if weight == "falling":
        power = falling_factorial
    elif weight == "power":
        power = lambda m, k: m**k  # noqa: E731
    else:
        raise ParameterError(f"unknown weight {weight!r}")
    f = interval_factors(beta, mu, T)
    prefactor = math.exp(-p * beta * T)
    z00 = 1.0 / (prefactor * _hypergeometric_sum(p, n0, 0, f, falling_factorial))
    if abs(z00 - 1.0) > Z00_TOL:
        raise ConsistencyError(f"normalisation Z(0,0) = {z00!r} is not 1")
    return z00 * prefactor * _hypergeometric_sum(p, n0, r, f, power)


def laplace_I01_series(s, beta, mu, k_max):
    """Partial sum (1/mu) sum_{k=1}^{k_max} (beta mu)^k / (s^k (s + mu - beta)^k).

    Converges to beta / ((s - beta)(s + mu)) for s > max(beta, 0).
    """
    if not s > max(beta, 0.0):
        raise DomainError(f"series diverges for s={s} (need s > max(beta, 0) = {max(beta, 0.0)})")
    base = s * (s + mu - beta)
    total = 0.0
    for k in range(1, k_max + 1):
        total += beta**k * mu ** (k - 1) / base**k
    return total


def laplace_I01(s, beta, mu):
    return beta / ((s - beta) * (s + mu))
