"""Witness constructions for the two- and three-term cosine bounds.

For two frequencies the witness angle is an odd multiple of ``pi / a2`` built
from a Bezout identity; for three it depends on how ``a3`` relates to
``a1 + a2``, ``2 a1`` and ``2 a2``.  Angles that are rational multiples of
``pi`` are reduced in exact integer arithmetic before any cosine is taken.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .minimizer import min_modulus
from .trigpoly import ExponentSet

__all__ = [
    "CaseTag",
    "Witness",
    "BezoutPair",
    "InvalidInput",
    "WitnessNotFound",
    "PreconditionViolated",
    "Verdict",
    "VarianceVerdict",
    "extended_gcd",
    "theorem2_witness",
    "classify_triple",
    "theorem3_witness",
    "cosine_sum_residual",
    "variance_lemma_check",
    "case2_grid_moments",
    "case3_grid_moments",
    "LAMBDA3_BOUND",
    "MU3_VALUE",
    "XI",
    "quartic_mu4_reference",
]

LAMBDA3_BOUND = (-17.0 - 7.0 * math.sqrt(7.0)) / 27.0
MU3_VALUE = math.sqrt((47.0 - 14.0 * math.sqrt(7.0)) / 27.0)
XI = math.acos(-0.25)
WITNESS_SLACK = 1e-12
CASE1_SLACK = 1e-9


class InvalidInput(ValueError):
    pass


class WitnessNotFound(RuntimeError):
    """A grid scan found no qualifying angle; this is a bug, not a counterexample."""


class PreconditionViolated(ValueError):
    pass


class CaseTag(str, enum.Enum):
    BOTH_ODD = "BothOdd"
    CASE1_ODD_EVEN = "Case1OddEven"
    CASE2_EVEN_ODD = "Case2EvenOdd"
    T3_CASE1 = "T3Case1"
    T3_CASE2 = "T3Case2"
    T3_CASE3 = "T3Case3"


@dataclass(frozen=True)
class Witness:
    """An angle where the cosine sum is at most ``bound``.

    When the angle is a rational multiple of pi, ``theta = numerator * pi /
    denominator``; scan-based witnesses also record the grid index they used.
    """

    case_tag: CaseTag
    theta: float
    value: float
    bound: float
    numerator: Optional[int] = None
    denominator: Optional[int] = None
    grid_index: Optional[int] = None

    def to_dict(self) -> dict:
        out = {"case": self.case_tag.value, "theta": self.theta,
               "value": self.value, "bound": self.bound}
        if self.numerator is not None:
            out["theta_over_pi"] = [self.numerator, self.denominator]
        if self.grid_index is not None:
            out["grid_index"] = self.grid_index
        return out


@dataclass(frozen=True)
class BezoutPair:
    s: int
    t: int


def extended_gcd(x: int, y: int):
    """Return ``(g, BezoutPair(s, t))`` with ``s*x + t*y == g == gcd(x, y)``.

    Iterative Euclid; for coprime ``0 < x < y`` this gives ``|s| < y`` and
    ``|t| <= x``, with the sign of ``s`` alternating with the number of steps.
    """
    if x < 1 or y < 1:
        raise InvalidInput(f"extended_gcd needs positive integers, got ({x}, {y})")
    r0, r1 = x, y
    s0, s1 = 1, 0
    t0, t1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, BezoutPair(s0, t0)


def _cos_pi(num: int, den: int) -> float:
    """``cos(num * pi / den)`` with ``num`` reduced modulo ``2 den`` first."""
    return math.cos((num % (2 * den)) * math.pi / den)


def _cos_sum_at(exponents: Sequence[int], num: int, den: int) -> float:
    return math.fsum(_cos_pi(a * num, den) for a in exponents)


def theorem2_witness(a1: int, a2: int) -> Witness:
    """Angle with ``cos(a1 t) + cos(a2 t) <= -3/2`` for coprime ``a1 < a2``, ``a2 >= 3``.

    The angle is always ``k * pi / a2`` with ``k`` odd, so ``cos(a2 t) = -1``.
    """
    if not (1 <= a1 < a2):
        raise InvalidInput(f"need 1 <= a1 < a2, got ({a1}, {a2})")
    if a2 < 3:
        raise InvalidInput(f"need a2 >= 3, got a2 = {a2}")
    if math.gcd(a1, a2) != 1:
        raise InvalidInput(f"({a1}, {a2}) are not coprime")

    if a1 % 2 and a2 % 2:
        # theta = pi, written as a2 * pi / a2 so every case sits on the same grid
        tag, k, den = CaseTag.BOTH_ODD, a2, a2
    elif a1 % 2:
        # a1*s + 2*a2*t = 1 forces s odd, and a2 - 1 is odd
        _, bz = extended_gcd(a1, 2 * a2)
        tag, k, den = CaseTag.CASE1_ODD_EVEN, (a2 - 1) * bz.s, a2
    else:
        # a1*s + a2*t = -1; shift s by a2 if needed to make it odd
        _, bz = extended_gcd(a1, a2)
        s = -bz.s
        tag, k, den = CaseTag.CASE2_EVEN_ODD, (s if s % 2 else s + a2), a2
    k %= 2 * den
    if k % 2 == 0:
        raise AssertionError(f"witness numerator {k} is even for ({a1}, {a2})")
    value = _cos_sum_at((a1, a2), k, den)
    return Witness(tag, k * math.pi / den, value, -1.5, numerator=k, denominator=den)


def classify_triple(a1: int, a2: int, a3: int) -> CaseTag:
    if not (1 <= a1 < a2 < a3):
        raise InvalidInput(f"need 1 <= a1 < a2 < a3, got ({a1}, {a2}, {a3})")
    if math.gcd(a1, a2, a3) != 1:
        raise InvalidInput(f"gcd({a1}, {a2}, {a3}) != 1")
    if a3 == a1 + a2:
        return CaseTag.T3_CASE1
    if a3 in (2 * a1, 2 * a2):
        return CaseTag.T3_CASE2
    return CaseTag.T3_CASE3


def _case2_pair(a1: int, a2: int, a3: int):
    """``(a, b)`` with ``{a, b, 2a} = {a1, a2, a3}``."""
    return (a1, a2) if a3 == 2 * a1 else (a2, a1)


def theorem3_witness(a1: int, a2: int, a3: int) -> Witness:
    """Angle with ``cos a1 t + cos a2 t + cos a3 t <= -(17 + 7 sqrt 7) / 27``."""
    tag = classify_triple(a1, a2, a3)
    exps = (a1, a2, a3)

    if tag is CaseTag.T3_CASE1:
        # 3 + 2 f(t) = |1 + z**a1 + z**(a1 + a2)|**2
        res = min_modulus(ExponentSet.newman((0, a1, a3)), 1e-10)
        t = res.theta_star
        value = math.fsum(math.cos(a * t) for a in exps)
        return Witness(tag, t, value, LAMBDA3_BOUND)

    if tag is CaseTag.T3_CASE2:
        a, b = _case2_pair(a1, a2, a3)
        if a == 2:
            num, den = (2, 3) if b == 1 else (1, 3)
            return Witness(tag, num * math.pi / den, _cos_sum_at(exps, num, den),
                           LAMBDA3_BOUND, numerator=num, denominator=den)
        # cos(a t_j) + cos(2a t_j) = -9/8 on t_j = (xi + 2 pi j) / a
        base = math.cos(XI) + math.cos(2 * XI)
        for j in range(a):
            y = math.cos(b * XI / a + 2 * math.pi * ((b * j) % a) / a)
            if y <= -0.5 + WITNESS_SLACK:
                t = math.fmod((XI + 2 * math.pi * j) / a, 2 * math.pi)
                return Witness(tag, t, base + y, -13 / 8, grid_index=j)
        raise WitnessNotFound(f"no grid point with cos(b t) <= -1/2 for ({a1}, {a2}, {a3})")

    for j in range(a3):
        num = 2 * j + 1
        y = _cos_pi(a1 * num, a3) + _cos_pi(a2 * num, a3)
        if y <= -0.5 + WITNESS_SLACK:
            value = y + _cos_pi(a3 * num, a3)
            return Witness(tag, num * math.pi / a3, value, -1.5,
                           numerator=num, denominator=a3, grid_index=j)
    raise WitnessNotFound(f"no odd grid point with y <= -1/2 for ({a1}, {a2}, {a3})")


def cosine_sum_residual(xi: float, k: int, m: int) -> float:
    """``sum_{j<k} cos(xi + 2 pi m j / k)``; zero unless ``k`` divides ``m``."""
    if k < 2:
        raise InvalidInput(f"k must be >= 2, got {k}")
    return math.fsum(math.cos(xi + 2 * math.pi * ((m * j) % k) / k) for j in range(k))


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class VarianceVerdict:
    verdict: Verdict
    min_value: float
    mean_square: float
    threshold: float = field(default=0.0)


def variance_lemma_check(y, M: float, K: float) -> VarianceVerdict:
    """Check: zero-sum ``y`` bounded by ``M`` with mean square ``>= K M`` dips to ``-K``."""
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    if n == 0:
        raise PreconditionViolated("y is empty")
    if not M > 0:
        raise PreconditionViolated(f"M must be positive, got {M}")
    if not K > 0:
        raise PreconditionViolated(f"K must be positive, got {K}")
    total = math.fsum(y.tolist())
    if abs(total) > 1e-9 * n:
        raise PreconditionViolated(f"sum of y is {total:.3g}, not zero")
    if (y > M).any():
        raise PreconditionViolated(f"max y = {y.max():.17g} exceeds M = {M}")
    if (y == M).all():
        raise PreconditionViolated("all y equal M")
    ms = math.fsum((y * y).tolist()) / n
    lo = float(y.min())
    if ms < K * M - WITNESS_SLACK:
        return VarianceVerdict(Verdict.NOT_APPLICABLE, lo, ms, K * M)
    ok = lo <= -K + WITNESS_SLACK
    return VarianceVerdict(Verdict.HOLDS if ok else Verdict.VIOLATED, lo, ms, K * M)


def case2_grid_values(a: int, b: int) -> np.ndarray:
    """``cos(b t_j)`` on ``t_j = (xi + 2 pi j) / a``, ``j = 0..a-1``."""
    j = np.arange(a)
    return np.cos(b * XI / a + 2 * np.pi * ((b * j) % a) / a)


def case2_grid_moments(a: int, b: int):
    """Mean and mean square of ``cos(b t_j)`` over the Case 2 grid."""
    if a <= 2:
        raise InvalidInput(f"need a > 2, got {a}")
    if b % a == 0 or (2 * b) % a == 0:
        raise InvalidInput(f"a = {a} divides b = {b} or 2b; not from a gcd-1 triple")
    y = case2_grid_values(a, b)
    return math.fsum(y.tolist()) / a, math.fsum((y * y).tolist()) / a


def case3_grid_values(a1: int, a2: int, a3: int) -> np.ndarray:
    num = 2 * np.arange(a3) + 1
    return (np.cos(((a1 * num) % (2 * a3)) * np.pi / a3)
            + np.cos(((a2 * num) % (2 * a3)) * np.pi / a3))


def case3_grid_moments(a1: int, a2: int, a3: int):
    """Mean and mean square of ``cos a1 t + cos a2 t`` over odd multiples of ``pi / a3``."""
    if classify_triple(a1, a2, a3) is not CaseTag.T3_CASE3:
        raise InvalidInput(f"({a1}, {a2}, {a3}) is not a Case 3 triple")
    y = case3_grid_values(a1, a2, a3)
    return math.fsum(y.tolist()) / a3, math.fsum((y * y).tolist()) / a3


def quartic_mu4_reference() -> float:
    """``min over [-1, 1] of sqrt(16x^4 + 8x^3 - 8x^2 - 2x + 2)`` via critical points."""
    quartic = np.polynomial.Polynomial([2, -2, -8, 8, 16])
    crit = quartic.deriv().roots()
    xs = [-1.0, 1.0] + [r.real for r in crit if abs(r.imag) < 1e-12 and -1 <= r.real <= 1]
    return math.sqrt(min(quartic(x) for x in xs))
