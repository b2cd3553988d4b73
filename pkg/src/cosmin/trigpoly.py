"""Exponent sets, integer-frequency cosine polynomials and their evaluation.

A cosine polynomial here is ``constant + sum_m c_m cos(m theta)`` with integer
harmonics ``m >= 1`` and integer coefficients ``c_m``.  Plain cosine sums
(all coefficients 1) and the autocorrelation of a Newman polynomial,
``|sum_j z**a_j|**2`` on ``|z| = 1``, are both of this form.
"""

from __future__ import annotations

import enum
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "Kind",
    "ExponentSet",
    "CosinePoly",
    "CanonicalForm",
    "eval_cosine",
    "eval_derivatives",
    "from_exponents",
    "autocorrelate",
    "canonicalize",
    "cos_sin_multiple",
]

Number = Union[int, Fraction]


class Kind(str, enum.Enum):
    COSINE = "cosine"
    NEWMAN = "newman"


@dataclass(frozen=True)
class ExponentSet:
    """Strictly increasing integer frequencies of a cosine or Newman polynomial."""

    exponents: tuple
    kind: Kind = Kind.COSINE

    def __post_init__(self):
        exps = tuple(int(a) for a in self.exponents)
        kind = Kind(self.kind)
        if not exps:
            raise ValueError("an exponent set needs at least one exponent")
        for lo, hi in zip(exps, exps[1:]):
            if hi <= lo:
                if hi == lo:
                    raise ValueError(f"duplicate exponent {hi}")
                raise ValueError(f"exponents must be strictly increasing, got {exps}")
        floor = 1 if kind is Kind.COSINE else 0
        if exps[0] < floor:
            raise ValueError(
                f"{kind.value} exponents must be >= {floor}, got {exps[0]}"
            )
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "kind", kind)

    @classmethod
    def cosine(cls, exponents: Iterable[int]) -> "ExponentSet":
        return cls(tuple(exponents), Kind.COSINE)

    @classmethod
    def newman(cls, exponents: Iterable[int]) -> "ExponentSet":
        return cls(tuple(exponents), Kind.NEWMAN)

    def __len__(self) -> int:
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def scaled(self, d: int) -> "ExponentSet":
        return ExponentSet(tuple(d * a for a in self.exponents), self.kind)

    def to_json(self) -> str:
        return json.dumps(list(self.exponents))

    @classmethod
    def from_json(cls, text: str, kind: Kind = Kind.COSINE) -> "ExponentSet":
        data = json.loads(text)
        if not isinstance(data, list) or not all(
            isinstance(a, int) and not isinstance(a, bool) for a in data
        ):
            raise ValueError("exponent sets serialize as a JSON array of integers")
        return cls(tuple(data), kind)


@dataclass(frozen=True, eq=False)
class CosinePoly:
    """``constant + sum_m terms[m] * cos(m theta)``.

    Coefficients are exact integers and the constant an exact rational; zero
    coefficients are dropped on construction.
    """

    terms: Mapping[int, int]
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        clean = {}
        for m, c in sorted(self.terms.items()):
            m, c = int(m), int(c)
            if m < 1:
                raise ValueError(f"harmonics must be >= 1, got {m}")
            if c != 0:
                clean[m] = c
        object.__setattr__(self, "terms", MappingProxyType(clean))
        object.__setattr__(self, "constant", Fraction(self.constant))

    def __eq__(self, other):
        if not isinstance(other, CosinePoly):
            return NotImplemented
        return self.constant == other.constant and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.constant, tuple(self.terms.items())))

    def __repr__(self):
        return f"CosinePoly(constant={self.constant}, terms={dict(self.terms)})"

    @cached_property
    def harmonics(self) -> np.ndarray:
        return np.fromiter(self.terms.keys(), dtype=np.int64, count=len(self.terms))

    @cached_property
    def coefficients(self) -> np.ndarray:
        return np.fromiter(self.terms.values(), dtype=np.float64, count=len(self.terms))

    @property
    def max_harmonic(self) -> int:
        return max(self.terms) if self.terms else 0

    @property
    def abs_coefficient_sum(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    def to_dict(self) -> dict:
        const = self.constant
        number = const.numerator if const.denominator == 1 else float(const)
        return {"constant": number, "terms": {str(m): c for m, c in self.terms.items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "CosinePoly":
        const = data.get("constant", 0)
        const = Fraction(const) if isinstance(const, int) else Fraction(str(const))
        return cls({int(m): int(c) for m, c in data.get("terms", {}).items()}, const)

    @classmethod
    def from_json(cls, text: str) -> "CosinePoly":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CanonicalForm:
    set: ExponentSet
    divisor: int = 1
    shift: int = 0


_SPLITTER = 134217729.0  # 2**27 + 1


def _split(x):
    t = _SPLITTER * x
    hi = t - (t - x)
    return hi, x - hi


def cos_sin_multiple(harmonics, theta):
    """Return ``cos(m*theta), sin(m*theta)`` on the grid ``theta[:, None] * m``.

    The product ``m * theta`` is formed with an error-free transformation
    (Dekker two-product) so the rounding of the argument does not grow with
    ``m``; the low-order part is folded in to first order.
    """
    m = np.asarray(harmonics, dtype=np.float64)
    th = np.asarray(theta, dtype=np.float64)
    a = th[..., None]
    p = a * m
    ah, al = _split(a)
    mh, ml = _split(m)
    e = ((ah * mh - p) + ah * ml + al * mh) + al * ml
    c, s = np.cos(p), np.sin(p)
    return c - e * s, s + e * c


def eval_cosine(p: CosinePoly, theta):
    """Evaluate ``p`` at ``theta`` (scalar or array, radians)."""
    const = float(p.constant)
    if np.ndim(theta) == 0:
        if not p.terms:
            return const
        c, _ = cos_sin_multiple(p.harmonics, float(theta))
        return math.fsum([const, *(p.coefficients * c).tolist()])
    th = np.asarray(theta, dtype=np.float64)
    if not p.terms:
        return np.full(th.shape, const)
    c, _ = cos_sin_multiple(p.harmonics, th)
    return const + c @ p.coefficients


def eval_derivatives(p: CosinePoly, theta):
    """Return ``(f, f', f'')`` of ``p`` at ``theta``."""
    const = float(p.constant)
    th = np.asarray(theta, dtype=np.float64)
    if not p.terms:
        zero = np.zeros(th.shape) if th.ndim else 0.0
        return (zero + const, zero, zero)
    m = p.harmonics.astype(np.float64)
    c, s = cos_sin_multiple(p.harmonics, th)
    w = p.coefficients
    f = const + c @ w
    d1 = -(s @ (w * m))
    d2 = -(c @ (w * m * m))
    if th.ndim == 0:
        return float(f), float(d1), float(d2)
    return f, d1, d2


def from_exponents(s: ExponentSet) -> CosinePoly:
    if s.kind is not Kind.COSINE:
        raise ValueError("from_exponents expects a cosine exponent set")
    return CosinePoly({a: 1 for a in s.exponents})


def autocorrelate(s: ExponentSet) -> CosinePoly:
    """Expand ``|sum_j z**a_j|**2`` on the unit circle as a cosine polynomial.

    The constant is ``n``; harmonic ``m`` carries ``2 * #{j < k: a_k - a_j = m}``.
    """
    if s.kind is not Kind.NEWMAN:
        raise ValueError("autocorrelate expects a Newman exponent set")
    exps = s.exponents
    diffs = Counter(b - a for i, a in enumerate(exps) for b in exps[i + 1:])
    return CosinePoly({m: 2 * c for m, c in diffs.items()}, Fraction(len(exps)))


def canonicalize(s: ExponentSet) -> CanonicalForm:
    """Reduce ``s`` to the representative with the same value set.

    Cosine sets are divided by the gcd of their exponents.  Newman sets are
    translated to start at 0, then divided by the gcd of the nonzero exponents.
    """
    exps = s.exponents
    if s.kind is Kind.COSINE:
        g = math.gcd(*exps)
        return CanonicalForm(ExponentSet(tuple(a // g for a in exps), s.kind), g, 0)
    shift = exps[0]
    moved = [a - shift for a in exps]
    g = math.gcd(*moved) or 1
    return CanonicalForm(ExponentSet(tuple(a // g for a in moved), s.kind), g, shift)


def is_canonical(s: ExponentSet) -> bool:
    form = canonicalize(s)
    return form.divisor == 1 and form.shift == 0


