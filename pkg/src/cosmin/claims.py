"""Bulk verification suites run by ``cosmin verify``.

Each suite returns a list of ClaimRecord, one per checked instance.  The
randomized suites draw from ``numpy.random.default_rng([seed, suite_id])`` so
their inputs depend only on the seed, not on which other suites ran.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from .minimizer import ToleranceUnreachable, global_min, min_modulus, min_of_cubic_reference
from .trigpoly import ExponentSet, from_exponents
from .verifier import (
    LAMBDA3_BOUND,
    CaseTag,
    Verdict,
    cosine_sum_residual,
    theorem2_witness,
    theorem3_witness,
    variance_lemma_check,
)

__all__ = ["ClaimRecord", "CLAIMS", "run_claim"]


@dataclass(frozen=True)
class ClaimRecord:
    claim: str
    inputs: object
    witness: Optional[dict]
    passed: bool

    def to_dict(self) -> dict:
        return {"claim": self.claim, "inputs": self.inputs,
                "witness": self.witness, "pass": self.passed}


def lemma1(tol: float = 1e-10, **_) -> List[ClaimRecord]:
    res = global_min(from_exponents(ExponentSet.cosine((1, 2))), tol)
    ok = abs(res.value + 9 / 8) <= 1e-10 and abs(math.cos(res.theta_star) + 0.25) <= 1e-7
    return [ClaimRecord("lemma1", [1, 2], res.to_dict(), ok)]


def lemma2(tol: float = 1e-10, **_) -> List[ClaimRecord]:
    ref = min_of_cubic_reference()
    res = global_min(from_exponents(ExponentSet.cosine((1, 2, 3))), tol)
    c_star = (math.sqrt(7) - 1) / 6
    ok = abs(res.value - ref) <= 1e-10 and abs(math.cos(res.theta_star) - c_star) <= 1e-7
    return [ClaimRecord("lemma2", [1, 2, 3], dict(res.to_dict(), reference=ref), ok)]


def cosinesum(seed: int = 0, cases: int = 10_000, max_k: int = 500, **_) -> List[ClaimRecord]:
    """Random ``(xi, k, m)``: the sum vanishes when ``k`` does not divide ``m``
    and equals ``k cos(xi)`` when it does (one divisible case per ten)."""
    rng = np.random.default_rng([seed, 3])
    out = []
    for i in range(cases + cases // 10):
        k = int(rng.integers(2, max_k + 1))
        xi = float(rng.uniform(-10.0, 10.0))
        if i < cases:
            m = int(rng.integers(-50 * k, 50 * k))
            while m % k == 0:
                m = int(rng.integers(-50 * k, 50 * k))
            expected = 0.0
        else:
            m = k * int(rng.integers(-50, 51))
            expected = k * math.cos(xi)
        r = cosine_sum_residual(xi, k, m)
        out.append(ClaimRecord("cosinesum", {"xi": xi, "k": k, "m": m},
                               {"sum": r, "expected": expected},
                               abs(r - expected) <= k * 1e-12))
    return out


def variance(seed: int = 0, cases: int = 1000, max_len: int = 50, **_) -> List[ClaimRecord]:
    """Random zero-sum sequences, kept only when the mean-square condition holds."""
    rng = np.random.default_rng([seed, 4])
    out = []
    while len(out) < cases:
        n = int(rng.integers(2, max_len + 1))
        shape = rng.integers(3)
        if shape == 0:
            y = rng.normal(size=n)
        elif shape == 1:
            y = rng.uniform(-1, 1, size=n)
        else:
            y = -rng.exponential(size=n)
        y = y - y.mean()
        m_bound = float(y.max()) * (1.0 + float(rng.uniform(0, 0.5)))
        k = float(np.exp(rng.uniform(-4, 1)))
        ms = float(np.mean(y * y))
        if ms < k * m_bound:
            continue
        v = variance_lemma_check(y, m_bound, k)
        out.append(ClaimRecord("variance", {"y": y.tolist(), "M": m_bound, "K": k},
                               {"min": v.min_value, "mean_square": v.mean_square},
                               v.verdict is Verdict.HOLDS))
    return out


def thm2(max_a2: int = 100, **_) -> List[ClaimRecord]:
    out = []
    for a2 in range(3, max_a2 + 1):
        for a1 in range(1, a2):
            if math.gcd(a1, a2) != 1:
                continue
            w = theorem2_witness(a1, a2)
            on_grid = w.denominator == a2 and w.numerator % 2 == 1
            cos_top = math.cos((a2 * w.numerator % (2 * a2)) * math.pi / a2)
            ok = on_grid and abs(cos_top + 1) <= 1e-12 and w.value <= -1.5 + 1e-12
            out.append(ClaimRecord("thm2", [a1, a2], w.to_dict(), ok))
    return out


def thm3(max_a3: int = 60, **_) -> List[ClaimRecord]:
    out = []
    for a3 in range(3, max_a3 + 1):
        for a2 in range(2, a3):
            for a1 in range(1, a2):
                if math.gcd(a1, a2, a3) != 1:
                    continue
                w = theorem3_witness(a1, a2, a3)
                ok = w.value <= LAMBDA3_BOUND + 1e-9
                if w.case_tag is not CaseTag.T3_CASE1:
                    ok = ok and w.value <= w.bound + 1e-12
                out.append(ClaimRecord("thm3", [a1, a2, a3], w.to_dict(), ok))
    return out


def mu_sqrt_bound(seed: int = 0, cases: int = 200, max_len: int = 8,
                  max_exponent: int = 40, tol: float = 1e-9, **_) -> List[ClaimRecord]:
    rng = np.random.default_rng([seed, 7])
    out = []
    for _ in range(cases):
        n = int(rng.integers(1, max_len + 1))
        exps = sorted(int(a) for a in rng.choice(max_exponent + 1, size=n, replace=False))
        try:
            res = min_modulus(ExponentSet.newman(exps), tol)
        except ToleranceUnreachable as exc:
            out.append(ClaimRecord("mu-sqrt-bound", exps, {"error": str(exc)}, False))
            continue
        out.append(ClaimRecord("mu-sqrt-bound", exps, res.to_dict(),
                               res.value <= math.sqrt(n) + tol))
    return out


CLAIMS: Dict[str, Callable[..., List[ClaimRecord]]] = {
    "lemma1": lemma1,
    "lemma2": lemma2,
    "cosinesum": cosinesum,
    "variance": variance,
    "thm2": thm2,
    "thm3": thm3,
    "mu-sqrt-bound": mu_sqrt_bound,
}


def run_claim(name: str, **options) -> List[ClaimRecord]:
    return CLAIMS[name](**options)
