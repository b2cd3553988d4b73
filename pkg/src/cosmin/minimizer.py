"""Certified global minimization of cosine polynomials over one period.

Because ``f(-theta) = f(theta)`` the search runs over ``[0, pi]``.  A uniform
sample (computed in one DCT-I) locates the local minima, each is polished by
safeguarded Newton on ``f'``, and a branch-and-bound pass over the grid cells
certifies that no point of the period lies more than ``tol`` below the
reported value.  A cell ``[a, b]`` of width ``h`` is bounded below by
``min(f(a), f(b)) - max(0, sup f'') * h**2 / 8``, with ``sup f''`` taken as the
smaller of ``sum |c_m| m**2`` and ``max(f''(a), f''(b)) + sum |c_m| m**3 * h / 2``.
Cells whose bound cannot beat the incumbent are dropped; the rest are halved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.fft

from .trigpoly import (
    CosinePoly,
    ExponentSet,
    Kind,
    autocorrelate,
    cos_sin_multiple,
)

__all__ = [
    "MinResult",
    "ToleranceUnreachable",
    "global_min",
    "min_modulus",
    "newman_modulus",
    "min_of_cubic_reference",
    "DEFAULT_TOL",
    "SEARCH_TOL",
]

DEFAULT_TOL = 1e-9
SEARCH_TOL = 1e-7
GRID_FACTOR = 64
MIN_GRID = 256
MAX_SAMPLES = 2**26
MAX_OPEN_CELLS = 2**21
NEWTON_ITERS = 60
_EPS = np.finfo(float).eps


class ToleranceUnreachable(ArithmeticError):
    """The sample budget ran out before the error radius met the tolerance."""


@dataclass(frozen=True)
class MinResult:
    """Global minimum of a cosine polynomial (or a Newman modulus).

    The true minimum lies in ``[value - error_radius, value]``.  ``grid_size``
    is the number of cells a uniform grid over ``[0, pi]`` would need to
    match the finest resolution used during certification.
    """

    theta_star: float
    value: float
    error_radius: float
    grid_size: int
    refined: bool

    def to_dict(self) -> dict:
        return {
            "theta": self.theta_star,
            "value": self.value,
            "error_radius": self.error_radius,
            "grid_size": self.grid_size,
            "refined": self.refined,
        }


def _fold(theta):
    """Map angles onto ``[0, pi]`` using evenness and 2*pi periodicity."""
    t = np.remainder(theta, 2 * math.pi)
    return np.where(t > math.pi, 2 * math.pi - t, t)


class _Problem:
    """Array view of a CosinePoly with the derived constants the search needs."""

    def __init__(self, p: CosinePoly):
        self.const = float(p.constant)
        self.m = p.harmonics
        self.mf = self.m.astype(np.float64)
        self.w = p.coefficients
        self.wm = self.w * self.mf
        self.wm2 = self.wm * self.mf
        absw = np.abs(self.w)
        self.k2 = float(absw @ self.mf**2)
        self.k3 = float(absw @ self.mf**3)
        self.m_max = int(self.m.max())
        # Rounding of one evaluation: each cos(m theta) is within a couple of
        # ulps (the argument is formed exactly to first order) and any
        # summation order of k terms errs by at most (k - 1) eps sum|terms|.
        # The log2 term covers the FFT-based grid.  Doubled for margin.
        scale = float(absw.sum()) + abs(self.const)
        self.slack = 2 * _EPS * scale * (self.m.size + 4 + math.log2(MAX_SAMPLES))

    def f_f2(self, theta):
        c, _ = cos_sin_multiple(self.m, theta)
        return self.const + c @ self.w, -(c @ self.wm2)

    def all3(self, theta):
        c, s = cos_sin_multiple(self.m, theta)
        return self.const + c @ self.w, -(s @ self.wm), -(c @ self.wm2)

    def grid(self, n_cells):
        x = np.zeros(n_cells + 1)
        x[0] = self.const
        x[self.m] = 0.5 * self.w
        f = scipy.fft.dct(x, type=1)
        x[0] = 0.0
        x[self.m] = -0.5 * self.wm2
        f2 = scipy.fft.dct(x, type=1)
        return f, f2


def _newton(prob: _Problem, lo, hi):
    """Safeguarded Newton on ``f'`` inside brackets with ``f'(lo) <= 0 <= f'(hi)``.

    Returns the polished points and a mask of brackets that converged.
    """
    x = 0.5 * (lo + hi)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(NEWTON_ITERS):
        _, d1, d2 = prob.all3(x)
        left = d1 < 0
        lo = np.where(left, x, lo)
        hi = np.where(left, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = -d1 / d2
        xn = x + step
        bad = ~((d2 > 0) & (xn > lo) & (xn < hi))
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        thr = np.maximum(1e-15, 2 * _EPS * np.abs(x))
        done = (np.abs(d1) < 1e-13) | ((d2 > 0) & (np.abs(step) < thr))
        xn = np.where(done, x, xn)
        done |= np.abs(xn - x) < thr
        x = np.where(active, xn, x)
        active &= ~done
        if not active.any():
            break
    return x, ~active


def _polish(prob: _Problem, lo, hi):
    """Newton-polish the brackets that straddle a root of ``f'``.

    Returns ``(theta, value)`` arrays for the brackets where it converged.
    """
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    _, d_lo, _ = prob.all3(lo)
    _, d_hi, _ = prob.all3(hi)
    ok = (d_lo <= 0) & (d_hi >= 0)
    if not ok.any():
        return np.empty(0), np.empty(0)
    x, conv = _newton(prob, lo[ok], hi[ok])
    x = x[conv]
    if x.size == 0:
        return x, x
    f, _ = prob.f_f2(x)
    return _fold(x), f


def _pick(thetas, values):
    """Smallest value; among values equal to it, the smallest angle."""
    best = values.min()
    tie = values <= best + 1e-12 * max(1.0, abs(best))
    idx = np.flatnonzero(tie)
    j = idx[np.argmin(thetas[idx])]
    return float(thetas[j]), float(values[j])


def _certified_min(
    p: CosinePoly,
    tol_at: Callable[[float, float], float],
    grid_factor: int = GRID_FACTOR,
    max_samples: int = MAX_SAMPLES,
    clamp: bool = False,
) -> MinResult:
    """Shared driver; ``tol_at(upper, theta)`` gives the tolerance in force.

    With ``clamp`` a tolerance below the rounding floor is raised to the
    floor instead of failing, and the caller judges the resulting radius.
    """
    if not p.terms:
        return MinResult(0.0, float(p.constant), 0.0, 1, False)
    prob = _Problem(p)
    n = max(MIN_GRID, grid_factor * prob.m_max)
    if n + 1 > max_samples:
        raise ToleranceUnreachable(
            f"initial grid of {n + 1} samples exceeds the cap of {max_samples}"
        )
    h = math.pi / n
    f, f2 = prob.grid(n)
    evals = n + 1

    # local minima of the sampled function, mirrored across 0 and pi
    ext = np.concatenate(([f[1]], f, [f[-2]]))
    is_min = (ext[1:-1] <= ext[:-2]) & (ext[1:-1] <= ext[2:])
    idx = np.flatnonzero(is_min)
    th_ref, f_ref = _polish(prob, (idx - 1) * h, (idx + 1) * h)

    i_best = int(np.argmin(f))
    theta, upper = i_best * h, float(f[i_best])
    refined = False
    if f_ref.size:
        t_r, v_r = _pick(th_ref, f_ref)
        if v_r <= upper + prob.slack:
            theta, upper, refined = t_r, v_r, True

    a = np.arange(n) * h
    fa, fb = f[:-1], f[1:]
    f2a, f2b = f2[:-1], f2[1:]
    dropped = math.inf
    depth = 0
    while True:
        curv = np.minimum(prob.k2, np.maximum(f2a, f2b) + 0.5 * prob.k3 * h)
        lb = np.minimum(fa, fb) - np.maximum(curv, 0.0) * (h * h / 8) - prob.slack
        tol = tol_at(upper, theta)
        if clamp:
            tol = max(tol, 4 * prob.slack)
        if tol <= 2 * prob.slack:
            raise ToleranceUnreachable(
                f"tolerance {tol:.3g} is below the evaluation rounding floor "
                f"{2 * prob.slack:.3g}"
            )
        keep = lb < upper - tol
        if not keep.all():
            dropped = min(dropped, float(lb[~keep].min()))
        if not keep.any():
            break
        a, fa, fb, f2a, f2b = a[keep], fa[keep], fb[keep], f2a[keep], f2b[keep]
        evals += a.size
        if evals > max_samples or a.size > MAX_OPEN_CELLS:
            raise ToleranceUnreachable(
                f"gave up after {evals} samples with {a.size} cells still open "
                f"(max harmonic {prob.m_max}, tol {tol:.3g})"
            )
        mid = a + 0.5 * h
        fm, f2m = prob.f_f2(mid)
        j = int(np.argmin(fm))
        if fm[j] < upper:
            # a basin the first pass missed
            theta, upper, refined = float(_fold(mid[j])), float(fm[j]), False
            t_r, v_r = _polish(prob, [mid[j] - h], [mid[j] + h])
            if v_r.size and v_r[0] <= upper:
                theta, upper, refined = float(t_r[0]), float(v_r[0]), True
        h *= 0.5
        depth += 1
        a = np.concatenate((a, mid))
        fa, fb = np.concatenate((fa, fm)), np.concatenate((fm, fb))
        f2a, f2b = np.concatenate((f2a, f2m)), np.concatenate((f2m, f2b))

    radius = max(0.0, upper - dropped) if math.isfinite(dropped) else 0.0
    return MinResult(theta, upper, radius, n * 2**depth, refined)


def global_min(
    p: CosinePoly,
    tol: float = DEFAULT_TOL,
    *,
    grid_factor: int = GRID_FACTOR,
    max_samples: int = MAX_SAMPLES,
) -> MinResult:
    """Certified minimum of ``p`` over a full period.

    Raises ToleranceUnreachable when certifying to ``tol`` would need more
    than ``max_samples`` evaluations.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    return _certified_min(p, lambda u, t: tol, grid_factor, max_samples)


def newman_modulus(exponents, theta) -> float:
    """``|sum_j exp(i a_j theta)|`` by direct complex summation."""
    c, s = cos_sin_multiple(np.asarray(exponents, dtype=np.int64), float(theta))
    return math.hypot(math.fsum(c.tolist()), math.fsum(s.tolist()))


def _modulus_branch_and_bound(exponents, theta, upper, tol, max_samples):
    """Certify ``min |P|`` directly, for minima too close to 0 for ``|P|**2``.

    On a cell ``[a, a + h]``, ``P(a + t) = P(a) + t P'(a) + R`` with
    ``|R| <= t**2 / 2 * sum a_j**2``, so ``|P|`` is at least the distance from
    0 to the segment ``P(a) + [0, h] P'(a)`` minus that remainder.  Returns
    ``(theta, upper, radius, cells)``.
    """
    e = np.asarray(exponents, dtype=np.int64)
    ef = e.astype(np.float64)
    n_exp = float(e.size)
    k2 = float(ef @ ef)
    slack = 4 * _EPS * (e.size + 2) * (n_exp + math.pi * float(ef.sum()))

    def values(th):
        c, s = cos_sin_multiple(e, th)
        return c.sum(axis=-1) + 1j * s.sum(axis=-1), (c @ ef) * 1j - (s @ ef)

    n = max(MIN_GRID, GRID_FACTOR * int(e.max()))
    h = math.pi / n
    a = np.arange(n) * h
    evals = n
    dropped = math.inf
    depth = 0
    while True:
        pa, da = values(a)
        mod = np.abs(pa)
        j = int(np.argmin(mod))
        if mod[j] < upper:
            theta, upper = float(a[j]), float(mod[j])
        dd = (da * da.conj()).real
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(dd > 0, -(pa * da.conj()).real / dd, 0.0)
        t = np.clip(t, 0.0, h)
        lb = np.abs(pa + t * da) - k2 * h * h / 2 - slack
        keep = lb < upper - tol
        if not keep.all():
            dropped = min(dropped, float(lb[~keep].min()))
        if not keep.any():
            break
        a = a[keep]
        evals += 2 * a.size
        if evals > max_samples or a.size > MAX_OPEN_CELLS:
            raise ToleranceUnreachable(
                f"gave up after {evals} samples with {a.size} cells still open "
                f"(largest exponent {int(e.max())}, tol {tol:.3g})"
            )
        h *= 0.5
        depth += 1
        a = np.concatenate((a, a + h))
    radius = max(0.0, upper - max(dropped, 0.0)) if math.isfinite(dropped) else 0.0
    return theta, upper, radius, n * 2**depth


def min_modulus(
    s: ExponentSet,
    tol: float = DEFAULT_TOL,
    *,
    grid_factor: int = GRID_FACTOR,
    max_samples: int = MAX_SAMPLES,
) -> MinResult:
    """Minimum modulus of a Newman polynomial on the unit circle.

    Minimizes the autocorrelation ``|P|**2`` with a tolerance scaled so that
    the square-root image meets ``tol``.  The reported value is ``|P|``
    evaluated directly at the argmin, which avoids the cancellation in
    ``|P|**2`` near a zero of ``P``.
    """
    if s.kind is not Kind.NEWMAN:
        raise ValueError("min_modulus expects a Newman exponent set")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")

    def tol_sq(upper: float, theta: float) -> float:
        q = newman_modulus(s.exponents, theta)
        # a modulus already below tol is certified by the bound |P| >= 0
        if q <= tol:
            return math.inf
        # q - sqrt(q**2 - r) <= tol  iff  r <= tol * (2q - tol)
        return 0.95 * tol * (2 * q - tol)

    sq = _certified_min(autocorrelate(s), tol_sq, grid_factor, max_samples, clamp=True)
    theta, grid_size = sq.theta_star, sq.grid_size
    value = newman_modulus(s.exponents, theta)
    floor = math.sqrt(max(0.0, sq.value - sq.error_radius))
    radius = max(0.0, value - floor)
    if radius > tol:
        theta, value, radius, grid_size = _modulus_branch_and_bound(
            s.exponents, theta, value, tol, max_samples)
        value = newman_modulus(s.exponents, theta)
    if radius > tol:
        raise ToleranceUnreachable(
            f"modulus radius {radius:.3g} exceeds tol {tol:.3g} for {s.exponents}"
        )
    return MinResult(theta, value, radius, grid_size, sq.refined)


def min_of_cubic_reference() -> float:
    """Minimum of ``cos t + cos 2t + cos 3t`` from its closed form.

    With ``c = cos t`` the sum is ``4c**3 + 2c**2 - 2c - 1``, stationary at
    ``c = (sqrt(7) - 1) / 6``; the minimum there is ``-(17 + 7 sqrt(7)) / 27``.
    """
    r7 = math.sqrt(7.0)
    c = (r7 - 1.0) / 6.0
    residual = abs(12 * c * c + 4 * c - 2)
    if residual > 1e-12:
        raise AssertionError(f"stationarity residual {residual:.3g} at c = {c!r}")
    return (-17.0 - 7.0 * r7) / 27.0
