"""Bounded exhaustive search for the sets with the highest minimum.

Only canonical sets are enumerated (gcd 1, and anchored at 0 for Newman
sets); every other set takes the same values as one of them.  Evaluation is
spread over a process pool, results are merged by a deterministic sort, and
completed sets can be appended to a JSON Lines checkpoint for resuming.
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence, Union

from .minimizer import SEARCH_TOL, ToleranceUnreachable, global_min, min_modulus
from .trigpoly import ExponentSet, Kind, from_exponents

__all__ = [
    "Problem",
    "SearchSpec",
    "SearchRecord",
    "SearchReport",
    "EmptySpace",
    "CorruptCheckpoint",
    "enumerate_canonical",
    "evaluate_set",
    "run_search",
    "nonmonotonicity_check",
]

TIE_EPS = 1e-9
CHUNK = 256


class Problem(str, enum.Enum):
    LAMBDA = "lambda"
    MU = "mu"

    @property
    def kind(self) -> Kind:
        return Kind.COSINE if self is Problem.LAMBDA else Kind.NEWMAN


class EmptySpace(ValueError):
    """No canonical set satisfies the requested bound."""


class CorruptCheckpoint(ValueError):
    """A checkpoint file could not be used to resume a search."""


@dataclass(frozen=True)
class SearchSpec:
    problem: Problem
    n: int
    max_exponent: int
    tol: float = SEARCH_TOL
    top_k: Optional[int] = 10

    def __post_init__(self):
        object.__setattr__(self, "problem", Problem(self.problem))
        if self.n < 2:
            raise ValueError(f"set size must be >= 2, got {self.n}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.top_k is not None and self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")

    def to_dict(self) -> dict:
        return {
            "problem": self.problem.value,
            "n": self.n,
            "max_exponent": self.max_exponent,
            "tol": self.tol,
            "top_k": self.top_k,
        }


@dataclass(frozen=True)
class SearchRecord:
    """One evaluated set.  ``objective`` is ``-L`` for lambda and ``M`` for mu."""

    set: tuple
    objective: float
    theta_star: float

    def to_dict(self, problem: Problem) -> dict:
        out = {"set": list(self.set), "objective": self.objective, "theta": self.theta_star}
        if problem is Problem.LAMBDA:
            out["min_value"] = -self.objective
        return out


@dataclass
class SearchReport:
    spec: SearchSpec
    best: list
    sets_evaluated: int
    wall_time: float = 0.0
    failures: list = field(default_factory=list)
    resumed: int = 0

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "spec": self.spec.to_dict(),
            "best": [r.to_dict(self.spec.problem) for r in self.best],
            "sets_evaluated": self.sets_evaluated,
            "failures": [{"set": list(s), "error": e} for s, e in self.failures],
        }
        if include_timing:
            out["wall_time"] = self.wall_time
            out["resumed"] = self.resumed
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["set", "objective", "theta"])
        for r in self.best:
            writer.writerow([",".join(map(str, r.set)), repr(r.objective), repr(r.theta_star)])
        return buf.getvalue()


def enumerate_canonical(problem, n: int, max_exponent: int) -> Iterator[tuple]:
    """Canonical exponent tuples of size ``n`` with largest element <= ``max_exponent``.

    Lambda: n-subsets of ``1..max_exponent`` with gcd 1.  Mu: n-subsets of
    ``0..max_exponent`` containing 0 whose nonzero elements have gcd 1.
    Both streams are in lexicographic order.
    """
    problem = Problem(problem)
    if problem is Problem.LAMBDA:
        if n < 1 or max_exponent < n:
            raise EmptySpace(f"no {n}-subset of 1..{max_exponent}")
        return (c for c in itertools.combinations(range(1, max_exponent + 1), n)
                if math.gcd(*c) == 1)
    if n < 2 or max_exponent < n - 1:
        raise EmptySpace(f"no canonical {n}-subset of 0..{max_exponent}")
    return ((0,) + c for c in itertools.combinations(range(1, max_exponent + 1), n - 1)
            if math.gcd(*c) == 1)


def evaluate_set(problem, exponents: Sequence[int], tol: float) -> tuple:
    """Return ``(objective, theta_star)`` for one set."""
    problem = Problem(problem)
    if problem is Problem.LAMBDA:
        res = global_min(from_exponents(ExponentSet.cosine(exponents)), tol)
        return -res.value, res.theta_star
    res = min_modulus(ExponentSet.newman(exponents), tol)
    return res.value, res.theta_star


def _evaluate_chunk(args):
    problem, tol, sets = args
    out = []
    for s in sets:
        try:
            obj, theta = evaluate_set(problem, s, tol)
        except ToleranceUnreachable as exc:
            out.append((s, None, str(exc)))
        else:
            out.append((s, obj, theta))
    return out


def _read_checkpoint(path: Path, universe: set) -> dict:
    """Parse completed records; a torn final line (no newline) is discarded."""
    done = {}
    raw = path.read_bytes()
    if not raw:
        return done
    lines = raw.split(b"\n")
    tail = lines.pop()
    if tail.strip():
        # interrupted mid-write; drop the partial record
        with open(path, "r+b") as fh:
            fh.truncate(len(raw) - len(tail))
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            s = tuple(rec["set"])
            obj, theta = rec["objective"], rec["theta"]
            if not all(isinstance(a, int) and not isinstance(a, bool) for a in s):
                raise TypeError("set must hold integers")
            if not (isinstance(obj, (int, float)) and isinstance(theta, (int, float))):
                raise TypeError("objective and theta must be numbers")
        except (ValueError, KeyError, TypeError) as exc:
            raise CorruptCheckpoint(f"{path}:{lineno}: {exc}") from None
        if s not in universe:
            raise CorruptCheckpoint(f"{path}:{lineno}: {list(s)} is not in this search space")
        entry = (float(obj), float(theta))
        if done.get(s, entry) != entry:
            raise CorruptCheckpoint(f"{path}:{lineno}: conflicting records for {list(s)}")
        done[s] = entry
    return done


def _rank(problem: Problem, records: list, top_k: Optional[int], tol: float) -> list:
    """Best first; near-ties are re-evaluated, then ordered lexicographically.

    Lambda ranks by ascending ``-L`` (highest minimum first), mu by
    descending modulus.
    """
    sign = 1.0 if problem is Problem.LAMBDA else -1.0

    def key(r):
        return (sign * r.objective, r.set)

    def gap(r1, r2):
        return sign * (r2.objective - r1.objective)

    records = sorted(records, key=key)
    limit = len(records) if top_k is None else min(top_k, len(records))
    ranked = []
    i = 0
    while len(ranked) < limit:
        j = i + 1
        while j < len(records) and gap(records[i], records[j]) <= TIE_EPS:
            j += 1
        group = records[i:j]
        if len(group) > 1:
            group = [SearchRecord(r.set, *evaluate_set(problem, r.set, tol / 100))
                     for r in group]
            group.sort(key=key)
            clusters, start = [], 0
            for k in range(1, len(group) + 1):
                if k == len(group) or gap(group[start], group[k]) > TIE_EPS:
                    clusters.append(sorted(group[start:k], key=lambda r: r.set))
                    start = k
            group = [r for c in clusters for r in c]
        ranked.extend(group)
        i = j
    return ranked[:limit]


def run_search(
    spec: SearchSpec,
    workers: int = 1,
    checkpoint: Union[str, os.PathLike, None] = None,
    resume: bool = False,
    on_record: Optional[Callable[[SearchRecord], None]] = None,
) -> SearchReport:
    """Evaluate every canonical set of ``spec`` and rank the results.

    The report does not depend on ``workers`` or on whether the run was
    resumed.  ``on_record`` is called in the parent process after each newly
    evaluated record has been written to the checkpoint.
    """
    start = time.perf_counter()
    sets = list(enumerate_canonical(spec.problem, spec.n, spec.max_exponent))
    done = {}
    path = Path(checkpoint) if checkpoint is not None else None
    if path is not None:
        if resume and path.exists():
            done = _read_checkpoint(path, set(sets))
        elif not resume:
            path.write_bytes(b"")
    resumed = len(done)
    pending = [s for s in sets if s not in done]
    chunks = [(spec.problem, spec.tol, pending[i:i + CHUNK])
              for i in range(0, len(pending), CHUNK)]

    failures = {}
    sink = open(path, "a", encoding="utf-8") if path is not None else None
    try:
        if workers > 1 and len(chunks) > 1:
            pool = ProcessPoolExecutor(max_workers=workers)
            results = pool.map(_evaluate_chunk, chunks)
        else:
            pool = None
            results = map(_evaluate_chunk, chunks)
        try:
            for chunk in results:
                for s, obj, extra in chunk:
                    if obj is None:
                        failures[s] = extra
                        continue
                    done[s] = (obj, extra)
                    if sink is not None:
                        sink.write(json.dumps({"set": list(s), "objective": obj,
                                               "theta": extra}) + "\n")
                        sink.flush()
                    if on_record is not None:
                        on_record(SearchRecord(s, obj, extra))
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
    finally:
        if sink is not None:
            sink.close()

    records = [SearchRecord(s, *done[s]) for s in sets if s in done]
    best = _rank(spec.problem, records, spec.top_k, spec.tol)
    return SearchReport(
        spec=spec,
        best=best,
        sets_evaluated=len(records),
        wall_time=time.perf_counter() - start,
        failures=sorted(failures.items()),
        resumed=resumed,
    )


def nonmonotonicity_check(lambda5, lambda6) -> bool:
    """True iff the best lambda objective for n=6 is strictly below that for n=5.

    Accepts SearchReports or bare objective values.
    """
    def top(x):
        return x.best[0].objective if isinstance(x, SearchReport) else float(x)

    return top(lambda6) < top(lambda5)
