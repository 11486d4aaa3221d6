"""Digit statistics and the combinatorial approximate-square counts.

Per level, for the digit set ``D`` of an ``n x m`` grid:

* ``r`` is the number of digits, ``r(j)`` the digits in row ``j``,
  ``rhat(i)`` the digits in column ``i``;
* ``r-``/``r+`` are the min/max of the nonzero row counts, ``rhat-``/``rhat+``
  the same over columns;
* ``s`` counts occupied rows, ``shat`` occupied columns.

An approximate square at depth ``k`` is identified by ``l = l(k)`` column
digits and ``k`` row digits.  The global count at depth ``k`` is

    N(k) = r_1...r_l * s_{l+1}...s_k      (l <= k)
           r_1...r_k * shat_{k+1}...shat_l  (l > k)

and for nested depths ``k < k'`` the minimum (resp. maximum) over depth-k
squares of the number of contained depth-k' squares is a product of one
factor per level.  Which statistic a level contributes depends only on where
it sits relative to the four indices ``l < l', k < k'``:

* level constrained in both directions (``l < h <= l'`` and ``k < h <= k'``):
  a full digit is free, factor ``r_h``;
* free column digit with its row pinned by the outer square (``h <= k``):
  factor ``r_h(j_h)``, minimised/maximised to ``r∓_h``;
* free column digit with no row constraint at all (``h > k'``): factor
  ``shat_h``;
* symmetrically for free row digits: ``rhat∓_h`` (``h <= l``) or ``s_h``
  (``h > l'``).

Ranges that come out empty contribute factor 1, which is exactly how the
boundary coincidences between the six orderings of ``(l, l', k, k')``
resolve; the brute-force census in :mod:`moranfractal.oracle` checks this
level-by-level rule against direct enumeration.

Counts are carried as natural logs (sums of per-level log factors), plus the
exact big integer whenever at most 64 levels contribute.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .construction import Construction, Level, PeriodicSums, l_of_k, level_at, pattern_index
from .errors import BadRange, DomainError

_EXACT_SPAN = 64  # exact big-integer product kept when <= this many levels contribute


@dataclass(frozen=True)
class DigitStats:
    """All per-level digit statistics used by the counting formulas."""

    r: int
    rows: dict        # j -> r(j), occupied rows only
    cols: dict        # i -> rhat(i), occupied columns only
    r_minus: int
    r_plus: int
    rhat_minus: int
    rhat_plus: int
    s: int
    shat: int


@lru_cache(maxsize=None)
def digit_stats(level: Level) -> DigitStats:
    """Digit statistics of a validated level; min/max over nonzero counts only."""
    rows = Counter(j for (_, j) in level.digits)
    cols = Counter(i for (i, _) in level.digits)
    return DigitStats(
        r=len(level.digits),
        rows=dict(sorted(rows.items())),
        cols=dict(sorted(cols.items())),
        r_minus=min(rows.values()),
        r_plus=max(rows.values()),
        rhat_minus=min(cols.values()),
        rhat_plus=max(cols.values()),
        s=len(rows),
        shat=len(cols),
    )


@dataclass(frozen=True)
class LogCount:
    """A positive integer count in log space, with the exact value when small."""

    log_value: float
    exact: int | None = None


_STAT_KEYS = ("r", "s", "shat", "r_minus", "r_plus", "rhat_minus", "rhat_plus")


@lru_cache(maxsize=None)
def _stat_sums(c: Construction) -> dict:
    """Periodic prefix sums of log(stat) for every counting statistic."""
    stats = [digit_stats(lv) for lv in c.pattern]
    return {
        key: PeriodicSums(c, [math.log(getattr(st, key)) for st in stats])
        for key in _STAT_KEYS
    }


def _stat_at(c: Construction, key: str, h: int) -> int:
    return getattr(digit_stats(level_at(c, h)), key)


def _segments(l: int, k: int, l2: int, k2: int, minus: bool):
    """The (statistic, lo, hi] ranges of the nested-count product."""
    rkey = "r_minus" if minus else "r_plus"
    rhkey = "rhat_minus" if minus else "rhat_plus"
    return (
        (rkey, l, min(k, l2)),           # free column digit, row pinned
        ("r", max(k, l), min(l2, k2)),   # full digit free
        ("shat", max(k2, l), l2),        # free column digit, row unconstrained
        (rhkey, k, min(l, k2)),          # free row digit, column pinned
        ("s", max(l2, k), k2),           # free row digit, column unconstrained
    )


def _product_count(c: Construction, segments) -> LogCount:
    sums = _stat_sums(c)
    log_value = 0.0
    span = 0
    for key, lo, hi in segments:
        if hi > lo:
            log_value += sums[key].range_sum(lo, hi)
            span += hi - lo
    exact = None
    if span <= _EXACT_SPAN:
        exact = 1
        for key, lo, hi in segments:
            for h in range(lo + 1, hi + 1):
                exact *= _stat_at(c, key, h)
    return LogCount(log_value=log_value, exact=exact)


def count_approx_squares(c: Construction, k: int) -> LogCount:
    """Number of distinct approximate squares at depth ``k``."""
    if k < 0:
        raise DomainError(f"depth must be >= 0, got {k}")
    l = l_of_k(c, k).l
    if l <= k:
        segments = (("r", 0, l), ("s", l, k))
    else:
        segments = (("r", 0, k), ("shat", k, l))
    return _product_count(c, segments)


def n_minus(c: Construction, k: int, k2: int) -> LogCount:
    """Minimum over depth-k squares of contained depth-k2 squares (k >= 0)."""
    return _nested_count(c, k, k2, minus=True)


def n_plus_count(c: Construction, k: int, k2: int) -> LogCount:
    """Maximum over depth-k squares of contained depth-k2 squares (k >= 0)."""
    return _nested_count(c, k, k2, minus=False)


def _nested_count(c: Construction, k: int, k2: int, minus: bool) -> LogCount:
    if k < 0:
        raise DomainError(f"outer depth must be >= 0, got {k}")
    if k >= k2:
        raise BadRange(f"need k < k2, got k={k}, k2={k2}")
    l = l_of_k(c, k).l
    l2 = l_of_k(c, k2).l
    return _product_count(c, _segments(l, k, l2, k2, minus))
