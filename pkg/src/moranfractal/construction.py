"""Defining data of a planar self-affine Moran construction.

A construction is a level-indexed family ``{(n_k, m_k, D_k)}``: level ``k``
splits every rectangle of the previous level into an ``n_k x m_k`` grid and
keeps the cells listed in the digit set ``D_k``.  Each digit is a pair
``(i, j)`` with ``i`` the column (0 <= i < n) and ``j`` the row (0 <= j < m).
The attractor is the intersection over all levels of the retained rectangle
unions.

This module owns the scale bookkeeping:

* ``R_k = (m_1 ... m_k)^{-1}`` is the height of a level-``k`` rectangle,
* ``k_of_delta`` finds the unique ``k`` with ``R_k <= delta < R_{k-1}``,
* ``l_of_k`` finds the unique horizontal depth ``l`` with
  ``(n_1 ... n_l)^{-1} <= R_k < (n_1 ... n_{l-1})^{-1}``,

so that a block of ``l`` column digits and ``k`` row digits carves out an
"approximate square" of width and height both comparable to ``R_k``.

Constructions are restricted to an eventually periodic level pattern
(a finite preperiod followed by a repeating period).  This keeps every
asymptotic quantity of the attractor computable while still covering
arbitrary finite prefixes.  Levels are 1-indexed throughout.

Boundary comparisons between ``(m_1 ... m_k)^{-1}`` and powers of the other
base are closed on a specific side, so they are never decided by floating
point alone: depths up to 64 are compared with exact integer products, and
deeper comparisons fall back to exact arithmetic whenever the log-domain gap
is smaller than 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import BadBase, DomainError, OutOfRangeDigit, TooFewDigits, ValidationError

_EXACT_DEPTH = 64          # depths up to this are always compared exactly
_LOG_TIE_EPS = 1e-9        # log-domain gap below which we escalate to exact


@dataclass(frozen=True)
class Level:
    """One construction stage: an ``n x m`` grid plus the kept digit set."""

    n: int
    m: int
    digits: tuple[tuple[int, int], ...]

    def digit_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.digits)


def level(n: int, m: int, digits) -> Level:
    """Build and validate a :class:`Level` from any iterable of digit pairs."""
    return validate(Level(n, m, tuple(sorted(set(map(tuple, digits))))))


def validate(lv: Level) -> Level:
    """Return ``lv`` unchanged iff all level invariants hold.

    Raises:
        BadBase: n < 2 or m < 2.
        OutOfRangeDigit: some (i, j) outside the n x m grid.
        TooFewDigits: fewer than two digits (the standing assumption r >= 2).
    """
    if lv.n < 2 or lv.m < 2:
        raise BadBase(f"subdivision counts must be >= 2, got n={lv.n}, m={lv.m}")
    for (i, j) in lv.digits:
        if not (0 <= i < lv.n and 0 <= j < lv.m):
            raise OutOfRangeDigit(
                f"digit ({i}, {j}) outside grid {lv.n}x{lv.m}"
            )
    if len(set(lv.digits)) < 2:
        raise TooFewDigits(f"need at least 2 digits, got {len(set(lv.digits))}")
    return lv


@dataclass(frozen=True)
class Construction:
    """An eventually periodic sequence of levels: preperiod then repeating period."""

    preperiod: tuple[Level, ...]
    period: tuple[Level, ...]

    def __post_init__(self):
        if not self.period:
            raise ValidationError("period must contain at least one level")
        for lv in self.preperiod + self.period:
            validate(lv)

    @property
    def pattern(self) -> tuple[Level, ...]:
        """All distinct stored levels: preperiod followed by one period."""
        return self.preperiod + self.period


def construction(preperiod, period) -> Construction:
    return Construction(tuple(preperiod), tuple(period))


def level_at(c: Construction, k: int) -> Level:
    """The level used at stage ``k`` (1-indexed, periodic extension)."""
    if k < 1:
        raise DomainError(f"level index must be >= 1, got {k}")
    p = len(c.preperiod)
    if k <= p:
        return c.preperiod[k - 1]
    return c.period[(k - p - 1) % len(c.period)]


def pattern_index(c: Construction, k: int) -> int:
    """Index into ``c.pattern`` of the level used at stage ``k``."""
    p = len(c.preperiod)
    if k <= p:
        return k - 1
    return p + (k - p - 1) % len(c.period)


def n_plus(c: Construction) -> int:
    """The uniform base bound: max over all levels of max(n, m)."""
    return max(max(lv.n, lv.m) for lv in c.pattern)


@dataclass(frozen=True)
class ScalePair:
    """Matched vertical depth ``k`` and horizontal depth ``l``.

    ``logm`` and ``logn`` are the accumulated ``sum(log m_i, i <= k)`` and
    ``sum(log n_i, i <= l)``; the defining inequality is
    ``logn(l) >= logm(k) > logn(l-1)``.
    """

    k: int
    l: int
    logm: float
    logn: float


class PeriodicSums:
    """O(1) prefix sums of a per-level quantity over an eventually periodic pattern.

    ``values`` must be aligned with ``Construction.pattern``.  ``prefix(k)``
    returns the sum of the first ``k`` per-level values (k >= 0).
    """

    def __init__(self, c: Construction, values):
        values = [float(v) for v in values]
        p, q = len(c.preperiod), len(c.period)
        assert len(values) == p + q
        self.pre_len = p
        self.per_len = q
        pre_cum = [0.0]
        for v in values[:p]:
            pre_cum.append(pre_cum[-1] + v)
        per_cum = [0.0]
        for v in values[p:]:
            per_cum.append(per_cum[-1] + v)
        self.pre_cum = pre_cum
        self.per_cum = per_cum
        self.per_total = per_cum[-1]

    def prefix(self, k: int) -> float:
        if k <= self.pre_len:
            return self.pre_cum[k]
        r = k - self.pre_len
        t, rem = divmod(r, self.per_len)
        return self.pre_cum[-1] + t * self.per_total + self.per_cum[rem]

    def range_sum(self, lo: int, hi: int) -> float:
        """Sum over levels ``lo < h <= hi`` (empty when hi <= lo)."""
        if hi <= lo:
            return 0.0
        return self.prefix(hi) - self.prefix(lo)


@lru_cache(maxsize=None)
def _log_m_sums(c: Construction) -> PeriodicSums:
    return PeriodicSums(c, [math.log(lv.m) for lv in c.pattern])


@lru_cache(maxsize=None)
def _log_n_sums(c: Construction) -> PeriodicSums:
    return PeriodicSums(c, [math.log(lv.n) for lv in c.pattern])


def _exact_product(c: Construction, k: int, attr: str) -> int:
    """Exact ``prod(level.attr for the first k levels)`` as a big integer."""
    p_levels = c.preperiod
    q_levels = c.period
    p, q = len(p_levels), len(q_levels)
    out = 1
    for lv in p_levels[: min(k, p)]:
        out *= getattr(lv, attr)
    if k > p:
        per = 1
        for lv in q_levels:
            per *= getattr(lv, attr)
        t, rem = divmod(k - p, q)
        out *= pow(per, t)
        for lv in q_levels[:rem]:
            out *= getattr(lv, attr)
    return out


def m_product(c: Construction, k: int) -> int:
    """Exact ``m_1 * ... * m_k`` (the reciprocal of the level-k height R_k)."""
    return _exact_product(c, k, "m")


def n_product(c: Construction, l: int) -> int:
    """Exact ``n_1 * ... * n_l``."""
    return _exact_product(c, l, "n")


def k_of_delta(c: Construction, delta) -> int:
    """The unique ``k >= 1`` with ``R_k <= delta < R_{k-1}``.

    ``delta`` may be a float or Fraction in (0, 1); floats are converted
    exactly (they are dyadic rationals), so boundary values such as ``2**-10``
    land on the left-closed side deterministically.
    """
    d = Fraction(delta)
    if not (0 < d < 1):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    # Smallest k with m_1...m_k >= 1/delta, found by exact scanning:
    # prod >= den/num  <=>  prod * num >= den.
    num, den = d.numerator, d.denominator
    prod = 1
    k = 0
    while prod * num < den:
        k += 1
        prod *= level_at(c, k).m
    return max(k, 1)


def l_of_k(c: Construction, k: int) -> ScalePair:
    """The unique horizontal depth matched to vertical depth ``k``.

    Satisfies ``n_1...n_l >= m_1...m_k > n_1...n_{l-1}`` (equivalently
    ``(1/n_1...n_l) <= (1/m_1...m_k) < (1/n_1...n_{l-1})``).  ``k = 0`` is
    allowed and maps to ``l = 0`` (the whole square).
    """
    if k < 0:
        raise DomainError(f"depth must be >= 0, got {k}")
    l = _l_index(c, k)
    return ScalePair(
        k=k, l=l, logm=_log_m_sums(c).prefix(k), logn=_log_n_sums(c).prefix(l)
    )


def _l_index(c: Construction, k: int) -> int:
    if k == 0:
        return 0
    if k <= _EXACT_DEPTH:
        # Exact scan; cheap at these depths and immune to float ties.
        target = m_product(c, k)
        prod = 1
        l = 0
        while prod < target:
            l += 1
            prod *= level_at(c, l).n
        return l
    logm = _log_m_sums(c).prefix(k)
    nsums = _log_n_sums(c)
    # Bracket then binary-search the smallest l with logn(l) >= logm.
    hi = 1
    while nsums.prefix(hi) < logm - _LOG_TIE_EPS:
        hi *= 2
    lo = hi // 2
    while lo < hi:
        mid = (lo + hi) // 2
        gap = nsums.prefix(mid) - logm
        if abs(gap) <= _LOG_TIE_EPS:
            # Too close to call in floats: settle exactly.
            if n_product(c, mid) >= m_product(c, k):
                hi = mid
            else:
                lo = mid + 1
        elif gap >= 0:
            hi = mid
        else:
            lo = mid + 1
    # Guard the final candidate against a near-tie as well.
    if abs(nsums.prefix(lo) - logm) <= _LOG_TIE_EPS:
        while n_product(c, lo) < m_product(c, k):
            lo += 1
        while lo > 0 and n_product(c, lo - 1) >= m_product(c, k):
            lo -= 1
    return lo


def scale_ratio(c: Construction) -> float:
    """Asymptotic ratio ``l(k)/k``: period log-sum of m over period log-sum of n."""
    msums, nsums = _log_m_sums(c), _log_n_sums(c)
    return msums.per_total / nsums.per_total


def period_products(c: Construction) -> tuple[int, int]:
    """Exact ``(prod n_i, prod m_i)`` over one period, for branch decisions."""
    pn = pm = 1
    for lv in c.period:
        pn *= lv.n
        pm *= lv.m
    return pn, pm
