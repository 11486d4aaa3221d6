"""Brute-force oracles: everything here recounts from first principles.

The counting and measure modules compute products of per-level statistics.
This module never does: it enumerates level-k rectangles, realizable
constraint tuples, or whole symbolic words, and counts or sums directly, so
that agreement between the two routes is meaningful evidence.

Conventions shared by the geometric oracles:

* grid cells are half-open ``[a*delta, (a+1)*delta)`` so no point is counted
  twice, while rectangles are closed; all intersection tests are done on
  integer cross-products of exact rational coordinates;
* every enumeration refuses to grow beyond ``guard`` items (default 10^7).

Randomised sampling is reproducible: word ``index`` under ``seed`` is fully
determined by ``(seed, index)``.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .construction import (
    Construction,
    _log_m_sums,
    k_of_delta,
    l_of_k,
    level_at,
    m_product,
    n_product,
)
from .errors import GuardExceeded
from .measure import ApproxSquare, ProbAssignment

DEFAULT_GUARD = 10_000_000


@dataclass(frozen=True)
class Rect:
    """A level-k basic rectangle, exact rational position and size."""

    x0: Fraction
    y0: Fraction
    width: Fraction
    height: Fraction


def enumerate_rects(c: Construction, k: int, guard: int = DEFAULT_GUARD):
    """Yield every level-``k`` rectangle of the construction.

    Level 0 is the unit square.  Raises GuardExceeded if the rectangle count
    would exceed ``guard``.
    """
    _check_rect_guard(c, k, guard)
    width = Fraction(1, n_product(c, k))
    height = Fraction(1, m_product(c, k))
    for (xn, yn) in _integer_positions(c, k):
        yield Rect(x0=xn * width, y0=yn * height, width=width, height=height)


def _check_rect_guard(c: Construction, k: int, guard: int) -> int:
    total = 1
    for h in range(1, k + 1):
        total *= len(level_at(c, h).digits)
        if total > guard:
            raise GuardExceeded(
                f"level-{k} enumeration needs {total}+ rectangles (guard {guard})"
            )
    return total


def _integer_positions(c: Construction, k: int):
    """Integer corners: rect = [xn/Nk, (xn+1)/Nk] x [yn/Mk, (yn+1)/Mk]."""
    positions = [(0, 0)]
    for h in range(1, k + 1):
        lv = level_at(c, h)
        positions = [
            (xn * lv.n + i, yn * lv.m + j)
            for (xn, yn) in positions
            for (i, j) in lv.digits
        ]
    return positions


def box_count(c: Construction, k_geom: int, delta, guard: int = DEFAULT_GUARD) -> int:
    """Number of delta-grid boxes meeting the level-``k_geom`` rectangle union.

    Exact integer arithmetic throughout: a closed rectangle
    ``[x0, x1] x [y0, y1]`` meets the half-open cell column ``a`` iff
    ``floor(x0/delta) <= a <= floor(x1/delta)``.
    """
    d = Fraction(delta)
    if not (0 < d < 1):
        raise GuardExceeded(f"delta must be in (0,1), got {delta}")
    _check_rect_guard(c, k_geom, guard)
    dn, dd = d.numerator, d.denominator
    nk = n_product(c, k_geom)
    mk = m_product(c, k_geom)
    cells = set()
    stride = dd // dn + 2  # cells per row upper bound, for flat indexing
    for (xn, yn) in _integer_positions(c, k_geom):
        a0 = (xn * dd) // (dn * nk)
        a1 = ((xn + 1) * dd) // (dn * nk)
        b0 = (yn * dd) // (dn * mk)
        b1 = ((yn + 1) * dd) // (dn * mk)
        for a in range(a0, a1 + 1):
            base = a * stride
            for b in range(b0, b1 + 1):
                cells.add(base + b)
    return len(cells)


# ---------------------------------------------------------------------------
# symbolic censuses
# ---------------------------------------------------------------------------

def _tuple_census(c: Construction, k: int, guard: int):
    """All realizable approximate-square tuples at depth ``k``.

    Built level by level: a tuple records the first l(k) column digits and
    the first k row digits of any word, deduplicated as it grows.
    """
    l = l_of_k(c, k).l
    depth = max(k, l)
    tuples = {((), ())}
    for h in range(1, depth + 1):
        lv = level_at(c, h)
        new = set()
        for (ip, jp) in tuples:
            for (i, j) in lv.digits:
                new.add(
                    (ip + (i,) if h <= l else ip, jp + (j,) if h <= k else jp)
                )
        if len(new) > guard:
            raise GuardExceeded(
                f"census at depth {k} exceeds guard {guard} at level {h}"
            )
        tuples = new
    return l, tuples


def census_approx_squares(c: Construction, k: int, guard: int = DEFAULT_GUARD) -> int:
    """Exact number of distinct approximate squares at depth ``k``, by enumeration."""
    return len(_tuple_census(c, k, guard)[1])


def gamma_census(c: Construction, k: int, k2: int, guard: int = DEFAULT_GUARD):
    """(min, max) over depth-``k`` squares of contained depth-``k2`` squares.

    Containment of approximate squares is prefix extension of the constraint
    tuples, so the census groups the depth-``k2`` tuples by their depth-``k``
    ancestor and reads off the extremes.
    """
    l = l_of_k(c, k).l
    _, tuples = _tuple_census(c, k2, guard)
    ancestors = Counter((ip[:l], jp[:k]) for (ip, jp) in tuples)
    return min(ancestors.values()), max(ancestors.values())


# ---------------------------------------------------------------------------
# measure oracles
# ---------------------------------------------------------------------------

def _common_denominator(c: Construction, p: ProbAssignment, depth: int) -> int:
    den = 1
    for h in range(1, depth + 1):
        vec = p.vector_at(h)
        lden = 1
        for v in vec.values():
            lden = lden * v.denominator // math.gcd(lden, v.denominator)
        den *= lden
    return den


def _brute_numerators(c: Construction, p: ProbAssignment, k: int, guard: int):
    """Integer-numerator masses of every depth-``k`` square over a common denominator.

    The sweep extends words level by level and merges those sharing a
    constraint tuple; merging sums their masses, which is precisely the
    square's measure.  No marginal shortcut is taken.  Returns
    ({tuple: numerator}, denominator).
    """
    l = l_of_k(c, k).l
    depth = max(k, l)
    den = _common_denominator(c, p, depth)
    masses = {((), ()): den}
    for h in range(1, depth + 1):
        lv = level_at(c, h)
        vec = p.vector_at(h)
        scale_den = 1
        for v in vec.values():
            scale_den = scale_den * v.denominator // math.gcd(scale_den, v.denominator)
        weights = [
            (i, j, int(vec[(i, j)] * scale_den)) for (i, j) in lv.digits
        ]
        new: dict = {}
        for (ip, jp), num in masses.items():
            scaled = num // scale_den
            for (i, j, w) in weights:
                if w == 0:
                    continue
                key = (ip + (i,) if h <= l else ip, jp + (j,) if h <= k else jp)
                new[key] = new.get(key, 0) + scaled * w
        if len(new) > guard:
            raise GuardExceeded(f"mass sweep at depth {k} exceeds guard {guard}")
        masses = new
    return masses, den


def brute_square_masses(c: Construction, p: ProbAssignment, k: int,
                        guard: int = DEFAULT_GUARD) -> dict:
    """Exact mass of every depth-``k`` square as {tuple: Fraction}."""
    masses, den = _brute_numerators(c, p, k, guard)
    return {key: Fraction(num, den) for key, num in masses.items()}


def brute_measure(c: Construction, p: ProbAssignment, sq: ApproxSquare,
                  guard: int = DEFAULT_GUARD) -> Fraction:
    """Exact measure of one approximate square by direct word summation."""
    masses = brute_square_masses(c, p, sq.k, guard)
    return masses.get((sq.i_prefix, sq.j_prefix), Fraction(0))


def brute_entropy(c: Construction, p: ProbAssignment, k: int,
                  guard: int = DEFAULT_GUARD) -> float:
    """Shannon entropy (nats) of the depth-``k`` square masses, summed directly."""
    masses, den = _brute_numerators(c, p, k, guard)
    return _entropy_of_numerators(masses.values(), den)


def _entropy_of_numerators(numerators, den: int) -> float:
    log_den = math.log(den)
    fden = float(den)
    return math.fsum(
        -(num / fden) * (math.log(num) - log_den) for num in numerators if num > 0
    )


@dataclass(frozen=True)
class DyadicEntropy:
    n: int
    entropy: float
    depth_used: int           # approximate-square depth backing the cell masses
    straddle_mass: float      # mass of squares crossing a cell boundary


def dyadic_entropy(c: Construction, p: ProbAssignment, n: int,
                   guard: int = DEFAULT_GUARD) -> DyadicEntropy:
    """Entropy of the measure over the dyadic 2^-n grid.

    Cell masses are approximated by aggregating depth-``k(2^-n)+2``
    approximate squares onto the cell containing their lower-left corner.
    Squares that straddle a cell boundary are reported: their total mass
    bounds the aggregation error.
    """
    delta = Fraction(1, 2 ** n)
    depth = k_of_delta(c, delta) + 2
    l = l_of_k(c, depth).l
    masses, den = _brute_numerators(c, p, depth, guard)
    nl = n_product(c, l)
    mk = m_product(c, depth)
    scale = 2 ** n
    cells: dict = {}
    straddle = 0
    for (ip, jp), num in masses.items():
        if num == 0:
            continue
        xn = 0
        for h, i in enumerate(ip, start=1):
            xn = xn * level_at(c, h).n + i
        yn = 0
        for h, j in enumerate(jp, start=1):
            yn = yn * level_at(c, h).m + j
        # lower-left corner cell; flag squares whose far corner leaves it
        ax = (xn * scale) // nl
        ay = (yn * scale) // mk
        if ((xn + 1) * scale - 1) // nl != ax or ((yn + 1) * scale - 1) // mk != ay:
            straddle += num
        key = (ax, ay)
        cells[key] = cells.get(key, 0) + num
    return DyadicEntropy(
        n=n,
        entropy=_entropy_of_numerators(cells.values(), den),
        depth_used=depth,
        straddle_mass=straddle / den,
    )


# ---------------------------------------------------------------------------
# local dimension sampling
# ---------------------------------------------------------------------------

def _sample_word(c: Construction, p: ProbAssignment, seed, index: int, depth: int):
    """Word ``index`` of the sample stream: digits drawn level-wise from p."""
    rng = random.Random(f"{seed}:{index}")
    word = []
    for h in range(1, depth + 1):
        vec = p.vector_at(h)
        u = Fraction(rng.getrandbits(64), 2 ** 64)
        acc = Fraction(0)
        chosen = None
        for w in level_at(c, h).digits:
            acc += vec[w]
            if u < acc:
                chosen = w
                break
        if chosen is None:  # u landed in the residual rounding gap
            chosen = next(w for w in reversed(level_at(c, h).digits) if vec[w] > 0)
        word.append(chosen)
    return tuple(word)


def local_dim_samples(c: Construction, p: ProbAssignment, seed, count: int,
                      k_max: int) -> list:
    """Sampled local-dimension ratio sequences along measure-typical words.

    For each of ``count`` words drawn digit-wise from the measure, returns
    ``(word, ratios)`` where ``ratios[k-1] = log mu(S_k(word)) / log R_k``
    for k = 1..k_max; both logs are negative so the ratio is nonnegative.
    """
    l_top = l_of_k(c, k_max).l
    depth = max(k_max, l_top)
    msums = _log_m_sums(c)
    out = []
    for index in range(count):
        word = _sample_word(c, p, seed, index, depth)
        neg_log_p = [0.0]
        neg_log_q = [0.0]
        neg_log_qhat = [0.0]
        for h, (i, j) in enumerate(word, start=1):
            vec = p.vector_at(h)
            lv = level_at(c, h)
            q = sum(vec[(ii, jj)] for (ii, jj) in lv.digits if jj == j)
            qhat = sum(vec[(ii, jj)] for (ii, jj) in lv.digits if ii == i)
            neg_log_p.append(neg_log_p[-1] - _flog(vec[(i, j)]))
            neg_log_q.append(neg_log_q[-1] - _flog(q))
            neg_log_qhat.append(neg_log_qhat[-1] - _flog(qhat))
        ratios = []
        for k in range(1, k_max + 1):
            l = l_of_k(c, k).l
            if l <= k:
                num = neg_log_p[l] + (neg_log_q[k] - neg_log_q[l])
            else:
                num = neg_log_p[k] + (neg_log_qhat[l] - neg_log_qhat[k])
            ratios.append(num / msums.prefix(k))
        out.append((word, ratios))
    return out


def _flog(v: Fraction) -> float:
    return math.log(v.numerator) - math.log(v.denominator)
