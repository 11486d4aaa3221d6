"""Self-affine Moran measures: masses, entropy, and dimension formulas.

A measure is defined by per-level probability vectors ``p_k`` on the digit
sets.  The cylinder of a word ``w_1 ... w_k`` has mass ``p_1(w_1)...p_k(w_k)``
and the approximate square identified by ``(i_1..i_l, j_1..j_k)`` has mass

    p_1(w_1)...p_l(w_l) * q_{l+1}(j_{l+1})...q_k(j_k)        (l <= k)
    p_1(w_1)...p_k(w_k) * qhat_{k+1}(i_{k+1})...qhat_l(i_l)  (l > k)

where ``q_k(j) = sum_i p_k(i, j)`` is the row marginal and
``qhat_k(i) = sum_j p_k(i, j)`` the column marginal.  (The two marginals sum
over the complementary coordinate; mass conservation over the squares of a
fixed depth forces this reading, and the brute-force oracle checks it.)

The depth-``k`` entropy ``H_k`` is the Shannon entropy of the depth-``k``
square masses, taken with the positive sign convention ``H_k >= 0``:

    H_k = sum_{h<=l} H(p_h) + sum_{l<h<=k} H(q_h)        (l <= k)
    H_k = sum_{h<=k} H(p_h) + sum_{k<h<=l} H(qhat_h)     (l > k)

with ``0 log 0 = 0`` throughout.  The entropy, Hausdorff and packing
dimensions of the measure are the lower/upper limits of
``H_k / sum_{i<=k} log m_i``; for an eventually periodic construction and
measure the per-level entropies are periodic, the partial sums are linear
plus a bounded term, and the ratio converges to a single limit computable
from one period (see :func:`entropy_dimensions`).

Probabilities are exact rationals end to end; logs of their integer
numerators/denominators enter only at the final summation step, combined
with ``math.fsum`` so results are deterministic.

Separation conditions (frequency, boundary, measure) are checked over the
periodic pattern and gate whether the Hausdorff/packing formula values are
reported as unconditional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .construction import (
    Construction,
    Level,
    PeriodicSums,
    _log_m_sums,
    _log_n_sums,
    l_of_k,
    level_at,
    pattern_index,
    period_products,
)
from .counting import count_approx_squares, digit_stats
from .errors import (
    AspectOrderViolated,
    DomainError,
    FiberCountsNotConstant,
    InvalidSquare,
    InvalidWord,
    ValidationError,
    WindowTooSmall,
)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class ProbAssignment:
    """Per-level probability vectors on the pattern levels of a construction.

    ``vectors[t]`` is a mapping digit -> Fraction for pattern level ``t``
    (preperiod first, then one period); levels beyond the pattern reuse the
    periodic tail.  Weights may be zero on part of the digit set but must
    sum to exactly 1 per level.
    """

    preperiod_len: int
    period_len: int
    vectors: tuple

    def vector_at(self, k: int) -> dict:
        """The probability vector of stage ``k`` (1-indexed)."""
        if k <= self.preperiod_len:
            return self.vectors[k - 1]
        return self.vectors[
            self.preperiod_len + (k - self.preperiod_len - 1) % self.period_len
        ]


def prob_assignment(c: Construction, weights) -> ProbAssignment:
    """Validate per-pattern-level digit weights and build a :class:`ProbAssignment`.

    ``weights`` is a sequence aligned with ``c.pattern``; each entry maps a
    digit (i, j) to a nonnegative rational weight.  Every level must sum to
    exactly 1.
    """
    pattern = c.pattern
    if len(weights) != len(pattern):
        raise ValidationError(
            f"expected {len(pattern)} probability vectors, got {len(weights)}"
        )
    vectors = []
    for t, (lv, vec) in enumerate(zip(pattern, weights), start=1):
        digits = lv.digit_set()
        clean = {}
        for w, value in vec.items():
            w = tuple(w)
            if w not in digits:
                raise ValidationError(
                    f"level {t}: weight given for digit {w} not in the digit set"
                )
            value = Fraction(value)
            if value < 0:
                raise ValidationError(f"level {t}: negative weight for digit {w}")
            clean[w] = value
        total = sum(clean.values(), ZERO)
        if total != 1:
            raise ValidationError(f"level {t}: weights sum to {total}, expected 1")
        vectors.append({w: clean.get(w, ZERO) for w in lv.digits})
    return ProbAssignment(len(c.preperiod), len(c.period), tuple(vectors))


def uniform_assignment(c: Construction) -> ProbAssignment:
    """Uniform weight 1/r on every digit of every level."""
    return prob_assignment(
        c,
        [{w: Fraction(1, len(lv.digits)) for w in lv.digits} for lv in c.pattern],
    )


@dataclass(frozen=True)
class Marginals:
    q: dict      # row j -> total mass of row j
    qhat: dict   # column i -> total mass of column i


def marginals(p_k: dict, level: Level) -> Marginals:
    """Row and column marginals of one level's probability vector."""
    q: dict = {}
    qhat: dict = {}
    for (i, j) in level.digits:
        w = p_k.get((i, j), ZERO)
        q[j] = q.get(j, ZERO) + w
        qhat[i] = qhat.get(i, ZERO) + w
    return Marginals(q=dict(sorted(q.items())), qhat=dict(sorted(qhat.items())))


def cylinder_mass(c: Construction, p: ProbAssignment, word) -> Fraction:
    """Exact mass ``p_1(w_1)...p_k(w_k)`` of the cylinder of ``word``.

    The empty word is the whole symbol space and has mass 1.
    """
    mass = ONE
    for h, w in enumerate(word, start=1):
        w = tuple(w)
        if w not in level_at(c, h).digit_set():
            raise InvalidWord(f"digit {w} not in the level-{h} digit set")
        mass *= p.vector_at(h)[w]
    return mass


@dataclass(frozen=True)
class ApproxSquare:
    """Symbolic constraint picking one approximate square at depth ``k``.

    ``i_prefix`` has length ``l = l(k)`` and ``j_prefix`` length ``k``; for
    shared levels the pair must be a digit, for one-sided levels the fixed
    coordinate must be occupied.
    """

    k: int
    l: int
    i_prefix: tuple
    j_prefix: tuple


def approx_square(c: Construction, k: int, i_prefix, j_prefix) -> ApproxSquare:
    """Validate a constraint tuple against the construction."""
    l = l_of_k(c, k).l
    i_prefix, j_prefix = tuple(i_prefix), tuple(j_prefix)
    if len(i_prefix) != l or len(j_prefix) != k:
        raise InvalidSquare(
            f"depth {k} needs {l} column digits and {k} row digits, "
            f"got {len(i_prefix)} and {len(j_prefix)}"
        )
    for h in range(1, max(k, l) + 1):
        st = digit_stats(level_at(c, h))
        if h <= min(k, l):
            if (i_prefix[h - 1], j_prefix[h - 1]) not in level_at(c, h).digit_set():
                raise InvalidSquare(
                    f"level {h}: ({i_prefix[h-1]}, {j_prefix[h-1]}) not a digit"
                )
        elif h <= l:
            if i_prefix[h - 1] not in st.cols:
                raise InvalidSquare(f"level {h}: column {i_prefix[h-1]} unoccupied")
        else:
            if j_prefix[h - 1] not in st.rows:
                raise InvalidSquare(f"level {h}: row {j_prefix[h-1]} unoccupied")
    return ApproxSquare(k=k, l=l, i_prefix=i_prefix, j_prefix=j_prefix)


def square_of_word(c: Construction, k: int, word) -> ApproxSquare:
    """The depth-``k`` approximate square containing the cylinder of ``word``."""
    l = l_of_k(c, k).l
    word = [tuple(w) for w in word]
    if len(word) < max(k, l):
        raise InvalidWord(f"need a word of length >= {max(k, l)}")
    return approx_square(
        c, k, [w[0] for w in word[:l]], [w[1] for w in word[:k]]
    )


def approx_square_mass(c: Construction, p: ProbAssignment, sq: ApproxSquare) -> Fraction:
    """Exact measure of an approximate square (product of digit and marginal masses)."""
    mass = ONE
    shared = min(sq.k, sq.l)
    for h in range(1, shared + 1):
        mass *= p.vector_at(h)[(sq.i_prefix[h - 1], sq.j_prefix[h - 1])]
    if sq.l <= sq.k:
        for h in range(sq.l + 1, sq.k + 1):
            marg = marginals(p.vector_at(h), level_at(c, h))
            mass *= marg.q.get(sq.j_prefix[h - 1], ZERO)
    else:
        for h in range(sq.k + 1, sq.l + 1):
            marg = marginals(p.vector_at(h), level_at(c, h))
            mass *= marg.qhat.get(sq.i_prefix[h - 1], ZERO)
    return mass


# ---------------------------------------------------------------------------
# entropy
# ---------------------------------------------------------------------------

def _shannon(values) -> float:
    """Entropy (nats) of exact rational weights, deterministic via fsum."""
    terms = []
    for v in values:
        if v > 0:
            terms.append(-float(v) * (math.log(v.numerator) - math.log(v.denominator)))
    return math.fsum(terms)


def _level_entropies(c: Construction, p: ProbAssignment):
    """(H(p), H(q), H(qhat)) per pattern level."""
    out = []
    for t, lv in enumerate(c.pattern):
        vec = p.vectors[t]
        marg = marginals(vec, lv)
        out.append(
            (
                _shannon(vec[w] for w in lv.digits),
                _shannon(marg.q.values()),
                _shannon(marg.qhat.values()),
            )
        )
    return out


@dataclass(frozen=True)
class EntropyRecord:
    k: int
    h_k: float      # depth-k entropy, nats, >= 0
    ratio: float    # h_k / sum(log m_i, i <= k)


def entropy_k(c: Construction, p: ProbAssignment, k: int) -> EntropyRecord:
    """Depth-``k`` entropy of the square masses and its scale-normalised ratio."""
    if k < 1:
        raise DomainError(f"depth must be >= 1, got {k}")
    ents = _level_entropies(c, p)
    l = l_of_k(c, k).l
    terms = []
    for h in range(1, min(k, l) + 1):
        terms.append(ents[pattern_index(c, h)][0])
    if l <= k:
        for h in range(l + 1, k + 1):
            terms.append(ents[pattern_index(c, h)][1])
    else:
        for h in range(k + 1, l + 1):
            terms.append(ents[pattern_index(c, h)][2])
    h_k = math.fsum(terms)
    return EntropyRecord(k=k, h_k=h_k, ratio=h_k / _log_m_sums(c).prefix(k))


@dataclass(frozen=True)
class RatioDiagnostics:
    """Tail behaviour of a dimension ratio sweep."""

    window: int
    tail_min: float
    tail_max: float
    oscillation: float
    last: float


def _diagnose(values, window: int) -> RatioDiagnostics:
    tail = values[window // 2:]
    return RatioDiagnostics(
        window=window,
        tail_min=min(tail),
        tail_max=max(tail),
        oscillation=max(tail) - min(tail),
        last=values[-1],
    )


@dataclass(frozen=True)
class EntropyDimensions:
    lower: float
    upper: float
    diagnostics: RatioDiagnostics


def entropy_dimensions(c: Construction, p: ProbAssignment, window: int = 2000) -> EntropyDimensions:
    """Lower and upper entropy dimensions of the measure.

    For an eventually periodic construction and measure the ratio
    ``H_k / sum log m_i`` converges: both partial sums are (level-periodic)
    linear sequences plus bounded corrections, and ``l(k)`` tracks its linear
    rate within a bounded offset, so the deviation from the limit is O(1/k).
    The limit itself is assembled from one period of per-level entropies;
    the windowed sweep is returned as a diagnostic against it.
    """
    min_window = max(2 * len(c.pattern), 16)
    if window < min_window:
        raise WindowTooSmall(f"window must be >= {min_window}, got {window}")
    ents = _level_entropies(c, p)
    hp = PeriodicSums(c, [e[0] for e in ents])
    hq = PeriodicSums(c, [e[1] for e in ents])
    hqh = PeriodicSums(c, [e[2] for e in ents])
    limit = _periodic_limit(c, hp.per_total, hq.per_total, hqh.per_total)
    sweep = _entropy_ratio_values(c, p, window)
    diags = _diagnose(sweep, window)
    return EntropyDimensions(lower=limit, upper=limit, diagnostics=diags)


def _periodic_limit(c: Construction, shared: float, row_side: float, col_side: float) -> float:
    """Limit of ``(shared-part + one-sided part)/ sum log m`` for periodic data.

    ``shared`` accumulates over levels ``h <= min(k, l)`` at asymptotic rate
    ``min(1, alpha)`` per level, where ``alpha = lim l(k)/k`` is the ratio of
    the period log-sums of m and n; the one-sided part covers the remaining
    ``|l - k|`` levels.  All arguments are one-period totals.
    """
    pn, pm = period_products(c)
    s_m = _log_m_sums(c).per_total
    s_n = _log_n_sums(c).per_total
    if pn == pm:
        return shared / s_m
    alpha = s_m / s_n
    if pn > pm:          # alpha < 1: l(k) < k eventually, rows are the long side
        return (row_side + alpha * (shared - row_side)) / s_m
    return (shared + (alpha - 1) * col_side) / s_m


def _entropy_ratio_values(c: Construction, p: ProbAssignment, window: int) -> list:
    """``H_k / sum log m`` for k = 1..window, choosing the l(k) branch per k."""
    ents = _level_entropies(c, p)
    hp = PeriodicSums(c, [e[0] for e in ents])
    hq = PeriodicSums(c, [e[1] for e in ents])
    hqh = PeriodicSums(c, [e[2] for e in ents])
    msums = _log_m_sums(c)
    values = []
    for k in range(1, window + 1):
        l = l_of_k(c, k).l
        if l <= k:
            num = hp.prefix(l) + hq.range_sum(l, k)
        else:
            num = hp.prefix(k) + hqh.range_sum(k, l)
        values.append(num / msums.prefix(k))
    return values


@dataclass(frozen=True)
class SeparationFlags:
    fsc: bool
    fsc_fraction: Fraction
    bsc: bool
    bsc_fractions: tuple     # (left, right, bottom, top)
    msc: bool
    msc_max_marginal: Fraction


def check_fsc(c: Construction) -> tuple[bool, Fraction]:
    """Frequency separation: the long-run fraction of fully centred levels.

    A level is centred when no digit touches column 0, column n-1, row 0 or
    row m-1.  For a periodic pattern the limit frequency is the fraction of
    centred levels in one period; the condition holds iff it is positive.
    """
    centred = sum(1 for lv in c.period if _is_centred(lv))
    frac = Fraction(centred, len(c.period))
    return frac > 0, frac


def _is_centred(lv: Level) -> bool:
    return all(
        i not in (0, lv.n - 1) and j not in (0, lv.m - 1) for (i, j) in lv.digits
    )


def check_bsc(c: Construction) -> tuple[bool, tuple]:
    """Boundary separation: per-side frequencies of boundary-avoiding levels.

    Returns (holds, (left, right, bottom, top)) where each entry is the
    period fraction of levels whose digit set avoids that boundary column or
    row.  All four must be positive.
    """
    q = len(c.period)
    left = sum(1 for lv in c.period if all(i != 0 for (i, _) in lv.digits))
    right = sum(1 for lv in c.period if all(i != lv.n - 1 for (i, _) in lv.digits))
    bottom = sum(1 for lv in c.period if all(j != 0 for (_, j) in lv.digits))
    top = sum(1 for lv in c.period if all(j != lv.m - 1 for (_, j) in lv.digits))
    fracs = tuple(Fraction(x, q) for x in (left, right, bottom, top))
    return all(f > 0 for f in fracs), fracs


def check_msc(c: Construction, p: ProbAssignment) -> tuple[bool, Fraction]:
    """Measure separation: the largest boundary marginal over all levels.

    The condition requires a uniform bound C < 1 on
    ``max(q(0), q(m-1), qhat(0), qhat(n-1))`` for every stage, so the
    preperiod levels participate in the supremum alongside the period.
    """
    worst = ZERO
    for t, lv in enumerate(c.pattern):
        marg = marginals(p.vectors[t], lv)
        for v in (
            marg.q.get(0, ZERO),
            marg.q.get(lv.m - 1, ZERO),
            marg.qhat.get(0, ZERO),
            marg.qhat.get(lv.n - 1, ZERO),
        ):
            worst = max(worst, v)
    return worst < 1, worst


def separation_flags(c: Construction, p: ProbAssignment) -> SeparationFlags:
    fsc, ffrac = check_fsc(c)
    bsc, bfracs = check_bsc(c)
    msc, mmax = check_msc(c, p)
    return SeparationFlags(
        fsc=fsc, fsc_fraction=ffrac, bsc=bsc, bsc_fractions=bfracs,
        msc=msc, msc_max_marginal=mmax,
    )


@dataclass(frozen=True)
class MeasureDimensions:
    hausdorff: float
    packing: float
    unconditional: bool      # some separation condition certifies the formulas
    flags: SeparationFlags
    diagnostics: RatioDiagnostics


def hausdorff_packing_dims(c: Construction, p: ProbAssignment, window: int = 2000) -> MeasureDimensions:
    """Hausdorff and packing dimensions of the measure with condition flags.

    The values are the lower/upper limits of the entropy ratio (identical to
    the entropy dimensions).  They are certified unconditional when the
    frequency, boundary or measure separation condition holds; otherwise the
    formula values are still reported but flagged as conditional.
    """
    ed = entropy_dimensions(c, p, window)
    flags = separation_flags(c, p)
    return MeasureDimensions(
        hausdorff=ed.lower,
        packing=ed.upper,
        unconditional=flags.fsc or flags.bsc or flags.msc,
        flags=flags,
        diagnostics=ed.diagnostics,
    )


def uniform_fiber_measure(c: Construction) -> ProbAssignment:
    """The equal-weight measure when every occupied row has the same digit count.

    Requires n >= m and constant nonzero row counts at every level; the
    resulting measure's Hausdorff/packing dimensions then coincide with the
    attractor's (its square masses are 1/(count of squares) at every depth).
    """
    for t, lv in enumerate(c.pattern, start=1):
        st = digit_stats(lv)
        if lv.n < lv.m:
            raise AspectOrderViolated(f"pattern level {t}: n={lv.n} < m={lv.m}")
        if st.r_minus != st.r_plus:
            raise FiberCountsNotConstant(
                f"pattern level {t}: row counts range over "
                f"[{st.r_minus}, {st.r_plus}]"
            )
    return uniform_assignment(c)


def corollary_path_applies(c: Construction) -> bool:
    """Whether the constant-fiber route to the attractor's dimensions applies."""
    try:
        uniform_fiber_measure(c)
    except (AspectOrderViolated, FiberCountsNotConstant):
        return False
    flags = separation_flags(c, uniform_assignment(c))
    return flags.fsc or flags.bsc or flags.msc
