"""Conservative comparison helpers.

Exact integers/rationals live on one side of every inequality we check;
the other side is analytic.  These helpers decide such comparisons so
that a "holds" verdict can never be a rounding artifact:

* fast path: float64 with a generous ulp budget,
* escalation: mpmath interval arithmetic, doubling the working precision
  up to a ceiling,
* still undecided at the ceiling -> InconclusiveError.

Powers of two get an exact path (threshold 2^q with integral q), because
that is the only case where the two sides can be *equal*.

mpmath interval comparisons return True/False/None; None means the
enclosures overlap and the verdict must be sought at higher precision.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from typing import Callable, Optional

from mpmath import iv

from .errors import InconclusiveError

DEFAULT_PREC = 128
PREC_CEILING = 4096

#: float64 unit roundoff
U53 = 2.0 ** -53


def next_up(x: float) -> float:
    return math.nextafter(x, math.inf)


def next_down(x: float) -> float:
    return math.nextafter(x, -math.inf)


@contextmanager
def iv_prec(bits: int):
    """Temporarily set the interval-context working precision."""
    old = iv.prec
    iv.prec = bits
    try:
        yield iv
    finally:
        iv.prec = old


def escalate(decide: Callable[[int], Optional[bool]],
             start: int = DEFAULT_PREC,
             ceiling: int = PREC_CEILING,
             what: str = "comparison"):
    """Run `decide` at doubling precisions until it returns a verdict."""
    prec = start
    while prec <= ceiling:
        verdict = decide(prec)
        if verdict is not None:
            return verdict
        prec *= 2
    raise InconclusiveError(f"{what} undecidable at precision ceiling {ceiling} bits")


def exact_exponent(q) -> Fraction:
    """Exact rational value of an exponent (floats convert exactly)."""
    if isinstance(q, Fraction):
        return q
    return Fraction(q)


def int_vs_pow2(m: int, q) -> int:
    """Certified sign of m - 2^q for an integer m >= 0.

    q may be int, float, or Fraction; its exact binary value is used.
    Equality is only reachable when q is an integer, decided exactly.
    """
    if m <= 0:
        return -1  # 2^q > 0 always
    qe = exact_exponent(q)
    if qe.denominator == 1:
        e = qe.numerator
        if e >= 0:
            thr = 1 << e
            return (m > thr) - (m < thr)
        return 1  # 2^q in (0,1) and m >= 1

    def decide(prec: int) -> Optional[int]:
        with iv_prec(prec):
            lhs = iv.log(iv.mpf(m)) / iv.log(iv.mpf(2))
            rhs = iv.mpf(qe.numerator) / qe.denominator
            if (lhs > rhs) is True:
                return 1
            if (lhs < rhs) is True:
                return -1
        return None

    return escalate(decide, what=f"{m} vs 2^{float(qe)}")


def int_ge_pow2(m: int, q) -> bool:
    """Certified m >= 2^q."""
    return int_vs_pow2(m, q) >= 0


def scaled_le(lhs: int, q, rhs: int) -> bool:
    """Certified lhs * 2^q <= rhs for integers lhs, rhs >= 0."""
    if lhs == 0:
        return rhs >= 0
    if rhs <= 0:
        return False
    qe = exact_exponent(q)
    if qe.denominator == 1:
        e = qe.numerator
        if e >= 0:
            return (lhs << e) <= rhs
        return lhs <= (rhs << -e)

    def decide(prec: int) -> Optional[bool]:
        with iv_prec(prec):
            ln2 = iv.log(iv.mpf(2))
            gap = iv.log(iv.mpf(rhs)) / ln2 - iv.log(iv.mpf(lhs)) / ln2
            qq = iv.mpf(qe.numerator) / qe.denominator
            if (gap > qq) is True:
                return True
            if (gap < qq) is True:
                return False
        return None

    return escalate(decide, what=f"{lhs}*2^{float(qe)} vs {rhs}")


def fraction_le_enclosure(x: Fraction, make_interval: Callable[[int], "iv.mpf"],
                          start: int = DEFAULT_PREC) -> bool:
    """Certified x <= Y, with Y given by a precision-indexed enclosure.

    `make_interval(prec)` must return (inside an active iv_prec(prec))
    an interval guaranteed to contain the true value of Y.
    """

    def decide(prec: int) -> Optional[bool]:
        with iv_prec(prec):
            y = make_interval(prec)
            xq = iv.mpf(x.numerator) / x.denominator
            if (xq <= iv.mpf(y.a)) is True:
                return True
            if (xq > iv.mpf(y.b)) is True:
                return False
        return None

    return escalate(decide, start=start, what="rational vs enclosure")


def interval_upper(x) -> float:
    """Float upper bound of an mpmath interval (rounded away from zero)."""
    return next_up(float(x.b))


def interval_lower(x) -> float:
    return next_down(float(x.a))
