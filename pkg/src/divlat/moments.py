"""Truncated Mobius convolution, its moments, and the bound apparatus.

The central object is M(n,z) = sum of mu(d) over divisors d <= z, a step
function of z with jumps only at divisors.  A DivisorProfile caches the
sorted divisors together with prefix sums of mu, so every quantity here
(interval sums, the moments L_t, the threshold-count H_theta) reduces to
exact integer work on that table.

Two independent identities give the moment

    L_t(n) = integral of M(n,z)^t over [1, n]
           = sum_i M_i^t (d_{i+1} - d_i)          (stepwise)
           = -sum_i d_i (M_i^t - M_{i-1}^t)       (summation by parts)

and their agreement is used as a cross-check everywhere.

Analytic bounds (the eta product, the closed-form moment bounds, the
alpha(theta) solution of exp(w)/w = x) are evaluated with upward-rounded
enclosures: a bound comparison can fail only because the inequality
fails, never because of rounding.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv

from . import campaigns
from .certify import (
    DEFAULT_PREC,
    escalate,
    fraction_le_enclosure,
    int_ge_pow2,
    interval_upper,
    iv_prec,
    scaled_le,
)
from .core import Factorization, binomial, factorize, primorial
from .errors import CapacityError, DomainError, InconclusiveError
from .reports import BoundReport

#: largest n for which H_theta enumerates j = 1..n (walked gap-wise)
H_THETA_CAP = 10 ** 7

#: reference values alpha(theta), truncated to two decimals
ALPHA_REFERENCE = {
    0.1: 5.34, 0.2: 4.47, 0.3: 3.94, 0.4: 3.54, 0.5: 3.23,
    0.6: 2.96, 0.7: 2.72, 0.8: 2.50, 0.9: 2.30, 1.0: 2.11,
}


@dataclass(frozen=True)
class DivisorProfile:
    """Sorted divisors of n with prefix Mobius sums.

    mobius_prefix[i] = sum of mu(d_j) for j <= i, so M(n,z) is a prefix
    lookup at the largest divisor <= z.  divisor_omega[i] counts the
    distinct primes of d_i (for the D(n,z) envelope).
    """

    n: int
    divisors: tuple[int, ...]
    mobius_prefix: tuple[int, ...]
    divisor_omega: tuple[int, ...]
    factorization: Factorization

    @property
    def tau(self) -> int:
        return len(self.divisors)

    @property
    def omega(self) -> int:
        return self.factorization.omega

    @property
    def is_squarefree(self) -> bool:
        return self.factorization.is_squarefree


def divisor_profile(n: int | Factorization) -> DivisorProfile:
    """Build the divisor table of n with mu values and prefix sums."""
    f = n if isinstance(n, Factorization) else factorize(n)
    items = [(1, 1, 0)]
    for p, e in f.factors:
        grown = []
        for d, mu, om in items:
            grown.append((d, mu, om))
            pk = 1
            for j in range(1, e + 1):
                pk *= p
                grown.append((d * pk, -mu if j == 1 else 0, om + 1))
        items = grown
    items.sort()
    divisors = tuple(d for d, _, _ in items)
    prefix = []
    acc = 0
    for _, mu, _ in items:
        acc += mu
        prefix.append(acc)
    return DivisorProfile(
        n=f.n,
        divisors=divisors,
        mobius_prefix=tuple(prefix),
        divisor_omega=tuple(om for _, _, om in items),
        factorization=f,
    )


def mertens_truncated(profile: DivisorProfile, z: float) -> int:
    """M(n,z): Mobius sum over divisors <= z (prefix lookup)."""
    if z < 0:
        raise ValueError(f"truncation point must be >= 0, got {z}")
    i = bisect_right(profile.divisors, z)
    return 0 if i == 0 else profile.mobius_prefix[i - 1]


def interval_sum(profile: DivisorProfile, a: float, b: float) -> int:
    """Mobius sum over divisors d with a <= d <= b."""
    if not 1 <= a <= b:
        raise ValueError(f"need 1 <= a <= b, got a={a}, b={b}")
    hi = bisect_right(profile.divisors, b)
    lo = bisect_left(profile.divisors, a)
    if hi == 0:
        return 0
    upper = profile.mobius_prefix[hi - 1]
    lower = profile.mobius_prefix[lo - 1] if lo > 0 else 0
    return upper - lower


def interval_sum_check(profile: DivisorProfile, a: float, b: float) -> BoundReport:
    """|interval Mobius sum| against the central binomial C(omega, floor(omega/2))."""
    s = interval_sum(profile, a, b)
    bound = binomial(profile.omega, profile.omega // 2)
    return BoundReport(
        exact_value=s,
        bound_value=float(bound),
        slack=float(bound - abs(s)),
        holds=abs(s) <= bound,
        context={"n": profile.n, "a": a, "b": b, "check": "interval-mobius-sum"},
    )


def tau_trunc(profile: DivisorProfile, z: float) -> int:
    """tau(n,z): number of divisors <= z."""
    if z < 1:
        raise ValueError(f"truncation point must be >= 1, got {z}")
    return bisect_right(profile.divisors, z)


def max_omega_D(profile: DivisorProfile, z: float) -> int:
    """D(n,z): largest omega(d) over divisors d <= z."""
    i = tau_trunc(profile, z)
    return max(profile.divisor_omega[:i])


def tau_trunc_check(profile: DivisorProfile, z: float) -> BoundReport:
    """Squarefree bound tau(n,z) <= sum_{j<=D} C(omega, j)."""
    if not profile.is_squarefree:
        raise ValueError(f"n = {profile.n} is not squarefree")
    tz = tau_trunc(profile, z)
    d = max_omega_D(profile, z)
    bound = sum(binomial(profile.omega, j) for j in range(d + 1))
    return BoundReport(
        exact_value=tz,
        bound_value=float(bound),
        slack=float(bound - tz),
        holds=tz <= bound,
        context={"n": profile.n, "z": z, "D": d, "check": "tau-truncated"},
    )


def pe_envelope_check(profile: DivisorProfile, z: float) -> BoundReport:
    """M(n,z) within the parity envelope driven by D(n,z).

    -max over odd j <= D of C(omega-1, j)  <=  M(n,z)  <=
     max over even j <= D of C(omega-1, j); empty maxima count as 0.
    """
    if profile.n < 2:
        raise ValueError(f"envelope needs n >= 2, got n = {profile.n}")
    m = mertens_truncated(profile, z)
    d = max_omega_D(profile, z)
    om = profile.omega
    upper = max((binomial(om - 1, j) for j in range(0, d + 1, 2)), default=0)
    lower = -max((binomial(om - 1, j) for j in range(1, d + 1, 2)), default=0)
    holds = lower <= m <= upper
    return BoundReport(
        exact_value=m,
        bound_value=float(upper),
        slack=float(min(m - lower, upper - m)),
        holds=holds,
        context={"n": profile.n, "z": z, "lower": lower, "upper": upper,
                 "D": d, "check": "mertens-envelope"},
    )


def moment_stepwise(profile: DivisorProfile, t: int) -> int:
    """L_t(n) as the stepwise integral sum_i M_i^t (d_{i+1} - d_i)."""
    if t < 1:
        raise ValueError(f"moment order must be >= 1, got {t}")
    if profile.n == 1:
        return 0
    divs, pref = profile.divisors, profile.mobius_prefix
    total = 0
    for i in range(len(divs) - 1):
        m = pref[i]
        if m:
            total += m ** t * (divs[i + 1] - divs[i])
    return total


def moment_by_parts(profile: DivisorProfile, t: int) -> int:
    """L_t(n) by summation by parts: -sum_i d_i (M_i^t - M_{i-1}^t).

    Must agree with moment_stepwise on every input; the two are kept as
    mutual oracles.
    """
    if t < 1:
        raise ValueError(f"moment order must be >= 1, got {t}")
    if profile.n == 1:
        return 0
    divs, pref = profile.divisors, profile.mobius_prefix
    total = 0
    prev = 0
    for i, d in enumerate(divs):
        cur = pref[i] ** t
        if cur != prev:
            total += d * (cur - prev)
        prev = cur
    return -total


def J_rho(profile: DivisorProfile, rho: int) -> Fraction:
    """J_rho(n) = sum_i i^rho / d_i over the sorted divisors (squarefree n).

    Computed as an exact single fraction: sum_i i^rho * (n/d_i) over n.
    """
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    if not profile.is_squarefree:
        raise ValueError(f"J_rho needs squarefree n, got n = {profile.n}")
    n = profile.n
    total = sum((i + 1) ** rho * (n // d) for i, d in enumerate(profile.divisors))
    return Fraction(total, n)


def eta_log_interval(primes, t) -> "iv.mpf":
    """Enclosure of log eta = sum over p of log(1 + p^(-1/t)).

    Must be called inside an active iv_prec context; t may be any real
    >= 1 (converted exactly if int/float).
    """
    e = iv.mpf(-1) / t
    total = iv.mpf(0)
    for p in primes:
        total += iv.log(1 + iv.exp(iv.log(iv.mpf(int(p))) * e))
    return total


def eta(f: Factorization, t: float) -> float:
    """eta(n,t) = prod over p|n of (1 + p^(-1/t)), rounded up.

    The reported float is a certified upper bound of the true product.
    """
    if t < 1:
        raise ValueError(f"eta exponent must be >= 1, got {t}")
    primes = [p for p, _ in f.factors]
    with iv_prec(DEFAULT_PREC):
        return interval_upper(iv.exp(eta_log_interval(primes, t)))


def chain_check(profile: DivisorProfile, t: int, prec: int = DEFAULT_PREC) -> BoundReport:
    """Verify |L_t(n)| <= t n J_{t-1}(n) <= t n eta(n,t)^t.

    The left comparison is exact rational; the right compares the exact
    rational J_{t-1} against a certified enclosure of eta^t, escalating
    precision if the enclosure straddles it.
    """
    if t < 2:
        raise ValueError(f"chain check needs t >= 2, got {t}")
    if profile.n < 2 or not profile.is_squarefree:
        raise ValueError(f"chain check needs squarefree n >= 2, got n = {profile.n}")
    n = profile.n
    lt = abs(moment_by_parts(profile, t))
    j = J_rho(profile, t - 1)
    middle = t * n * j
    first_holds = Fraction(lt) <= middle
    primes = [p for p, _ in profile.factorization.factors]

    def eta_pow(prec_bits: int):
        return iv.exp(eta_log_interval(primes, t) * t)

    second_holds = fraction_le_enclosure(j, eta_pow, start=prec)
    with iv_prec(prec):
        bound = interval_upper(iv.mpf(t * n) * iv.exp(eta_log_interval(primes, t) * t))
    return BoundReport(
        exact_value=lt,
        bound_value=bound,
        slack=bound - float(lt),
        holds=first_holds and second_holds,
        context={"n": n, "t": t, "middle": middle,
                 "middle_holds": first_holds, "eta_holds": second_holds,
                 "check": "moment-chain"},
    )


def domination_check(f: Factorization, rho: int) -> BoundReport:
    """J_rho(n) <= J_rho(primorial(omega(n))), both exact rationals."""
    if not f.is_squarefree:
        raise ValueError(f"domination check needs squarefree n, got {f.n}")
    lhs = J_rho(divisor_profile(f), rho)
    rhs = J_rho(divisor_profile(primorial(f.omega)), rho)
    return BoundReport(
        exact_value=lhs,
        bound_value=float(rhs),
        slack=float(rhs - lhs),
        holds=lhs <= rhs,
        context={"n": f.n, "rho": rho, "primorial": primorial(f.omega),
                 "rhs_exact": rhs, "check": "primorial-domination"},
    )


def thm_bounds(f: Factorization, t: int, prec: int = DEFAULT_PREC) -> tuple[float, float]:
    """Both closed-form moment bounds, rounded up.

    First:  (1 + [t==2]) n exp( C t omega^(1-1/t) / ((1-1/t) logplus(omega)^(1/t)) )
    Second: 2n exp(t omega^(1-1/t)) when t = 2 and omega <= 55,
            n exp(t omega^(1-1/t)) otherwise,
    with logplus(x) = log(max(x, 2)) and C the eta-campaign constant.
    """
    if t < 2:
        raise ValueError(f"moment bounds need t >= 2, got {t}")
    if not f.is_squarefree:
        raise ValueError(f"moment bounds stated for squarefree n, got {f.n}")
    om = f.omega
    n = f.n
    delta2 = 1 if t == 2 else 0
    with iv_prec(prec):
        c = campaigns.eta_constant_interval()
        if om == 0:
            pow_term = iv.mpf(0)
            expo1 = iv.mpf(0)
        else:
            om_iv = iv.mpf(om)
            pow_term = iv.exp(iv.log(om_iv) * (1 - iv.mpf(1) / t))
            logplus = iv.log(iv.mpf(max(om, 2)))
            logplus_root = iv.exp(iv.log(logplus) / t)
            expo1 = c * t * pow_term / ((1 - iv.mpf(1) / t) * logplus_root)
        thm1 = interval_upper(iv.mpf((1 + delta2) * n) * iv.exp(expo1))
        factor = 2 if (t == 2 and om <= 55) else 1
        thm2 = interval_upper(iv.mpf(factor * n) * iv.exp(t * pow_term))
    return thm1, thm2


@dataclass(frozen=True)
class WSolution:
    """Solution w >= 1 of exp(w)/w = x (upper branch), x >= e."""

    x: float
    w: float


def W_solve(x: float) -> WSolution:
    """Bracketed Newton solve of exp(w)/w = x on the branch w >= 1.

    Equivalent to w - log(w) = log(x), whose left side increases on
    [1, inf).  Residual guarantee: |exp(w)/w - x| <= 1e-12 x.
    """
    if x < math.e:
        raise DomainError(f"exp(w)/w = x has no solution w >= 1 for x = {x} < e")
    y = math.log(x)
    if y <= 1.0:
        return WSolution(x=x, w=1.0)
    lo, hi = 1.0, y + math.log(y) + 1.0  # w - log w is increasing; root below hi
    while hi - math.log(hi) < y:
        hi *= 2
    w = min(max(y + math.log(y), lo), hi)
    for _ in range(100):
        g = w - math.log(w) - y
        if g > 0:
            hi = w
        else:
            lo = w
        gp = 1.0 - 1.0 / w
        step = w - g / gp if gp > 1e-18 else 0.5 * (lo + hi)
        w_next = step if lo < step < hi else 0.5 * (lo + hi)
        if abs(w_next - w) <= 1e-16 * w:
            w = w_next
            break
        w = w_next
    # |exp(w)/w - x| / x = |expm1((w - log w) - log x)|, overflow-free
    if abs(math.expm1((w - math.log(w)) - y)) > 1e-12:
        raise ArithmeticError(f"Newton iteration failed to converge for x = {x}")
    return WSolution(x=x, w=w)


def alpha_of_theta(theta: float) -> float:
    """alpha(theta) = W(e / (theta log 2)) for theta in (0, 1]."""
    if not 0 < theta <= 1:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    return W_solve(math.e / (theta * math.log(2))).w


def H_theta_exact(profile: DivisorProfile, theta: float) -> int:
    """Count of j in [1,n] with |M(n,j)| >= 2^(theta omega(n)).

    M is constant between consecutive divisors, so the count walks the
    divisor gaps instead of enumerating j.  The threshold comparison is
    certified: exact when theta*omega is an integer, interval-escalated
    otherwise.
    """
    if profile.n < 2:
        raise ValueError(f"count needs n >= 2, got {profile.n}")
    if profile.n > H_THETA_CAP:
        raise CapacityError(f"n = {profile.n} exceeds enumeration cap {H_THETA_CAP}")
    if not 0 < theta <= 1:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    q = Fraction(theta) * profile.omega
    divs, pref = profile.divisors, profile.mobius_prefix
    passes: dict[int, bool] = {}
    total = 0
    for i in range(len(divs) - 1):
        m = abs(pref[i])
        ok = passes.get(m)
        if ok is None:
            ok = passes.setdefault(m, int_ge_pow2(m, q))
        if ok:
            total += divs[i + 1] - divs[i]
    # the last divisor is n itself where M(n,n) = 0 < 2^q
    return total


def H_chain_check(profile: DivisorProfile, theta: float, t: int,
                  prec: int = DEFAULT_PREC) -> BoundReport:
    """H_theta(n) <= L_t(n) / 2^(t theta omega) for even t."""
    if t % 2 or t < 2:
        raise ValueError(f"chain needs even t >= 2, got {t}")
    h = H_theta_exact(profile, theta)
    lt = moment_by_parts(profile, t)  # >= 0 for even t
    q = Fraction(t) * Fraction(theta) * profile.omega
    holds = scaled_le(h, q, lt)
    with iv_prec(prec):
        bound = interval_upper(
            iv.mpf(lt) * iv.exp(-iv.log(iv.mpf(2)) * (iv.mpf(q.numerator) / q.denominator)))
    return BoundReport(
        exact_value=h,
        bound_value=bound,
        slack=bound - float(h),
        holds=holds,
        context={"n": profile.n, "theta": theta, "t": t, "moment": lt,
                 "check": "threshold-count-chain"},
    )


def optimal_even_t(theta: float, omega: int) -> int:
    """Even t minimizing t (omega^(-1/t) - theta log 2).

    Requires alpha - 1 < log(omega); the unconstrained optimum sits at
    t0 = log(omega)/(alpha - 1) and concavity confines the even argmin
    to the two even integers flanking t0.  Ties break to the smaller t.
    """
    alpha = alpha_of_theta(theta)
    if omega < 1 or not alpha - 1 < math.log(omega):
        raise DomainError(
            f"optimizer hypothesis alpha-1 < log(omega) fails: "
            f"alpha-1 = {alpha - 1:.6f}, log(omega) = {math.log(omega) if omega >= 1 else '-inf'}")
    t0 = math.log(omega) / (alpha - 1)
    lo_even = max(2, 2 * math.floor(t0 / 2))
    candidates = (lo_even, lo_even + 2)

    def objective(t: int) -> float:
        return t * (omega ** (-1.0 / t) - theta * math.log(2))

    g0, g1 = objective(candidates[0]), objective(candidates[1])
    scale = max(abs(g0), abs(g1), 1e-300)
    if abs(g0 - g1) > 1e-9 * scale:
        return candidates[0] if g0 < g1 else candidates[1]

    def decide(prec_bits: int):
        with iv_prec(prec_bits):
            th = iv.mpf(theta)
            ln2 = iv.log(iv.mpf(2))
            vals = [iv.mpf(tt) * (iv.exp(-iv.log(iv.mpf(omega)) / tt) - th * ln2)
                    for tt in candidates]
            if (vals[0] <= vals[1]) is True:
                return candidates[0]
            if (vals[1] < vals[0]) is True:
                return candidates[1]
        return None

    try:
        return escalate(decide, what="even-t tie break")
    except InconclusiveError:
        return candidates[0]  # indistinguishable at the ceiling: treat as tie


def corollary_exponent(theta: float, omega: int) -> float:
    """Exponent of the threshold-count bound: main term plus correction.

    -(theta log2 / alpha) omega log(omega)
      + ((alpha-1)/(1-(alpha-1)/log omega))^3
        * omega / (exp((alpha-1)/(1+(alpha-1)/log omega)) log omega).
    """
    if omega < 56:
        raise DomainError(f"bound stated for omega >= 56, got {omega}")
    alpha = alpha_of_theta(theta)
    lw = math.log(omega)
    if not alpha - 1 < lw:
        raise DomainError(
            f"hypothesis alpha-1 < log(omega) fails: {alpha - 1:.6f} >= {lw:.6f}")
    main = -(theta * math.log(2) / alpha) * omega * lw
    a1 = alpha - 1
    correction = (a1 / (1 - a1 / lw)) ** 3 * omega / (math.exp(a1 / (1 + a1 / lw)) * lw)
    return main + correction


def corollary_bound(theta: float, omega: int, n: int) -> float:
    """n exp(corollary_exponent); inf on float overflow (still an upper bound)."""
    expo = corollary_exponent(theta, omega)
    log_total = math.log(n) + expo
    if log_total > 709.0:
        return math.inf
    return math.exp(log_total)
