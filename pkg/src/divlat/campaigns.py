"""Certified verification campaigns for the eta-product inequalities.

The object under test is the running logarithm

    log_sum(t, k) = sum_{j<=k} log(1 + p_j^(-1/t)),

which must stay below two families of right-hand sides: an "easy" bound
exp(k^(1-1/t) - ...) and a "hard" bound driven by the best-possible
constant C = 1.07073472...  The hard campaign at t = 2 runs to
k = 3,750,230; beyond the per-t thresholds an induction certificate
(`induction_margin`) takes over, so the finite sweep plus the
certificate covers all k.

Verification strategy (never a false pass):

1. bulk pass in float64 with explicit error envelopes: per-term
   evaluation gets a 2^-47 relative budget, block-local cumulative sums
   an i*u*sum budget, and the carried sum is Neumaier-compensated with
   an analytic 4u*|sum| allowance;
2. every k whose margin enclosure straddles zero is re-evaluated with
   mpmath interval arithmetic at the working precision (default 128
   bits), doubling up to a ceiling;
3. a comparison still undecided at the ceiling raises
   InconclusiveError.

The accumulator enclosure is checkpointed every 10^5 values of k as a
line `t k log_sum_lo log_sum_hi` in plain decimal.  Runs are
deterministic: summation blocks are aligned to absolute k, so
partitioning a range at block multiples reproduces bit-identical
enclosures, and a restarted run verifies its stream against every
stored state.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from mpmath import iv
from mpmath.libmp import to_str as _mpf_to_str

from .certify import DEFAULT_PREC, PREC_CEILING, iv_prec
from .core import PrimeTable, _ensure_small_primes
from .errors import CapacityError, InconclusiveError
from .reports import BoundReport, CampaignResult

#: per-t campaign thresholds for the hard inequality; t in 8..99 uses 8
HARD_THRESHOLDS = {2: 3_750_230, 3: 1936, 4: 155, 5: 44, 6: 20, 7: 12}

#: certified enclosure of the best-possible constant, re-derived by
#: constant_C_search (the test suite asserts containment)
ETA_CONSTANT_LO = "1.0707347245501929454"
ETA_CONSTANT_HI = "1.0707347245501929455"
ETA_CONSTANT_AT = (2, 2149)

CHECKPOINT_STRIDE = 100_000
_BLOCK = 2_000
_PER_TERM_REL = 2.0 ** -47   # covers power + log1p evaluation error
_REL_RHS = 2.0 ** -40        # envelope for the composed right-hand sides
_U = 2.0 ** -53


def hard_threshold(t: int) -> int:
    """Campaign length for the hard inequality at exponent t (>= 2)."""
    if t < 2:
        raise ValueError(f"eta exponent must be >= 2, got {t}")
    return HARD_THRESHOLDS.get(t, 8)


def eta_constant_interval():
    """Enclosure of C inside the active iv precision context."""
    return iv.mpf([ETA_CONSTANT_LO, ETA_CONSTANT_HI])


def eta_constant_upper() -> float:
    """Certified float upper bound of C."""
    with iv_prec(64):
        return math.nextafter(float(iv.mpf(ETA_CONSTANT_HI).b), math.inf)


@dataclass
class EtaAccumulator:
    """Streaming enclosure of log_sum(t, k).

    Internally a Neumaier-compensated running sum of block sums plus an
    analytic error budget: per-term evaluation gets _PER_TERM_REL
    relative, the block-local cumulative sum i*u*cs, the compensated
    carry 4u*|sum|.  `extend` consumes the next primes in ascending
    order and returns per-k certified lower/upper arrays.

    Summation blocks are aligned to absolute k, so any two runs whose
    feed boundaries fall on BLOCK multiples (checkpoint strides do)
    produce bit-identical enclosures; other slicings regroup the
    block-local sums and stay conservative but not bitwise equal.
    """

    t: int
    k: int = 0
    sum_mid: float = 0.0
    sum_comp: float = 0.0
    eval_err: float = 0.0

    #: slicing the stream at multiples of this reproduces bit-identical
    #: enclosures (arbitrary slicing stays *correct*, merely regrouped)
    BLOCK = _BLOCK

    @property
    def value(self) -> float:
        return self.sum_mid + self.sum_comp

    @property
    def width_bound(self) -> float:
        """Certified |value - true log_sum| bound."""
        return self.eval_err + 4.0 * _U * abs(self.value) + 2.0 * np.spacing(abs(self.value))

    @property
    def lo(self) -> float:
        return math.nextafter(self.value - self.width_bound, -math.inf)

    @property
    def hi(self) -> float:
        return math.nextafter(self.value + self.width_bound, math.inf)

    @property
    def state(self) -> tuple[int, float, float, float]:
        """Exact internal state for seeding a contiguous continuation."""
        return (self.k, self.sum_mid, self.sum_comp, self.eval_err)

    @classmethod
    def from_state(cls, t: int, state: tuple[int, float, float, float]) -> "EtaAccumulator":
        k, mid, comp, err = state
        return cls(t=t, k=k, sum_mid=mid, sum_comp=comp, eval_err=err)

    def extend(self, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        primes = np.asarray(primes, dtype=np.float64)
        n = primes.size
        lo_out = np.empty(n)
        hi_out = np.empty(n)
        pos = 0
        while pos < n:
            step = min(_BLOCK - (self.k % _BLOCK), n - pos)
            term = np.log1p(primes[pos:pos + step] ** (-1.0 / self.t))
            cs = np.cumsum(term)
            idx = np.arange(1, step + 1, dtype=np.float64)
            base = self.value
            w = (self.width_bound + (_PER_TERM_REL + _U * idx) * cs
                 + 4.0 * np.spacing(base + cs))
            lo_out[pos:pos + step] = np.nextafter(base + (cs - w), -np.inf)
            hi_out[pos:pos + step] = np.nextafter(base + (cs + w), np.inf)
            block_sum = float(cs[-1])
            self.eval_err += (_PER_TERM_REL + _U * step) * block_sum
            # Neumaier-compensated accumulation of the block sums
            total = self.sum_mid + block_sum
            if abs(self.sum_mid) >= abs(block_sum):
                self.sum_comp += (self.sum_mid - total) + block_sum
            else:
                self.sum_comp += (block_sum - total) + self.sum_mid
            self.sum_mid = total
            self.k += step
            pos += step
        return lo_out, hi_out


class CheckpointFile:
    """Line-oriented campaign checkpoints: `t k log_sum_lo log_sum_hi`.

    Floats are serialized with repr (shortest round-tripping decimal).
    A restarted campaign replays its deterministic stream and verifies
    it against every stored state; a mismatch means the table or the
    file is corrupt and raises instead of silently diverging.
    """

    def __init__(self, path):
        self.path = Path(path)

    def load(self) -> dict[int, dict[int, tuple[float, float]]]:
        states: dict[int, dict[int, tuple[float, float]]] = {}
        if not self.path.exists():
            return states
        for line in self.path.read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            t_s, k_s, lo_s, hi_s = line.split()
            states.setdefault(int(t_s), {})[int(k_s)] = (float(lo_s), float(hi_s))
        return states

    def states_for(self, t: int) -> dict[int, tuple[float, float]]:
        return self.load().get(t, {})

    def append(self, t: int, k: int, lo: float, hi: float) -> None:
        with self.path.open("a") as fh:
            fh.write(f"{t} {k} {lo!r} {hi!r}\n")


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------

def _easy_rhs_mid(t: int, karr: np.ndarray) -> np.ndarray:
    rhs = karr ** (1.0 - 1.0 / t)
    sub = math.log(t) / t
    if t == 2:
        return np.where(karr <= 55, rhs, rhs - sub)
    return rhs - sub


def _easy_rhs_iv(t: int, k: int):
    kk = iv.mpf(k)
    rhs = iv.exp(iv.log(kk) * (1 - iv.mpf(1) / t))
    if not (t == 2 and k <= 55):
        rhs -= iv.log(iv.mpf(t)) / t
    return rhs


def _hard_factor_mid(t: int, karr: np.ndarray) -> np.ndarray:
    """k^(1-1/t) / ((1-1/t) logplus(k)^(1/t)); multiply by C for the rhs."""
    ex = 1.0 - 1.0 / t
    logplus = np.log(np.maximum(karr, 2.0))
    return karr ** ex / (ex * logplus ** (1.0 / t))


def _hard_rhs_iv(t: int, k: int, c):
    ex = 1 - iv.mpf(1) / t
    logplus = iv.log(iv.mpf(max(k, 2)))
    rhs = c * iv.exp(iv.log(iv.mpf(k)) * ex) / (ex * iv.exp(iv.log(logplus) / t))
    if t != 2:
        rhs -= iv.log(iv.mpf(t)) / t
    return rhs


def eta_log_enclosures(t: int, ks: list[int], table: PrimeTable) -> dict[int, "iv.mpf"]:
    """Interval enclosures of log_sum(t, k) at the requested ks.

    Must run inside an active iv_prec context; one cumulative pass up to
    max(ks).
    """
    want = set(ks)
    out = {}
    e = iv.mpf(-1) / t
    total = iv.mpf(0)
    for j in range(max(ks)):
        total += iv.log(1 + iv.exp(iv.log(iv.mpf(int(table.primes[j]))) * e))
        if j + 1 in want:
            out[j + 1] = total
    return out


# ---------------------------------------------------------------------------
# campaign engine
# ---------------------------------------------------------------------------

def _run_campaign(mode: str, t: int, k_max: int, table: PrimeTable,
                  c_value: str | float | None = None,
                  prec: int = DEFAULT_PREC,
                  checkpoint: str | Path | None = None,
                  k_start: int = 0,
                  seed: tuple[int, float, float, float] | None = None) -> CampaignResult:
    """Shared sweep for the easy (strict <) and hard (<=) inequalities.

    Returns margins measured at the conservative outer interval ends.
    `k_start`/`seed` support partitioned runs: the seed is the
    EtaAccumulator.state captured at k_start by a previous contiguous
    run (bit-identical continuation).
    """
    if t < 2:
        raise ValueError(f"eta exponent must be >= 2, got {t}")
    if k_max < 1 or k_max <= k_start:
        raise ValueError(f"empty campaign range ({k_start}, {k_max}]")
    if k_start > 0 and seed is None:
        raise ValueError("a nonzero k_start needs the accumulator state at k_start")
    if table.count < k_max:
        raise CapacityError(
            f"table holds {table.count} primes, campaign needs {k_max}")
    if mode == "hard":
        c_str = ETA_CONSTANT_HI if c_value is None else c_value
        c_float = float(c_str)
    t0 = time.perf_counter()
    cp = CheckpointFile(checkpoint) if checkpoint else None
    stored = cp.states_for(t) if cp else {}

    acc = EtaAccumulator.from_state(t, seed) if seed else EtaAccumulator(t=t)
    if acc.k != k_start:
        raise ValueError(f"seed state is at k = {acc.k}, campaign starts at {k_start}")
    strict = mode == "easy"
    worst_margin = math.inf
    worst_k = None
    sup_ratio = -math.inf
    sup_k = None
    pending: list[int] = []
    violations: list[int] = []

    k = k_start
    while k < k_max:
        end = min(k + CHECKPOINT_STRIDE - (k % CHECKPOINT_STRIDE), k_max)
        lo_arr, hi_arr = acc.extend(table.primes[k:end])
        karr = np.arange(k + 1, end + 1, dtype=np.float64)
        if mode == "easy":
            rhs = _easy_rhs_mid(t, karr)
        else:
            fac = _hard_factor_mid(t, karr)
            rhs = c_float * fac
            if t != 2:
                rhs -= math.log(t) / t
        w = _REL_RHS * np.abs(rhs) + 4.0 * np.spacing(np.abs(rhs))
        margin_lo = (rhs - w) - hi_arr
        margin_hi = (rhs + w) - lo_arr

        certain_fail = margin_hi <= 0.0 if strict else margin_hi < 0.0
        unresolved = ~certain_fail & (margin_lo <= 0.0)
        decided = ~unresolved
        if np.any(decided):
            i = int(np.argmin(np.where(decided, margin_lo, np.inf)))
            if margin_lo[i] < worst_margin:
                worst_margin = float(margin_lo[i])
                worst_k = int(karr[i])
        violations.extend(int(x) for x in karr[certain_fail])
        pending.extend(int(x) for x in karr[unresolved & ~certain_fail])

        if mode == "easy":
            ratio = hi_arr / np.maximum(rhs - w, 1e-300)
        else:
            extra = 0.0 if t == 2 else math.log(t) / t
            ratio = (hi_arr + extra) / np.maximum((fac * (1.0 - _REL_RHS)), 1e-300)
        j = int(np.argmax(ratio))
        if ratio[j] > sup_ratio:
            sup_ratio = float(ratio[j])
            sup_k = int(karr[j])

        if cp is not None and end % CHECKPOINT_STRIDE == 0:
            known = stored.get(end)
            state = (acc.lo, acc.hi)
            if known is not None:
                if known != state:
                    raise ValueError(
                        f"checkpoint mismatch at t={t}, k={end}: stored {known}, "
                        f"recomputed {state}")
            else:
                cp.append(t, end, acc.lo, acc.hi)
        k = end

    # escalation pass: interval arithmetic at doubling precision
    beyond_default = 0
    todo = sorted(set(pending))
    level = prec
    while todo:
        if level > PREC_CEILING:
            raise InconclusiveError(
                f"{len(todo)} comparisons at t={t} undecidable at "
                f"precision ceiling {PREC_CEILING} bits (first k={todo[0]})")
        still = []
        with iv_prec(level):
            enclosures = eta_log_enclosures(t, todo, table)
            if mode == "hard":
                c_iv = iv.mpf(c_str)
            for kk in todo:
                lhs = enclosures[kk]
                rhs_iv = (_easy_rhs_iv(t, kk) if mode == "easy"
                          else _hard_rhs_iv(t, kk, c_iv))
                m = rhs_iv - lhs
                m_lo, m_hi = float(m.a), float(m.b)
                if m_lo > 0.0:
                    if m_lo < worst_margin:
                        worst_margin, worst_k = m_lo, kk
                elif (m_hi <= 0.0) if strict else (m_hi < 0.0):
                    violations.append(kk)
                    if m_lo < worst_margin:
                        worst_margin, worst_k = m_lo, kk
                else:
                    still.append(kk)
        if still and level == prec:
            beyond_default = len(still)
        todo = still
        level *= 2

    passed = not violations and worst_margin > 0.0
    return CampaignResult(
        label=f"eta-{mode}",
        t_range=(t, t),
        k_range=(k_start + 1, k_max),
        passed=passed,
        worst_margin=worst_margin,
        argmin=(t, worst_k),
        sup_ratio=sup_ratio,
        arg_sup=(t, sup_k),
        wall_time=time.perf_counter() - t0,
        inconclusive=beyond_default,
    )


def verify_c_easy(t: int, k_max: int, table: PrimeTable,
                  prec: int = DEFAULT_PREC,
                  checkpoint: str | Path | None = None,
                  k_start: int = 0,
                  seed: tuple[int, float, float, float] | None = None) -> CampaignResult:
    """Strict inequality log_sum(t,k) < k^(1-1/t) [- log(t)/t] for k <= k_max.

    The subtracted log(t)/t term is dropped only for t = 2, k <= 55.
    """
    return _run_campaign("easy", t, k_max, table, prec=prec,
                         checkpoint=checkpoint, k_start=k_start, seed=seed)


def verify_c_hard(t: int, k_max: int, table: PrimeTable,
                  C: str | float | None = None,
                  prec: int = DEFAULT_PREC,
                  checkpoint: str | Path | None = None,
                  k_start: int = 0,
                  seed: tuple[int, float, float, float] | None = None) -> CampaignResult:
    """log_sum(t,k) <= C k^(1-1/t)/((1-1/t) logplus(k)^(1/t)) - [t>2] log(t)/t.

    C defaults to the certified upper end of the best-possible constant;
    pass a decimal string to pin a different constant exactly.  At the
    attained point (2, 2149) the margin is the gap between the supplied
    C and the true supremum, so a C below the certified upper end cannot
    verify.
    """
    return _run_campaign("hard", t, k_max, table, c_value=C, prec=prec,
                         checkpoint=checkpoint, k_start=k_start, seed=seed)


# ---------------------------------------------------------------------------
# the best-possible constant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantC:
    """Certified supremum of C_required(t,k) over the campaign box.

    lower/upper are outward-rounded floats; lower_decimal/upper_decimal
    render the underlying interval endpoints to 30 digits (the interval
    itself is far narrower than that at the default precision).
    """

    value: float
    attained_at: tuple[int, int]
    lower: float
    upper: float
    lower_decimal: str
    upper_decimal: str
    runner_up: float
    runner_up_at: tuple[int, int]


#: float-pass window: candidates within this much of the running best
#: survive to the interval phase (also bounds the runner-up search)
_CAND_WINDOW = 1e-6


def constant_C_search(t_max: int, table: PrimeTable,
                      prec: int = DEFAULT_PREC) -> ConstantC:
    """Supremum and argmax of

        C_required(t,k) = (log_sum + [t>2] log(t)/t) (1-1/t) logplus(k)^(1/t) / k^(1-1/t)

    over t = 2..t_max with k up to the per-t campaign threshold.  The
    float64 pass prunes to a candidate window, then interval arithmetic
    separates the winner from the runner-up.
    """
    if t_max < 99:
        raise ValueError(f"scan must cover t up to 99, got t_max = {t_max}")
    need = hard_threshold(2)
    if table.count < need:
        raise CapacityError(f"table holds {table.count} primes, need {need}")

    best_lo = -math.inf
    candidates: list[tuple[float, float, int, int]] = []  # (chi, clo, t, k)
    for t in range(2, t_max + 1):
        k_max = hard_threshold(t)
        acc = EtaAccumulator(t=t)
        extra = 0.0 if t == 2 else math.log(t) / t
        k = 0
        while k < k_max:
            end = min(k + CHECKPOINT_STRIDE, k_max)
            lo_arr, hi_arr = acc.extend(table.primes[k:end])
            karr = np.arange(k + 1, end + 1, dtype=np.float64)
            fac = 1.0 / _hard_factor_mid(t, karr)
            wf = _REL_RHS * fac
            chi = (hi_arr + extra) * (fac + wf)
            clo = (lo_arr + extra) * (fac - wf)
            lo_best_here = float(np.max(clo))
            if lo_best_here > best_lo:
                best_lo = lo_best_here
            keep = chi >= best_lo - _CAND_WINDOW
            for i in np.flatnonzero(keep):
                candidates.append((float(chi[i]), float(clo[i]), t, int(karr[i])))
            candidates = [c for c in candidates if c[0] >= best_lo - _CAND_WINDOW]
            k = end

    finalists = [(t, k) for chi, _, t, k in candidates if chi >= best_lo - _CAND_WINDOW]
    level = prec
    while True:
        if level > PREC_CEILING:
            raise InconclusiveError(
                f"supremum candidates inseparable at ceiling {PREC_CEILING} bits")
        with iv_prec(level):
            intervals: dict[tuple[int, int], "iv.mpf"] = {}
            for t in sorted({t for t, _ in finalists}):
                ks = sorted(k for tt, k in finalists if tt == t)
                encl = eta_log_enclosures(t, ks, table)
                extra_iv = iv.mpf(0) if t == 2 else iv.log(iv.mpf(t)) / t
                ex = 1 - iv.mpf(1) / t
                for k in ks:
                    logplus = iv.log(iv.mpf(max(k, 2)))
                    f = ex * iv.exp(iv.log(logplus) / t) / iv.exp(iv.log(iv.mpf(k)) * ex)
                    intervals[(t, k)] = (encl[k] + extra_iv) * f
            winner = max(intervals, key=lambda tk: float(intervals[tk].a))
            win = intervals[winner]
            others = {tk: v for tk, v in intervals.items() if tk != winner}
            runner = max(others, key=lambda tk: float(others[tk].b)) if others else None
            separated = runner is None or float(others[runner].b) < float(win.a)
            if separated:
                return ConstantC(
                    value=float(win.mid),
                    attained_at=winner,
                    lower=math.nextafter(float(win.a), -math.inf),
                    upper=math.nextafter(float(win.b), math.inf),
                    lower_decimal=_mpf_to_str(win._mpi_[0], 30),
                    upper_decimal=_mpf_to_str(win._mpi_[1], 30),
                    runner_up=math.nextafter(float(others[runner].b), math.inf)
                    if runner else -math.inf,
                    runner_up_at=runner if runner else (-1, -1),
                )
        level *= 2


# ---------------------------------------------------------------------------
# side conditions
# ---------------------------------------------------------------------------

def ln2_bound_check(t: int, k: int) -> BoundReport:
    """Side chain used for t >= 100, k <= 56:

    log(t)/t + log_sum(t,k) <= log(100)/100 + k log 2 < 0.74 k <= k^(1-1/t).
    """
    if t < 100:
        raise ValueError(f"side chain applies to t >= 100, got {t}")
    if not 1 <= k <= 56:
        raise ValueError(f"side chain applies to 1 <= k <= 56, got {k}")
    primes = _ensure_small_primes(k)[:k]
    with iv_prec(DEFAULT_PREC):
        lhs = iv.log(iv.mpf(t)) / t
        e = iv.mpf(-1) / t
        for p in primes:
            lhs += iv.log(1 + iv.exp(iv.log(iv.mpf(p)) * e))
        mid = iv.log(iv.mpf(100)) / 100 + k * iv.log(iv.mpf(2))
        cap = iv.mpf("0.74") * k
        kpow = iv.exp(iv.log(iv.mpf(k)) * (1 - iv.mpf(1) / t))
        first = (lhs <= mid) is True
        second = (mid < cap) is True
        third = (cap <= kpow) is True
        return BoundReport(
            exact_value=float(lhs.b),
            bound_value=float(cap.b),
            slack=float((cap - lhs).a),
            holds=first and second and third,
            context={"t": t, "k": k, "chain": [first, second, third],
                     "middle": float(mid.b), "k_pow": float(kpow.a),
                     "check": "log2-side-chain"},
        )


def induction_margin(t: int, k: int, table: PrimeTable | None = None,
                     variant: str = "hard") -> BoundReport:
    """Certify the induction step's sufficient condition at (t, k).

    easy: 1/log(k) < (1 - 1/t)^t, valid from k = 57 on;
    hard: log(k) > C/((t-1)(C-1)), valid just past the per-t threshold.
    A negative margin signals the threshold table is wrong.
    """
    if variant not in ("easy", "hard"):
        raise ValueError(f"variant must be 'easy' or 'hard', got {variant!r}")
    if t < 2:
        raise ValueError(f"eta exponent must be >= 2, got {t}")
    if variant == "easy" and k < 57:
        raise ValueError(f"easy induction certificate starts at k = 57, got {k}")
    if variant == "hard" and k <= hard_threshold(t):
        raise ValueError(
            f"hard induction certificate applies beyond the threshold "
            f"{hard_threshold(t)}, got k = {k}")
    with iv_prec(DEFAULT_PREC):
        if variant == "easy":
            lhs = 1 / iv.log(iv.mpf(k))
            rhs = iv.exp(iv.log(1 - iv.mpf(1) / t) * t)
            margin = rhs - lhs
            holds = (lhs < rhs) is True
        else:
            c = eta_constant_interval()
            lhs = c / ((t - 1) * (c - 1))
            rhs = iv.log(iv.mpf(k))
            margin = rhs - lhs
            holds = (lhs < rhs) is True
        return BoundReport(
            exact_value=float(lhs.b),
            bound_value=float(rhs.b),
            slack=float(margin.a),
            holds=holds,
            context={"t": t, "k": k, "variant": variant,
                     "check": "induction-step-condition"},
        )


def concavity_threshold(t: int) -> float:
    """exp((2/t - 1 + sqrt(5 - 4/t)) / (2 (1 - 1/t))).

    Above this point the map x^(1-1/t)/log(x)^(1/t) is concave; the
    value stays below 6 for every t >= 2 (limit exp((sqrt(5)-1)/2)).
    """
    if t < 2:
        raise ValueError(f"threshold defined for t >= 2, got {t}")
    num = 2.0 / t - 1.0 + math.sqrt(5.0 - 4.0 / t)
    return math.exp(num / (2.0 * (1.0 - 1.0 / t)))
