"""Eta-product campaigns: accumulator, checkpoints, verifiers, constant."""

import math
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest
from mpmath import iv

from divlat import (
    CampaignResult,
    CapacityError,
    EtaAccumulator,
    concavity_threshold,
    constant_C_search,
    eta_constant_upper,
    hard_threshold,
    induction_margin,
    ln2_bound_check,
    verify_c_easy,
    verify_c_hard,
)
from divlat.certify import iv_prec
from divlat.campaigns import (
    CheckpointFile,
    ETA_CONSTANT_HI,
    ETA_CONSTANT_LO,
    eta_log_enclosures,
)


def test_hard_thresholds():
    assert hard_threshold(2) == 3_750_230
    assert hard_threshold(3) == 1936
    assert hard_threshold(4) == 155
    assert hard_threshold(5) == 44
    assert hard_threshold(6) == 20
    assert hard_threshold(7) == 12
    assert hard_threshold(8) == 8
    assert hard_threshold(99) == 8


# ---------------------------------------------------------------------------
# accumulator
# ---------------------------------------------------------------------------

def test_accumulator_encloses_truth(small_table):
    acc = EtaAccumulator(t=2)
    lo, hi = acc.extend(small_table.primes[:500])
    with iv_prec(128):
        truth = eta_log_enclosures(2, [1, 137, 500], small_table)
    for k, enc in truth.items():
        assert lo[k - 1] <= float(enc.a) and float(enc.b) <= hi[k - 1]
    assert np.all(np.diff(lo) > 0)  # nondecreasing sums


def test_accumulator_slice_independence(small_table):
    """Identical enclosures when feed boundaries sit on block multiples."""
    blk = EtaAccumulator.BLOCK
    a1 = EtaAccumulator(t=3)
    lo1, hi1 = a1.extend(small_table.primes[:8 * blk])
    a2 = EtaAccumulator(t=3)
    parts = []
    for cut in ((0, blk), (blk, 3 * blk), (3 * blk, 8 * blk)):
        parts.append(a2.extend(small_table.primes[cut[0]:cut[1]]))
    lo2 = np.concatenate([p[0] for p in parts])
    hi2 = np.concatenate([p[1] for p in parts])
    assert np.array_equal(lo1, lo2) and np.array_equal(hi1, hi2)
    assert (a1.k, a1.lo, a1.hi) == (a2.k, a2.lo, a2.hi)


def test_accumulator_arbitrary_slice_still_encloses(small_table):
    """Misaligned cuts regroup sums: still a valid (wider) enclosure."""
    a1 = EtaAccumulator(t=3)
    a1.extend(small_table.primes[:10_000])
    a2 = EtaAccumulator(t=3)
    for cut in ((0, 17), (17, 4_113), (4_113, 10_000)):
        a2.extend(small_table.primes[cut[0]:cut[1]])
    with iv_prec(128):
        truth = eta_log_enclosures(3, [10_000], small_table)[10_000]
    for acc in (a1, a2):
        assert acc.lo <= float(truth.a) and float(truth.b) <= acc.hi


def test_accumulator_restart_from_state(small_table):
    full = EtaAccumulator(t=2)
    full.extend(small_table.primes[:20_000])
    head = EtaAccumulator(t=2)
    head.extend(small_table.primes[:10_000])
    resumed = EtaAccumulator.from_state(2, head.state)
    resumed.extend(small_table.primes[10_000:20_000])
    assert resumed.state == full.state
    assert (resumed.lo, resumed.hi) == (full.lo, full.hi)


def test_accumulator_width_budget(campaign_table):
    acc = EtaAccumulator(t=2)
    acc.extend(campaign_table.primes[:4_000_000])
    assert acc.hi - acc.lo <= 1e-9


# ---------------------------------------------------------------------------
# campaigns
# ---------------------------------------------------------------------------

def test_easy_single_points(small_table):
    r = verify_c_easy(2, 1, small_table)
    # log(1 + 2^(-1/2)) = 0.53480 vs 1^(1/2) = 1
    assert r.passed and r.worst_margin == pytest.approx(1 - math.log(1 + 2 ** -0.5), abs=1e-6)
    r3 = verify_c_easy(3, 1, small_table)
    expected = 1 - math.log(3) / 3 - math.log(1 + 2 ** (-1 / 3))
    assert r3.passed and r3.worst_margin == pytest.approx(expected, abs=1e-6)


def test_easy_full_box(small_table):
    worst = math.inf
    where = None
    for t in range(2, 100):
        r = verify_c_easy(t, 56, small_table)
        assert r.passed, (t, r)
        assert r.inconclusive == 0
        if r.worst_margin < worst:
            worst, where = r.worst_margin, r.argmin
    assert where == (2, 56)
    assert worst == pytest.approx(0.003870, abs=1e-5)


def test_hard_small_t(small_table):
    for t in (3, 4, 5, 6, 7, 8, 20, 99):
        r = verify_c_hard(t, hard_threshold(t), small_table)
        assert r.passed and r.inconclusive == 0, (t, r)


def test_hard_k1_with_printed_constant(small_table):
    r = verify_c_hard(4, 1, small_table, C="1.07073472")
    lhs = math.log(1 + 2 ** -0.25)
    rhs = 1.07073472 / (0.75 * math.log(2) ** 0.25) - math.log(4) / 4
    assert r.passed
    assert r.worst_margin == pytest.approx(rhs - lhs, abs=1e-6)


def test_hard_rejects_too_small_constant(small_table):
    # with C clearly below the supremum the inequality fails somewhere
    r = verify_c_hard(2, 3000, small_table, C="1.0")
    assert not r.passed
    assert r.worst_margin < 0


def test_campaign_capacity(small_table):
    with pytest.raises(CapacityError):
        verify_c_hard(2, small_table.count + 1, small_table)


def test_campaign_partition_merge(small_table):
    full = verify_c_hard(2, 70_000, small_table)
    head = EtaAccumulator(t=2)
    head.extend(small_table.primes[:30_000])
    part_a = verify_c_hard(2, 30_000, small_table)
    part_b = verify_c_hard(2, 70_000, small_table,
                           k_start=30_000, seed=head.state)
    merged = CampaignResult.merge([part_b, part_a])
    assert merged.passed == full.passed
    assert merged.worst_margin == full.worst_margin
    assert merged.argmin == full.argmin
    assert merged.sup_ratio == full.sup_ratio
    assert merged.k_range == full.k_range


def test_checkpoint_roundtrip_and_resume(tmp_path, medium_table):
    path = tmp_path / "camp.ckpt"
    first = verify_c_hard(2, 250_000, medium_table, checkpoint=path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2  # states at k = 100k and 200k
    t_s, k_s, lo_s, hi_s = lines[0].split()
    assert (int(t_s), int(k_s)) == (2, 100_000)
    assert float(lo_s) <= float(hi_s)
    again = verify_c_hard(2, 250_000, medium_table, checkpoint=path)
    assert (again.worst_margin, again.argmin, again.sup_ratio, again.passed) == \
           (first.worst_margin, first.argmin, first.sup_ratio, first.passed)
    assert len(path.read_text().splitlines()) == 2  # no duplicate lines


def test_checkpoint_mismatch_detected(tmp_path, medium_table):
    path = tmp_path / "camp.ckpt"
    CheckpointFile(path).append(2, 100_000, 1.0, 2.0)  # bogus state
    with pytest.raises(ValueError, match="checkpoint mismatch"):
        verify_c_hard(2, 150_000, medium_table, checkpoint=path)


# ---------------------------------------------------------------------------
# the constant
# ---------------------------------------------------------------------------

def test_constant_search(campaign_table):
    cc = constant_C_search(99, campaign_table)
    assert cc.attained_at == (2, 2149)
    assert 1.070734 <= cc.value <= 1.070735
    # containment in the frozen enclosure, compared in decimal
    slop = Fraction(1, 10 ** 25)
    lo = Fraction(Decimal(cc.lower_decimal))
    hi = Fraction(Decimal(cc.upper_decimal))
    assert Fraction(Decimal(ETA_CONSTANT_LO)) - slop <= lo
    assert hi <= Fraction(Decimal(ETA_CONSTANT_HI)) + slop
    # uniqueness: runner-up strictly below the winner, by more than 1e-9
    assert cc.runner_up_at == (2, 2148)
    assert cc.runner_up < cc.lower - 1e-9


def test_constant_upper_is_float_bound():
    up = eta_constant_upper()
    assert up >= float(ETA_CONSTANT_HI)


def test_c_required_at_2_1(small_table):
    # (log(1+2^(-1/2))) * (1/2) * log(2)^(1/2) / 1
    with iv_prec(128):
        enc = eta_log_enclosures(2, [1], small_table)[1]
        val = float((enc * iv.mpf(0.5) * iv.sqrt(iv.log(iv.mpf(2)))).mid)
    assert val == pytest.approx(0.22262, abs=1e-5)
    assert val < float(ETA_CONSTANT_LO)


# ---------------------------------------------------------------------------
# side conditions
# ---------------------------------------------------------------------------

def test_ln2_bound():
    r1 = ln2_bound_check(100, 1)
    assert r1.holds
    assert math.log(100) / 100 + math.log(2) == pytest.approx(0.7392, abs=1e-4)
    r56 = ln2_bound_check(100, 56)
    assert r56.holds
    assert r56.context["middle"] == pytest.approx(38.862, abs=1e-3)
    assert r56.bound_value == pytest.approx(41.44, abs=1e-2)
    assert r56.context["k_pow"] == pytest.approx(56 ** 0.99, rel=1e-6)
    for t in (100, 316, 1000):
        assert all(ln2_bound_check(t, k).holds for k in range(1, 57))
    with pytest.raises(ValueError):
        ln2_bound_check(99, 1)
    with pytest.raises(ValueError):
        ln2_bound_check(100, 57)


def test_hard_inequality_spot_check_large_t(small_table):
    for t in (100, 250, 1000):
        r = verify_c_hard(t, 8, small_table)
        assert r.passed


def test_induction_easy():
    r = induction_margin(2, 57, variant="easy")
    assert r.holds
    assert r.exact_value == pytest.approx(1 / math.log(57), rel=1e-9)
    assert r.bound_value == pytest.approx(0.25, rel=1e-9)
    r100 = induction_margin(100, 57, variant="easy")
    assert r100.holds
    assert r100.bound_value == pytest.approx((1 - 0.01) ** 100, rel=1e-9)
    with pytest.raises(ValueError):
        induction_margin(2, 56, variant="easy")


def test_induction_hard():
    for t in range(2, 100):
        r = induction_margin(t, hard_threshold(t) + 1, variant="hard")
        assert r.holds, (t, r.slack)
        assert r.slack > 0
    # t = 2 is the tight one: threshold = floor(exp(C/(C-1)))
    tight = induction_margin(2, hard_threshold(2) + 1, variant="hard")
    assert tight.slack == pytest.approx(2.3698e-8, rel=1e-3)
    with pytest.raises(ValueError):
        induction_margin(2, hard_threshold(2), variant="hard")
    with pytest.raises(ValueError):
        induction_margin(2, 3_750_231, variant="nope")


def test_threshold_is_last_failing_k():
    """The t=2 threshold is exactly floor(exp(C/(C-1))): the induction
    condition fails at the threshold and holds one past it."""
    with iv_prec(128):
        from divlat.campaigns import eta_constant_interval
        c = eta_constant_interval()
        ratio = c / (c - 1)
        at_thr = iv.log(iv.mpf(hard_threshold(2))) - ratio
        past = iv.log(iv.mpf(hard_threshold(2) + 1)) - ratio
        assert float(at_thr.b) < 0 < float(past.a)


def test_rosser_at_campaign_scale(campaign_table):
    from divlat import rosser_check
    res = rosser_check(campaign_table, 3_750_230)
    assert res.passed
    assert res.worst_margin > 0


def test_concavity_threshold():
    assert concavity_threshold(2) == pytest.approx(math.exp(math.sqrt(3)), rel=1e-12)
    assert concavity_threshold(3) == pytest.approx(3.2744, abs=1e-3)
    values = [concavity_threshold(t) for t in range(2, 10_001)]
    assert max(values) < 6.0
    # limit value exp((sqrt(5)-1)/2) ~ 1.855
    assert values[-1] == pytest.approx(math.exp((math.sqrt(5) - 1) / 2), rel=1e-3)
    with pytest.raises(ValueError):
        concavity_threshold(1)
