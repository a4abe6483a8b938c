"""Command-line front end.

Every command prints one JSON report on stdout (keys: command, inputs,
results, status, timing_seconds) and a human summary on stderr; --csv
switches the tabular stderr sections to CSV.  Exit code 0 means
status == "pass"; capacity and inconclusive outcomes exit nonzero.

Environment: DIVLAT_SIEVE_LIMIT caps how far commands will sieve
(default 80,000,000).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import campaigns, moments
from .core import factorize, prime_upper_bound, rosser_check, sieve_for_count
from .energy import brute_energy_oracle, energy
from .errors import CapacityError, DomainError, InconclusiveError
from .moments import ALPHA_REFERENCE, divisor_profile
from .reports import _jsonable

DEFAULT_SIEVE_CEILING = 80_000_000


def _sieve_ceiling() -> int:
    return int(os.environ.get("DIVLAT_SIEVE_LIMIT", str(DEFAULT_SIEVE_CEILING)))


def _table_for_count(k: int):
    need = prime_upper_bound(k)
    ceiling = _sieve_ceiling()
    if need > ceiling:
        raise CapacityError(
            f"campaign needs a sieve limit near {need}, above the ceiling "
            f"{ceiling} (raise DIVLAT_SIEVE_LIMIT)")
    return sieve_for_count(k)


def _truncate2(x: float) -> float:
    return math.floor(x * 100.0) / 100.0


class _Table:
    """A tabular stderr section; rendered aligned or as CSV."""

    def __init__(self, title: str, headers: list[str], rows: list[list]):
        self.title = title
        self.headers = headers
        self.rows = rows

    def render(self, as_csv: bool) -> str:
        if as_csv:
            lines = [",".join(self.headers)]
            lines += [",".join(str(c) for c in row) for row in self.rows]
            return f"# {self.title}\n" + "\n".join(lines)
        widths = [max(len(str(h)), *(len(str(r[i])) for r in self.rows)) if self.rows
                  else len(str(h)) for i, h in enumerate(self.headers)]
        head = "  ".join(str(h).ljust(w) for h, w in zip(self.headers, widths))
        body = ["  ".join(str(c).ljust(w) for c, w in zip(row, widths))
                for row in self.rows]
        return "\n".join([self.title, head, "-" * len(head)] + body)

    def to_jsonable(self) -> dict:
        return {"title": self.title, "headers": self.headers,
                "rows": [[_jsonable(c) for c in row] for row in self.rows]}


def _emit(command: str, inputs: dict, results: dict, status: str, t0: float,
          tables: list[_Table] | None = None, as_csv: bool = False,
          summary: list[str] | None = None) -> int:
    report = {
        "command": command,
        "inputs": {k: _jsonable(v) for k, v in inputs.items()},
        "results": _jsonable(results),
        "status": status,
        "timing_seconds": round(time.perf_counter() - t0, 6),
    }
    json.dump(report, sys.stdout)
    sys.stdout.write("\n")
    for line in summary or []:
        print(line, file=sys.stderr)
    for tab in tables or []:
        print(tab.render(as_csv), file=sys.stderr)
    print(f"[{command}] status: {status}", file=sys.stderr)
    if status == "pass":
        return 0
    return 2 if status == "inconclusive" else 1


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_tables(args) -> int:
    t0 = time.perf_counter()
    alpha_rows = []
    alpha_ok = True
    for theta, expected in ALPHA_REFERENCE.items():
        a = moments.alpha_of_theta(theta)
        shown = _truncate2(a)
        ok = abs(shown - expected) < 1e-9
        alpha_ok &= ok
        alpha_rows.append([theta, f"{shown:.2f}", f"{expected:.2f}", "ok" if ok else "MISMATCH"])

    thr_rows = []
    thr_ok = True
    for t in list(range(2, 9)) + [99]:
        thr = campaigns.hard_threshold(t)
        cert = campaigns.induction_margin(t, thr + 1, variant="hard")
        thr_ok &= cert.holds
        thr_rows.append([t, thr, f"{cert.slack:.3e}", "ok" if cert.holds else "FAIL"])

    status = "pass" if alpha_ok and thr_ok else "fail"
    tables = [
        _Table("alpha(theta), recomputed and truncated to 2 decimals",
               ["theta", "alpha", "reference", "verdict"], alpha_rows),
        _Table("hard-campaign thresholds with induction certificates at k+1",
               ["t", "k_threshold", "margin", "verdict"], thr_rows),
    ]
    results = {
        "alpha_table": tables[0].to_jsonable(),
        "threshold_table": tables[1].to_jsonable(),
    }
    return _emit("tables", {}, results, status, t0, tables, args.csv)


def _parse_t_range(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def cmd_verify_eta(args) -> int:
    t0 = time.perf_counter()
    ts = _parse_t_range(args.t)
    variants = ["easy", "hard"] if args.variant == "both" else [args.variant]

    def k_for(t: int, variant: str) -> int:
        if args.k_max is not None:
            return args.k_max
        return 56 if variant == "easy" else campaigns.hard_threshold(t)

    table = _table_for_count(max(k_for(t, v) for t in ts for v in variants))

    def run(t: int) -> list:
        out = []
        for variant in variants:
            if variant == "easy":
                out.append(campaigns.verify_c_easy(
                    t, k_for(t, variant), table, prec=args.precision,
                    checkpoint=args.checkpoint))
            else:
                out.append(campaigns.verify_c_hard(
                    t, k_for(t, variant), table, prec=args.precision,
                    checkpoint=args.checkpoint))
        return out

    results = []
    if args.threads > 1 and len(ts) > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            for part in pool.map(run, ts):
                results.extend(part)
    else:
        for t in ts:
            results.extend(run(t))
    results.sort(key=lambda r: (r.t_range, r.label))
    status = "pass" if all(r.passed for r in results) else "fail"
    rows = [[r.label, r.t_range[0], r.k_range[1], f"{r.worst_margin:.3e}",
             r.argmin, r.inconclusive, "ok" if r.passed else "FAIL"] for r in results]
    tab = _Table("eta campaigns", ["variant", "t", "k_max", "worst_margin",
                                   "argmin", "beyond_prec", "verdict"], rows)
    return _emit(
        "verify-eta",
        {"t": args.t, "k_max": args.k_max, "variant": args.variant,
         "precision": args.precision, "threads": args.threads,
         "checkpoint": args.checkpoint},
        {"campaigns": [r.to_jsonable() for r in results]},
        status, t0, [tab], args.csv)


def cmd_constant_c(args) -> int:
    t0 = time.perf_counter()
    table = _table_for_count(campaigns.hard_threshold(2))
    found = campaigns.constant_C_search(args.t_max, table, prec=args.precision)
    unique = found.runner_up < found.lower
    status = "pass" if (found.attained_at == campaigns.ETA_CONSTANT_AT and unique) else "fail"
    results = {
        "value": found.value,
        "value_8dp": f"{found.value:.8f}",
        "enclosure": [found.lower, found.upper],
        "attained_at": list(found.attained_at),
        "runner_up": found.runner_up,
        "runner_up_at": list(found.runner_up_at),
        "unique_maximum": unique,
    }
    summary = [f"best constant = {found.value:.8f} attained at (t,k) = {found.attained_at}",
               f"runner-up {found.runner_up:.10f} at {found.runner_up_at}"]
    return _emit("constant-c", {"t_max": args.t_max, "precision": args.precision},
                 results, status, t0, None, args.csv, summary)


def cmd_moments(args) -> int:
    t0 = time.perf_counter()
    f = factorize(args.n)
    profile = divisor_profile(f)
    stepwise = moments.moment_stepwise(profile, args.t)
    by_parts = moments.moment_by_parts(profile, args.t)
    results: dict = {
        "n": args.n,
        "t": args.t,
        "moment_stepwise": stepwise,
        "moment_by_parts": by_parts,
        "identities_agree": stepwise == by_parts,
        "radical": f.gamma,
    }
    ok = stepwise == by_parts
    if f.gamma != f.n:
        results["note"] = f"moment of {args.n} equals moment of its radical {f.gamma}"
    if args.all_checks:
        if not f.is_squarefree:
            raise ValueError(
                f"closed-form bound checks need squarefree n, got {args.n}; "
                f"rerun with its radical {f.gamma}")
        if args.t >= 2:
            b1, b2 = moments.thm_bounds(f, args.t)
            ok_b1 = Fraction(abs(stepwise)) <= Fraction(b1)
            ok_b2 = Fraction(abs(stepwise)) <= Fraction(b2)
            chain = moments.chain_check(profile, args.t, prec=args.precision)
            results["first_bound"] = {"value": b1, "holds": ok_b1}
            results["second_bound"] = {"value": b2, "holds": ok_b2}
            results["chain"] = chain.to_jsonable()
            ok = ok and ok_b1 and ok_b2 and chain.holds
        envelope = [moments.pe_envelope_check(profile, z) for z in profile.divisors]
        bad = [r for r in envelope if not r.holds]
        results["envelope_checked"] = len(envelope)
        results["envelope_violations"] = [r.to_jsonable() for r in bad]
        ok = ok and not bad
        if args.theta is not None and args.t % 2 == 0:
            h = moments.H_chain_check(profile, args.theta, args.t, prec=args.precision)
            results["threshold_count_chain"] = h.to_jsonable()
            ok = ok and h.holds
    status = "pass" if ok else "fail"
    return _emit("moments", {"n": args.n, "t": args.t, "all_checks": args.all_checks,
                             "theta": args.theta},
                 results, status, t0, None, args.csv)


def cmd_energy(args) -> int:
    t0 = time.perf_counter()
    if args.sweep is None and args.n is None:
        raise ValueError("energy needs --n or --sweep")
    if args.sweep is None:
        f = factorize(args.n)
        rep = energy(f, args.s)
        results: dict = {"report": rep.to_jsonable()}
        ok = rep.strict_lower_holds and rep.upper_holds
        if f.tau ** (2 * args.s) <= 10 ** 6:
            oracle = brute_energy_oracle(args.n, args.s)
            results["oracle"] = oracle
            ok = ok and oracle == rep.energy
        status = "pass" if ok else "fail"
        return _emit("energy", {"s": args.s, "n": args.n}, results, status,
                     t0, None, args.csv)
    violations = []
    checked = 0
    for n in range(2, args.sweep + 1):
        rep = energy(factorize(n), args.s)
        checked += 1
        squarefree = factorize(n).is_squarefree
        if not (rep.strict_lower_holds and rep.upper_holds
                and rep.upper_is_equality == squarefree):
            violations.append(rep.to_jsonable())
    status = "pass" if not violations else "fail"
    return _emit("energy", {"s": args.s, "sweep": args.sweep},
                 {"checked": checked, "violations": violations}, status,
                 t0, None, args.csv)


def _scan_one(rng: random.Random, omega_max: int, t_max: int, s_max: int,
              prec: int) -> dict:
    """One seeded cross-check bundle on a random squarefree n."""
    pool = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
            53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
    omega = rng.randint(1, omega_max)
    primes = sorted(rng.sample(pool, omega))
    n = math.prod(primes)
    f = factorize(n)
    profile = divisor_profile(f)
    t = rng.randint(2, t_max)
    record: dict = {"n": n, "t": t, "checks": {}, "failures": []}

    def check(name: str, ok: bool, reproducer: dict | None = None):
        record["checks"][name] = bool(ok)
        if not ok:
            record["failures"].append({"check": name, "n": n,
                                       **(reproducer or {})})

    sw = moments.moment_stepwise(profile, t)
    bp = moments.moment_by_parts(profile, t)
    check("moment-identity", sw == bp, {"t": t})
    l1 = moments.moment_stepwise(profile, 1)
    closed = -math.prod(1 - p for p in primes)
    check("first-moment-closed-form", l1 == closed)
    b1, b2 = moments.thm_bounds(f, t)
    check("moment-bounds", Fraction(abs(sw)) <= Fraction(b1)
          and Fraction(abs(sw)) <= Fraction(b2), {"t": t})
    chain = moments.chain_check(profile, t, prec=prec)
    check("moment-chain", chain.holds, {"t": t})
    z = rng.choice(profile.divisors)
    check("envelope", moments.pe_envelope_check(profile, z).holds, {"z": z})
    a = rng.choice(profile.divisors)
    b = rng.choice(profile.divisors)
    a, b = min(a, b), max(a, b)
    check("interval-sum", moments.interval_sum_check(profile, a, b).holds,
          {"a": a, "b": b})
    if n <= moments.H_THETA_CAP:
        theta = rng.choice([x / 10 for x in range(1, 11)])
        te = rng.choice([2, 4])
        check("threshold-count-chain",
              moments.H_chain_check(profile, theta, te, prec=prec).holds,
              {"theta": theta, "t": te})
    s = rng.randint(2, s_max)
    rep = energy(f, s)
    ok_energy = rep.strict_lower_holds and rep.upper_holds and rep.upper_is_equality
    if f.tau ** (2 * s) <= 10 ** 6:
        ok_energy = ok_energy and brute_energy_oracle(n, s) == rep.energy
    check("energy-sandwich", ok_energy, {"s": s})
    rho = rng.randint(0, 3)
    check("primorial-domination", moments.domination_check(f, rho).holds,
          {"rho": rho})
    return record


def cmd_scan(args) -> int:
    t0 = time.perf_counter()
    rng = random.Random(args.seed)
    records = [_scan_one(rng, args.omega_max, args.t_max, args.s_max, args.precision)
               for _ in range(args.count)]
    failures = [fail for rec in records for fail in rec["failures"]]
    status = "pass" if not failures else "fail"
    results = {
        "seed": args.seed,
        "count": args.count,
        "checks_run": sum(len(r["checks"]) for r in records),
        "failures": failures,
        "records": records,
    }
    summary = [f"scan: {results['checks_run']} checks over {args.count} samples"]
    if failures:
        summary += [f"MINIMAL REPRODUCER: {json.dumps(failures[0])}"]
    return _emit("scan", {"seed": args.seed, "count": args.count,
                          "omega_max": args.omega_max, "t_max": args.t_max,
                          "s_max": args.s_max},
                 results, status, t0, None, args.csv, summary)


def cmd_rosser(args) -> int:
    t0 = time.perf_counter()
    table = _table_for_count(args.k_max)
    res = rosser_check(table, args.k_max)
    status = "pass" if res.passed else "fail"
    return _emit("rosser", {"k_max": args.k_max},
                 {"campaign": res.to_jsonable()}, status, t0, None, args.csv)


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--csv", action="store_true",
                        help="render tabular stderr sections as CSV")
    common.add_argument("--precision", type=int, default=128,
                        help="working precision in bits for certified comparisons")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for per-t campaigns")

    ap = argparse.ArgumentParser(
        prog="divlat",
        description="Exact divisor-lattice arithmetic and certified bound checks")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("tables", parents=[common],
                   help="recompute the alpha(theta) table and echo "
                        "campaign thresholds with certificates")

    v = sub.add_parser("verify-eta", parents=[common],
                       help="run eta-product inequality campaigns")
    v.add_argument("--t", required=True, help="single t or range lo:hi")
    v.add_argument("--k-max", type=int, default=None)
    v.add_argument("--variant", choices=["easy", "hard", "both"], default="both")
    v.add_argument("--checkpoint", default=None)

    c = sub.add_parser("constant-c", parents=[common],
                       help="search the best-possible eta constant")
    c.add_argument("--t-max", type=int, default=99)

    m = sub.add_parser("moments", parents=[common],
                       help="exact moments with optional bound checks")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--t", type=int, required=True)
    m.add_argument("--all-checks", action="store_true")
    m.add_argument("--theta", type=float, default=None)

    e = sub.add_parser("energy", parents=[common],
                       help="multiplicative energy and its sandwich")
    e.add_argument("--s", type=int, required=True)
    e.add_argument("--n", type=int, default=None)
    e.add_argument("--sweep", type=int, default=None)

    s = sub.add_parser("scan", parents=[common],
                       help="seeded randomized cross-check sweep")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--omega-max", type=int, default=8)
    s.add_argument("--t-max", type=int, default=6)
    s.add_argument("--s-max", type=int, default=4)

    r = sub.add_parser("rosser", parents=[common],
                       help="verify p_k > k log k up to k_max")
    r.add_argument("--k-max", type=int, required=True)
    return ap


_COMMANDS = {
    "tables": cmd_tables,
    "verify-eta": cmd_verify_eta,
    "constant-c": cmd_constant_c,
    "moments": cmd_moments,
    "energy": cmd_energy,
    "scan": cmd_scan,
    "rosser": cmd_rosser,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        return _COMMANDS[args.command](args)
    except InconclusiveError as exc:
        return _emit(args.command, {}, {"error": str(exc)}, "inconclusive", t0)
    except (CapacityError, DomainError, ValueError) as exc:
        return _emit(args.command, {}, {"error": str(exc)}, "fail", t0)


if __name__ == "__main__":
    sys.exit(main())
