"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines.

Criterion 1 is implemented exactly as stated and is expected to FAIL:
its k <= 100 horizon is mathematically too small for this range (the
smallest qualifying k for n = 67 is 101, for n = 389 it is 296).  The
companion test `test_criterion_1_claim_reproduction` shows the underlying
statement -- every 2 <= n <= 400 divides some sigma iterate -- does hold,
with a horizon of 300.  See notes in the repository root README.
"""

import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from sigmalab import kernels
from sigmalab.arith import Budget, abundancy, factor, is_prime
from sigmalab.congruence import (
    ReportStatus,
    ctr_scan,
    metaperfect_first_failure,
    odd_k_divisibility,
    periodicity_probe,
    powersum_residue,
)
from sigmalab.iterate import erdos_sampler, iterate_sigma, lenstra_chain_search
from sigmalab.multiperfect import (
    cyclotomic_factor_check,
    exact_L_divisibility,
    lprime_filter,
    multiperfect_scan,
)
from sigmalab.store import FactorCache

N37 = 13188979363639752997731839211623940096
EXPECTED_CATALOG = [6, 28, 120, 496, 672, 8128, 30240, 32760, 523776]


def verdict(cid, ok, detail):
    print(f"ACCEPTANCE {cid}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def shared_cache(tmp_path_factory):
    return FactorCache(tmp_path_factory.mktemp("acc") / "factors.cache")


@pytest.fixture(scope="module")
def catalog(shared_cache):
    return multiperfect_scan(10**6, cache=shared_cache)


def test_criterion_1_as_stated(shared_cache):
    """C1: every 2 <= n <= 400 finds k <= 100; >= 95% resolved at the
    default budget; zero NO_K outcomes; stragglers resolve at 10x budget."""
    reports = ctr_scan(2, 400, k_max=100, cache=shared_cache)
    resolved = [r for r in reports if r.status is ReportStatus.RESOLVED]
    no_k = [r.n for r in reports if r.status is ReportStatus.NO_K_WITHIN_HORIZON]
    unresolved = [r.n for r in reports if r.status is ReportStatus.UNRESOLVED_BUDGET]
    for n in unresolved:
        big = Budget(max_work=100_000_000)
        rerun = ctr_scan(n, n, k_max=100, budget=big, cache=shared_cache)[0]
        assert rerun.status is ReportStatus.RESOLVED, f"n={n} unresolved at 10x budget"
    share = len(resolved) / len(reports)
    ok = share >= 0.95 and not no_k
    verdict(
        "C1 (as stated, k<=100)",
        ok,
        f"{len(resolved)}/399 resolved ({share:.1%}), "
        f"{len(no_k)} NO_K outcomes at horizon 100: {no_k[:8]}{'...' if len(no_k) > 8 else ''}",
    )
    assert not no_k, (
        f"criterion defect: {len(no_k)} starting values have no k <= 100 at all; "
        f"the smallest qualifying k for n=67 is 101 (verified against an "
        f"independent implementation), so a 100-step horizon cannot work. "
        f"See the companion test for the claim at horizon 300."
    )
    assert share >= 0.95


def test_criterion_1_claim_reproduction(shared_cache):
    """C1 companion: the underlying claim holds -- every n in 2..400
    divides some sigma iterate (horizon 300, default budget)."""
    reports = ctr_scan(2, 400, k_max=300, cache=shared_cache)
    bad = [r.n for r in reports if r.status is not ReportStatus.RESOLVED]
    ks = [r.smallest_k for r in reports if r.smallest_k is not None]
    ok = not bad
    verdict(
        "C1 (claim, k<=300)",
        ok,
        f"all 399 starts resolve, max smallest k = {max(ks)}, "
        f"{sum(1 for k in ks if k > 100)} starts need k > 100",
    )
    assert ok, f"unresolved starts: {bad}"
    assert max(ks) == 296  # n = 389


def test_criterion_2_quintuple_perfect(shared_cache):
    """C2: S(n) = 5 exactly, gcd(5, n) = 1, sigma^2(n) = 30n."""
    f = factor(N37)
    s = abundancy(f)
    trace = iterate_sigma(N37, 2, cache=shared_cache)
    ok = (
        s == Fraction(5)
        and math.gcd(5, N37) == 1
        and trace.values()[2] == 30 * N37
    )
    verdict("C2", ok, f"S(n) = {s}, sigma^2(n)/n = {trace.values()[2] // N37}")
    assert ok


def test_criterion_3_catalog_and_lprime(shared_cache):
    """C3: mp-scan --limit 1000000 returns the exact nine-record catalog,
    cross-checked against a divisor-enumeration oracle at 1e4; lprime = {6}."""
    proc = subprocess.run(
        [sys.executable, "-m", "sigmalab.cli", "mp-scan",
         "--limit", "1000000", "--format", "json"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    ns = [json.loads(line)["n"] for line in proc.stdout.splitlines()]

    def divisor_sum(n):
        total = 0
        for d in range(1, math.isqrt(n) + 1):
            if n % d == 0:
                total += d
                if d != n // d:
                    total += n // d
        return total

    oracle = [n for n in range(2, 10_001) if divisor_sum(n) % n == 0]
    records = multiperfect_scan(10**6, cache=shared_cache)
    lp = [r.n for r in lprime_filter(records)]
    ok = (
        ns == EXPECTED_CATALOG
        and [n for n in ns if n <= 10_000] == oracle
        and lp == [6]
    )
    verdict("C3", ok, f"catalog = {ns}, L-prime subset = {lp}")
    assert ok


def test_criterion_4_first_failures(catalog, shared_cache):
    """C4: every multiperfect n <= 1e6 stops dividing within k <= 10;
    n = 6 fails first at k = 2 with residue 4.  Exact."""
    failures = {}
    for r in catalog:
        rep = metaperfect_first_failure(r.n, k_max=10, cache=shared_cache)
        assert rep.status is ReportStatus.RESOLVED, f"n={r.n}: {rep.status}"
        failures[r.n] = (rep.smallest_k, dict(rep.residue_table)[rep.smallest_k])
    ok = all(k <= 10 for k, _ in failures.values()) and failures[6] == (2, 4)
    verdict("C4", ok, f"first failures (k, residue): {sorted(failures.items())}")
    assert ok


def test_criterion_5_powersum_grid():
    """C5: closed form matches on the whole grid p < 50, e <= 6, k <= 30,
    and divisibility holds exactly when gcd(k, e+1) = 1.  Exact."""
    mismatches = 0
    law_breaks = 0
    points = 0
    for p in range(2, 50):
        if not is_prime(p):
            continue
        for e in range(1, 7):
            for k in range(1, 31):
                chk = powersum_residue(p, e, k)
                points += 1
                mismatches += not chk.match
                law_breaks += (chk.actual == 0) != (chk.r == 1)
    ok = mismatches == 0 and law_breaks == 0
    verdict("C5", ok, f"{points} grid points, {mismatches} mismatches, {law_breaks} law breaks")
    assert ok


def test_criterion_6_tau_coprime():
    """C6: sigma(n) | sigma_k(n) for all n <= 1e4, k <= 20 with
    gcd(k, tau(n)) = 1.  Exact."""
    spf = kernels.spf_sieve(10_000)
    checked = 0
    for n in range(2, 10_001):
        x = n
        pairs = []
        while x > 1:
            p = spf[x]
            e = 0
            while x % p == 0:
                x //= p
                e += 1
            pairs.append((p, e))
        t = 1
        for _, e in pairs:
            t *= e + 1
        s1 = 1
        for p, e in pairs:
            s1 *= (p ** (e + 1) - 1) // (p - 1)
        for k in range(1, 21):
            if math.gcd(k, t) != 1:
                continue
            sk = 1
            for p, e in pairs:
                pk = p**k
                sk *= (pk ** (e + 1) - 1) // (pk - 1)
            assert sk % s1 == 0, (n, k)
            checked += 1
    verdict("C6", True, f"{checked} coprime (n, k) pairs all divide")


def test_criterion_7_odd_k_disambiguation(shared_cache):
    """C7: 6 | sigma_k(6) for every odd k <= 99 (power-sum reading) while
    sigma^3(6) mod 6 = 2 (iterate reading); verify-all flags a FINDING."""
    rep = odd_k_divisibility(6, 99, cache=shared_cache)
    trace = iterate_sigma(6, 3, cache=shared_cache)
    proc = subprocess.run(
        [sys.executable, "-m", "sigmalab.cli", "verify-all",
         "--claim", "odd-k-disambiguation", "--format", "json"],
        capture_output=True, text=True,
    )
    (claim,) = [json.loads(line) for line in proc.stdout.splitlines()]
    ok = (
        rep.all_divide
        and trace.entries[3].residue_mod_start == 2
        and claim["status"] == "FINDING"
        and proc.returncode == 0
    )
    verdict(
        "C7", ok,
        f"odd power sums divide: {rep.all_divide}; sigma^3(6) mod 6 = "
        f"{trace.entries[3].residue_mod_start}; verify-all says {claim['status']}",
    )
    assert ok


def test_criterion_8_periodicity():
    """C8: for every prime power p^e <= 1e4 the observed period of
    sigma_k(p^e) mod sigma(p^e) divides e + 1.  Exact."""
    spf = kernels.spf_sieve(10_000)
    count = 0
    for p in range(2, 10_001):
        if spf[p] != p:
            continue
        pe, e = p, 1
        while pe <= 10_000:
            rep = periodicity_probe(pe)
            assert rep.observed_period is not None, pe
            assert (e + 1) % rep.observed_period == 0, pe
            pe *= p
            e += 1
            count += 1
    verdict("C8", True, f"{count} prime powers, every observed period divides e+1")


def test_criterion_9_structural_lemmas(shared_cache):
    """C9: zero cyclotomic classification violations for p < 100,
    L in {2,3,5,7,11}; L-valuation exactly 1 for q < 500, q = 1 mod L,
    L in {3,5,7}.  Exact."""
    violations = 0
    pairs = 0
    for L in (2, 3, 5, 7, 11):
        for p in range(2, 100):
            if p == L or not is_prime(p):
                continue
            chk = cyclotomic_factor_check(p, L, cache=shared_cache)
            pairs += 1
            violations += len(chk.violations)
    vals = 0
    bad_vals = 0
    for L in (3, 5, 7):
        for q in range(2, 500):
            if not is_prime(q) or q % L != 1:
                continue
            res = exact_L_divisibility(q, L)
            vals += 1
            bad_vals += not res.exact_once
    ok = violations == 0 and bad_vals == 0
    verdict("C9", ok, f"{pairs} cyclotomic pairs clean; {vals} valuations all exactly 1")
    assert ok


def test_criterion_10_lenstra_chains(shared_cache):
    """C10: chain search returns 12 for k=1 and 24 for k=2, verified by
    independent recomputation; some m <= 1e6 exists for every k <= 5."""

    def naive_s(x):
        return sum(d for d in range(1, x) if x % d == 0)

    found = {}
    for k in range(1, 6):
        m = lenstra_chain_search(k, 10**6, cache=shared_cache)
        assert m is not None, f"k={k}"
        chain = [m]
        for _ in range(k):
            chain.append(naive_s(chain[-1]))
        assert all(a < b for a, b in zip(chain, chain[1:])), chain
        found[k] = m
    ok = found[1] == 12 and found[2] == 24
    verdict("C10", ok, f"smallest chain starts {found}, chains recomputed naively")
    assert ok


def test_criterion_11_erdos_window():
    """C11: for k=2, delta=9/10 on [2, 1e5] the violation fraction is
    below 1/2 and exceeds the [2, 1e3] fraction by at most 0.05."""
    big = erdos_sampler(2, Fraction(9, 10), 2, 100_000)
    small = erdos_sampler(2, Fraction(9, 10), 2, 1_000)
    ok = (
        big.violation_fraction < Fraction(1, 2)
        and big.violation_fraction <= small.violation_fraction + Fraction(5, 100)
    )
    verdict(
        "C11", ok,
        f"fractions {float(small.violation_fraction):.4f} @1e3 -> "
        f"{float(big.violation_fraction):.4f} @1e5",
    )
    assert ok


def test_criterion_12_jobs_determinism(tmp_path):
    """C12: the criterion-1 scan emits byte-identical CSV at jobs=1 and
    jobs=8 (fresh caches, identical config)."""
    outputs = []
    for jobs in (1, 8):
        out = tmp_path / f"ctr-{jobs}.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "sigmalab.cli", "ctr-scan",
             "--to", "400", "--k-max", "100",
             "--jobs", str(jobs), "--out", str(out),
             "--cache", str(tmp_path / f"cache-{jobs}")],
            capture_output=True, text=True,
        )
        assert proc.returncode in (0, 1)  # NO_K findings allowed here
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1]
    verdict("C12", ok, f"jobs=1 vs jobs=8: {len(outputs[0])} bytes, identical = {ok}")
    assert ok
