"""Divisibility and congruence probes for divisor sums.

Two different families live here and are easy to conflate, so the code
is explicit about which one it touches:

* iterate residues: sigma applied k times, then reduced mod n;
* power-sum residues: sigma_k(n) (sum of k-th powers of divisors) mod n
  or mod sigma(n).

``iterate_vs_powersum_report`` tabulates both side by side because the
two readings genuinely disagree (e.g. at n=6, k=3: iterate residue 2,
power-sum residue 0).
"""

import math
from dataclasses import dataclass
from enum import Enum

from sigmalab.arith import (
    DEFAULT_BUDGET,
    Budget,
    BudgetExhausted,
    DigitLimit,
    Factorization,
    L_invariant,
    WorkMeter,
    is_prime,
    sigma,
    sigma_pow,
    tau,
)
from sigmalab.iterate import NotMultiperfect, sigma_step
from sigmalab.store import FactorCache, cached_factor


class PreconditionViolated(ValueError):
    """Operation called outside its stated hypotheses."""


class ReportStatus(str, Enum):
    RESOLVED = "RESOLVED"
    UNRESOLVED_BUDGET = "UNRESOLVED_BUDGET"
    NO_K_WITHIN_HORIZON = "NO_K_WITHIN_HORIZON"


@dataclass
class CongruenceReport:
    n: int
    goal: str
    smallest_k: int | None
    k_horizon: int
    residue_table: list  # [(k, residue)]
    status: ReportStatus

    def to_json_dict(self):
        return {
            "n": self.n,
            "goal": self.goal,
            "smallest_k": self.smallest_k,
            "k_horizon": self.k_horizon,
            "residue_table": self.residue_table,
            "status": self.status,
        }


def _iterate_residue_scan(n, k_max, budget, cache, stop):
    """Walk sigma iterates of n, recording residues mod n, stopping at the
    first k where stop(residue) is true."""
    meter = WorkMeter(budget.max_work)
    residue_table = []
    try:
        cur = cached_factor(n, budget=budget, meter=meter, cache=cache)
        for k in range(1, k_max + 1):
            value = sigma(cur)
            residue = value % n
            residue_table.append((k, residue))
            if stop(residue):
                return k, residue_table, ReportStatus.RESOLVED
            if k < k_max:
                cur = sigma_step(cur, budget=budget, meter=meter, cache=cache)
    except (BudgetExhausted, DigitLimit):
        return None, residue_table, ReportStatus.UNRESOLVED_BUDGET
    return None, residue_table, ReportStatus.NO_K_WITHIN_HORIZON


def smallest_k_divisibility(
    n: int,
    k_max: int = 100,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
) -> CongruenceReport:
    """Smallest k >= 1 with n | sigma^k(n) (the Cohen-te Riele question)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    k, table, status = _iterate_residue_scan(
        n, k_max, budget, cache, stop=lambda r: r == 0
    )
    return CongruenceReport(n, "iterate-divisible", k, k_max, table, status)


def _ctr_worker(args):
    """Scan one chunk of starting values; returns (reports, new cache entries)."""
    ns, k_max, budget, cache_path = args
    cache = FactorCache(cache_path)
    reports = [smallest_k_divisibility(n, k_max=k_max, budget=budget, cache=cache) for n in ns]
    return reports, cache.pending_entries()


def ctr_scan(
    lo: int,
    hi: int,
    k_max: int = 100,
    budget: Budget = DEFAULT_BUDGET,
    jobs: int = 1,
    cache: FactorCache = None,
):
    """smallest_k_divisibility over lo..hi inclusive, optionally in parallel.

    Workers get disjoint chunks and a read-only view of the cache file;
    their discoveries are merged back into `cache` here, keeping writes
    in one place.  Reports are sorted by n, so output bytes do not
    depend on the jobs count.
    """
    ns = list(range(lo, hi + 1))
    if jobs <= 1 or len(ns) < 16:
        reports = [
            smallest_k_divisibility(n, k_max=k_max, budget=budget, cache=cache)
            for n in ns
        ]
    else:
        from concurrent.futures import ProcessPoolExecutor

        width = (len(ns) + jobs - 1) // jobs
        chunks = [ns[i : i + width] for i in range(0, len(ns), width)]
        cache_path = cache.path if cache is not None else None
        reports = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk_reports, entries in pool.map(
                _ctr_worker,
                [(chunk, k_max, budget, cache_path) for chunk in chunks],
            ):
                reports.extend(chunk_reports)
                if cache is not None:
                    cache.update(entries)
    reports.sort(key=lambda r: r.n)
    return reports


def metaperfect_first_failure(
    n: int,
    k_max: int = 100,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
) -> CongruenceReport:
    """Smallest k with n NOT dividing sigma^k(n), for multiperfect n.

    A NO_K_WITHIN_HORIZON outcome here would mean every iterate up to the
    horizon is a multiple of n -- a metaperfect candidate, which is a
    finding rather than an error.
    """
    try:
        f = cached_factor(n, budget=budget, cache=cache)
    except (BudgetExhausted, DigitLimit):
        return CongruenceReport(
            n, "iterate-first-nondivisible", None, k_max, [],
            ReportStatus.UNRESOLVED_BUDGET,
        )
    if n < 6 or sigma(f) % n != 0:
        raise NotMultiperfect(f"{n} is not multiperfect (or below 6)")
    k, table, status = _iterate_residue_scan(
        n, k_max, budget, cache, stop=lambda r: r != 0
    )
    return CongruenceReport(n, "iterate-first-nondivisible", k, k_max, table, status)


@dataclass
class PowersumResidue:
    p: int
    e: int
    k: int
    r: int  # gcd(k, e+1)
    modulus: int  # sigma(p^e)
    predicted: int
    actual: int
    match: bool

    def to_json_dict(self):
        return {
            "p": self.p,
            "e": self.e,
            "k": self.k,
            "r": self.r,
            "modulus": self.modulus,
            "predicted": self.predicted,
            "actual": self.actual,
            "match": self.match,
        }


def powersum_residue(p: int, e: int, k: int) -> PowersumResidue:
    """Check sigma_k(p^e) mod sigma(p^e) against the closed form
    r * (p^(e+1)-1)/(p^r-1) with r = gcd(k, e+1).

    The division is exact because r divides e+1.  r=1 collapses the
    prediction to 0, i.e. sigma(p^e) divides sigma_k(p^e) exactly when
    gcd(k, e+1) = 1.
    """
    if not is_prime(p):
        raise PreconditionViolated(f"{p} is not prime")
    if e < 1 or k < 1:
        raise PreconditionViolated("need e >= 1 and k >= 1")
    modulus = (p ** (e + 1) - 1) // (p - 1)
    r = math.gcd(k, e + 1)
    predicted = r * ((p ** (e + 1) - 1) // (p**r - 1)) % modulus
    actual = sum(pow(p, i * k, modulus) for i in range(e + 1)) % modulus
    return PowersumResidue(p, e, k, r, modulus, predicted, actual, predicted == actual)


@dataclass
class TauCoprimeResult:
    n: int
    k: int
    tau: int
    sigma: int
    sigma_k: int
    divisible: bool
    quotient: int | None

    def to_json_dict(self):
        return {
            "n": self.n,
            "k": self.k,
            "tau": self.tau,
            "sigma": self.sigma,
            "sigma_k": self.sigma_k,
            "divisible": self.divisible,
            "quotient": self.quotient,
        }


def tau_coprime_divisibility(
    n: int,
    k: int,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
) -> TauCoprimeResult:
    """Witness that sigma(n) divides sigma_k(n) when gcd(k, tau(n)) = 1."""
    if n < 2 or k < 1:
        raise PreconditionViolated("need n >= 2 and k >= 1")
    f = cached_factor(n, budget=budget, cache=cache)
    t = tau(f)
    if math.gcd(k, t) != 1:
        raise PreconditionViolated(f"gcd({k}, tau({n})={t}) != 1")
    s1 = sigma(f)
    sk = sigma_pow(f, k)
    divisible = sk % s1 == 0
    return TauCoprimeResult(n, k, t, s1, sk, divisible, sk // s1 if divisible else None)


@dataclass
class OddKReport:
    n: int
    tau: int
    k_max_odd: int
    residues: list  # [(k, sigma_k(n) mod n)] for odd k
    all_divide: bool

    def to_json_dict(self):
        return {
            "n": self.n,
            "tau": self.tau,
            "k_max_odd": self.k_max_odd,
            "residues": self.residues,
            "all_divide": self.all_divide,
        }


def odd_k_divisibility(
    n: int,
    k_max_odd: int = 99,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
) -> OddKReport:
    """Check n | sigma_k(n) for every odd k, for multiperfect n whose
    divisor count is a power of two (so every odd k is coprime to tau)."""
    f = cached_factor(n, budget=budget, cache=cache)
    t = tau(f)
    if sigma(f) % n != 0:
        raise PreconditionViolated(f"{n} is not multiperfect")
    if t & (t - 1):
        raise PreconditionViolated(f"tau({n}) = {t} is not a power of 2")
    residues = []
    for k in range(1, k_max_odd + 1, 2):
        residues.append((k, _sigma_pow_mod(f, k, n)))
    return OddKReport(n, t, k_max_odd, residues, all(r == 0 for _, r in residues))


def _sigma_pow_mod(f: Factorization, k: int, modulus: int) -> int:
    """sigma_k(f.value) mod modulus by per-prime-power reduction."""
    total = 1
    for pp in f.parts:
        piece = sum(pow(pp.prime, i * k, modulus) for i in range(pp.exponent + 1))
        total = total * piece % modulus
    return total


@dataclass
class PeriodReport:
    n: int
    L: int
    horizon: int
    residues: list  # sigma_k(n) mod sigma(n) for k = 1..horizon
    observed_period: int | None
    divides_L: bool | None

    def to_json_dict(self):
        return {
            "n": self.n,
            "L": self.L,
            "horizon": self.horizon,
            "residues": self.residues,
            "observed_period": self.observed_period,
            "divides_L": self.divides_L,
        }


def periodicity_probe(
    n: int,
    horizon: int = None,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
) -> PeriodReport:
    """Sample sigma_k(n) mod sigma(n) for k = 1..horizon and find the least
    shift consistent across the whole window.

    A candidate period must match over the entire window, not merely at
    its first repetition, to keep spurious short periods out.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    f = cached_factor(n, budget=budget, cache=cache)
    L = L_invariant(f)
    if horizon is None:
        horizon = max(4 * L, 24)
    if horizon < 2 * L:
        raise ValueError(f"horizon must be at least 2L = {2 * L}")
    modulus = sigma(f)
    residues = [_sigma_pow_mod(f, k, modulus) for k in range(1, horizon + 1)]
    observed = None
    for p in range(1, horizon // 2 + 1):
        if all(residues[i] == residues[i + p] for i in range(horizon - p)):
            observed = p
            break
    divides = (L % observed == 0) if observed is not None else None
    return PeriodReport(n, L, horizon, residues, observed, divides)


@dataclass
class StructureReport:
    n: int
    satisfies_congruences: bool  # sigma(n) = 0 and sigma_2(n) = 2, both mod n
    triggered: bool  # congruences hold and additionally 4 | n
    odd_factor_multiplicities: list  # [(odd prime, exponent)]
    distinguished_prime: int | None
    conclusions: list  # [(check name, bool)]

    def to_json_dict(self):
        return {
            "n": self.n,
            "satisfies_congruences": self.satisfies_congruences,
            "triggered": self.triggered,
            "odd_factor_multiplicities": self.odd_factor_multiplicities,
            "distinguished_prime": self.distinguished_prime,
            "conclusions": self.conclusions,
        }


def conjecture_structure_check(
    n: int,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
) -> StructureReport:
    """Evaluate the congruence hypotheses sigma(n) = 0 mod n,
    sigma_2(n) = 2 mod n, n = 0 mod 4; when all hold, verify the odd-prime
    multiplicity structure they force.

    Expected structure: every odd prime factor occurs to an even
    multiplicity except one, which occurs to a multiplicity of 1 mod 4
    and is itself 3 mod 4.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    f = cached_factor(n, budget=budget, cache=cache)
    h_sigma = sigma(f) % n == 0
    h_sigma2 = sigma_pow(f, 2) % n == 2
    h_mod4 = n % 4 == 0
    conclusions = [
        ("sigma-divisible", h_sigma),
        ("sigma2-residue-2", h_sigma2),
        ("multiple-of-4", h_mod4),
    ]
    odd_parts = [(pp.prime, pp.exponent) for pp in f.parts if pp.prime != 2]
    triggered = h_sigma and h_sigma2 and h_mod4
    distinguished = None
    if triggered:
        odd_mult = [(p, e) for p, e in odd_parts if e % 2 == 1]
        one_odd = len(odd_mult) == 1
        conclusions.append(("exactly-one-odd-multiplicity", one_odd))
        if one_odd:
            distinguished, e = odd_mult[0]
            conclusions.append(("distinguished-multiplicity-1-mod-4", e % 4 == 1))
            conclusions.append(("distinguished-prime-3-mod-4", distinguished % 4 == 3))
    return StructureReport(
        n=n,
        satisfies_congruences=h_sigma and h_sigma2,
        triggered=triggered,
        odd_factor_multiplicities=odd_parts,
        distinguished_prime=distinguished,
        conclusions=conclusions,
    )


@dataclass
class IterateVsPowersum:
    n: int
    rows: list  # [(k, iterate_residue, powersum_residue)]

    def to_json_dict(self):
        return {"n": self.n, "rows": self.rows}


def iterate_vs_powersum_report(
    n: int,
    k_max: int = 12,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
) -> IterateVsPowersum:
    """Side-by-side residues mod n of the k-fold sigma iterate and the
    k-th power sum, documenting how far apart the two notions drift."""
    if n < 2:
        raise ValueError("n must be >= 2")
    meter = WorkMeter(budget.max_work)
    f = cached_factor(n, budget=budget, meter=meter, cache=cache)
    rows = []
    cur = f
    for k in range(1, k_max + 1):
        iterate_residue = sigma(cur) % n
        powersum_residue_ = _sigma_pow_mod(f, k, n)
        rows.append((k, iterate_residue, powersum_residue_))
        if k < k_max:
            cur = sigma_step(cur, budget=budget, meter=meter, cache=cache)
    return IterateVsPowersum(n, rows)
