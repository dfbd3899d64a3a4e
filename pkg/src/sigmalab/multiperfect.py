"""Multiperfect catalog and the structural lemmas behind the L filter.

A multiperfect n has n | sigma(n); its L invariant is the lcm of
(exponent + 1) over the prime factorization.  The scan finds all
multiperfect n up to a limit with a batched divisor-sum sieve, and the
lemma checkers probe why L prime pins the catalog down to n = 6:
every prime factor of sigma(p^(L-1)) is L or is 1 mod L, primes q = 1
mod L contribute exactly one power of L, and the resulting index bounds
(L/(L-1))^(m+1) >= sigma(n)/n >= L collapse for L >= 3.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from sigmalab import kernels
from sigmalab.arith import (
    DEFAULT_BUDGET,
    Budget,
    Factorization,
    L_invariant,
    is_prime,
    sigma,
)
from sigmalab.store import FactorCache, cached_factor


class TooFewFactors(ValueError):
    """Check needs at least two distinct prime factors."""


class PreconditionViolated(ValueError):
    """Operation called outside its stated hypotheses."""


@dataclass
class MultiperfectRecord:
    n: int
    factorization: Factorization
    index: int  # sigma(n)/n
    L: int
    L_prime: bool
    squarefree: bool

    def __post_init__(self):
        if sigma(self.factorization) != self.index * self.n:
            raise ValueError(f"record for {self.n} fails sigma = index * n")

    def to_json_dict(self):
        return {
            "n": self.n,
            "factorization": self.factorization,
            "index": self.index,
            "L": self.L,
            "L_prime": self.L_prime,
            "squarefree": self.squarefree,
        }


def _record_for(n: int, budget: Budget, cache: FactorCache) -> MultiperfectRecord:
    f = cached_factor(n, budget=budget, cache=cache)
    s = sigma(f)
    L = L_invariant(f)
    return MultiperfectRecord(
        n=n,
        factorization=f,
        index=s // n,
        L=L,
        L_prime=is_prime(L),
        squarefree=all(pp.exponent == 1 for pp in f.parts),
    )


def _scan_segment(args):
    lo, hi = args
    sig = kernels.sigma_segment(lo, hi)
    return [lo + i for i in range(hi - lo) if sig[i] % (lo + i) == 0]


def multiperfect_scan(
    limit: int,
    jobs: int = 1,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
):
    """All multiperfect n with 2 <= n <= limit, ascending.

    sigma values come from the batched sieve, full range for one job or
    per-worker segments otherwise; n = 1 is excluded as trivial.
    """
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if jobs <= 1 or limit < 10_000:
        sig = kernels.sigma_sieve(limit)
        hits = [n for n in range(2, limit + 1) if sig[n] % n == 0]
    else:
        from concurrent.futures import ProcessPoolExecutor

        bounds = _chunk_bounds(2, limit + 1, jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            hits = [n for seg in pool.map(_scan_segment, bounds) for n in seg]
    return [_record_for(n, budget, cache) for n in hits]


def _chunk_bounds(lo, hi, jobs):
    """Split [lo, hi) into at most `jobs` contiguous chunks."""
    width = max(1, (hi - lo + jobs - 1) // jobs)
    return [(a, min(a + width, hi)) for a in range(lo, hi, width)]


def lprime_filter(records):
    """Records whose L invariant is prime."""
    return [r for r in records if r.L_prime]


class FactorClass(str, Enum):
    EQUALS_L = "EQUALS_L"
    ONE_MOD_L = "ONE_MOD_L"
    VIOLATION = "VIOLATION"


@dataclass
class CyclotomicCheck:
    p: int
    L: int
    value: int  # sigma(p^(L-1))
    entries: list  # [(prime q, exponent, FactorClass)]

    @property
    def violations(self):
        return [(q, e) for q, e, cls in self.entries if cls is FactorClass.VIOLATION]

    def to_json_dict(self):
        return {
            "p": self.p,
            "L": self.L,
            "value": self.value,
            "entries": [(q, e, cls) for q, e, cls in self.entries],
        }


def cyclotomic_factor_check(
    p: int,
    L: int,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
) -> CyclotomicCheck:
    """Factor sigma(p^(L-1)) for primes p != L and classify each prime
    factor as L itself, 1 mod L, or a violation (expected never)."""
    if not (is_prime(p) and is_prime(L)):
        raise PreconditionViolated("p and L must be prime")
    if p == L:
        raise PreconditionViolated("p = L is reported separately, not here")
    value = (p**L - 1) // (p - 1)
    f = cached_factor(value, budget=budget, cache=cache)
    entries = []
    for pp in f.parts:
        if pp.prime == L:
            cls = FactorClass.EQUALS_L
        elif pp.prime % L == 1:
            cls = FactorClass.ONE_MOD_L
        else:
            cls = FactorClass.VIOLATION
        entries.append((pp.prime, pp.exponent, cls))
    return CyclotomicCheck(p, L, value, entries)


@dataclass
class LValuation:
    q: int
    L: int
    value: int  # sigma(q^(L-1))
    valuation: int
    exact_once: bool

    def to_json_dict(self):
        return {
            "q": self.q,
            "L": self.L,
            "value": self.value,
            "valuation": self.valuation,
            "exact_once": self.exact_once,
        }


def exact_L_divisibility(q: int, L: int, diagnostic: bool = False) -> LValuation:
    """Exponent of L in sigma(q^(L-1)) for primes q = 1 mod L.

    For odd prime L the valuation is exactly 1.  L = 2 genuinely breaks
    the rule (sigma(3) = 4), so it is only reachable with diagnostic=True,
    which reports the valuation without any expectation attached.
    """
    if not (is_prime(q) and is_prime(L)):
        raise PreconditionViolated("q and L must be prime")
    if L == 2 and not diagnostic:
        raise PreconditionViolated(
            "L = 2 valuations can exceed 1; use diagnostic=True to report them"
        )
    if q % L != 1:
        raise PreconditionViolated(f"need q = 1 mod L, got {q} mod {L} = {q % L}")
    value = (q**L - 1) // (q - 1)
    valuation = 0
    rem = value
    while rem % L == 0:
        rem //= L
        valuation += 1
    return LValuation(q, L, value, valuation, valuation == 1)


@dataclass
class Result2Bounds:
    L: int
    m_count: int
    index: Fraction
    lhs: Fraction  # (L/(L-1))^(m+1)
    rhs: Fraction  # L
    consistent: bool  # lhs >= index >= rhs

    def to_json_dict(self):
        return {
            "L": self.L,
            "m_count": self.m_count,
            "index": self.index,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "consistent": self.consistent,
        }


def result2_bound_check(L: int, m_count: int, index) -> Result2Bounds:
    """Exact check of (L/(L-1))^(m_count+1) >= index >= L.

    Accepts synthetic (L, m_count, index) triples so the boundary cases
    can be probed without needing multiperfect witnesses that do not
    exist; use count_one_mod_L to derive m_count from a real record.
    """
    if L < 2:
        raise PreconditionViolated("L must be >= 2")
    index = Fraction(index)
    lhs = Fraction(L, L - 1) ** (m_count + 1)
    rhs = Fraction(L)
    return Result2Bounds(L, m_count, index, lhs, rhs, lhs >= index >= rhs)


def count_one_mod_L(f: Factorization, L: int) -> int:
    """Distinct prime factors that are 1 mod L."""
    return sum(1 for pp in f.parts if pp.prime % L == 1)


def squarefree_multiperfect_scan(
    limit: int,
    jobs: int = 1,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
):
    """Squarefree multiperfect records up to limit (expected: only n=6)."""
    return [r for r in multiperfect_scan(limit, jobs, budget, cache) if r.squarefree]


def prime_gap_check(f: Factorization) -> bool:
    """For squarefree candidates: largest prime factor at most one more
    than the second largest."""
    if any(pp.exponent != 1 for pp in f.parts):
        raise PreconditionViolated(f"{f.value} is not squarefree")
    if len(f.parts) < 2:
        raise TooFewFactors(f"{f.value} has fewer than two prime factors")
    primes = [pp.prime for pp in f.parts]
    return primes[-1] <= primes[-2] + 1
