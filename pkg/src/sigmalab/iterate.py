"""Iteration engine for the divisor-sum map and the aliquot map.

Produces full traces of sigma-iteration and aliquot iteration together
with the gcd and ratio diagnostic sequences, increasing aliquot chains,
and the two-sided growth-window sampler.

The sigma step never factors the iterate as one big integer: sigma of a
factored value is a product of sigma(p^e) pieces, and each piece splits
further into cyclotomic-polynomial values, so only those much smaller
numbers ever reach the factoring probes.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from sigmalab import kernels
from sigmalab.arith import (
    DEFAULT_BUDGET,
    Budget,
    BudgetExhausted,
    DigitLimit,
    Factorization,
    WorkMeter,
    abundancy,
    aliquot,
    digits,
    sigma,
)
from sigmalab.store import FactorCache, cached_factor

TRACE_FACTORIZATION_DIGIT_CAP = 120
ALIQUOT_VISITED_CAP = 10_000


class NotMultiperfect(ValueError):
    """Operation requires n | sigma(n)."""


class TraceStatus(str, Enum):
    COMPLETE = "COMPLETE"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"
    DIGIT_LIMIT = "DIGIT_LIMIT"


class AliquotStatus(str, Enum):
    REACHED_ZERO = "REACHED_ZERO"
    CYCLE = "CYCLE"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"
    DIGIT_LIMIT = "DIGIT_LIMIT"
    HORIZON = "HORIZON"


@dataclass
class TraceEntry:
    k: int
    value: int
    factorization: Factorization | None
    residue_mod_start: int

    def to_json_dict(self):
        return {
            "k": self.k,
            "value": self.value,
            "factorization": self.factorization,
            "residue_mod_start": self.residue_mod_start,
        }


@dataclass
class SigmaTrace:
    start: int
    entries: list
    status: TraceStatus

    def values(self):
        return [e.value for e in self.entries]

    def residues(self):
        return [e.residue_mod_start for e in self.entries]

    def to_json_dict(self):
        return {"start": self.start, "entries": self.entries, "status": self.status}


@dataclass
class AliquotTrace:
    start: int
    entries: list
    status: AliquotStatus
    cycle_length: int | None = None

    def values(self):
        return [e.value for e in self.entries]

    def to_json_dict(self):
        return {
            "start": self.start,
            "entries": self.entries,
            "status": self.status,
            "cycle_length": self.cycle_length,
        }


def _divisors_of(n: int):
    """All divisors of a small positive integer, ascending."""
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def _cyclotomic_values(p: int, n: int):
    """Values Phi_d(p) for every divisor d > 1 of n.

    Their product is (p^n - 1)/(p - 1) = sigma(p^(n-1)); evaluating the
    cyclotomic pieces first hands the factoring probes much smaller
    integers than the full divisor sum.
    """
    vals = {1: p - 1}
    for d in _divisors_of(n)[1:]:
        q = p**d - 1
        for dd in _divisors_of(d)[:-1]:
            q //= vals[dd]
        vals[d] = q
    return [vals[d] for d in _divisors_of(n)[1:]]


def sigma_step(
    f: Factorization,
    budget: Budget = DEFAULT_BUDGET,
    meter: WorkMeter = None,
    cache: FactorCache = None,
) -> Factorization:
    """Factorization of sigma(f.value), built piecewise from f's parts."""
    if meter is None:
        meter = WorkMeter(budget.max_work)
    merged = {}
    for pp in f.parts:
        for piece in _cyclotomic_values(pp.prime, pp.exponent + 1):
            if piece == 1:
                continue
            if digits(piece) > budget.max_digits:
                raise DigitLimit(f"sigma piece has {digits(piece)} digits")
            g = cached_factor(piece, budget=budget, meter=meter, cache=cache)
            for q, e in g.pairs():
                merged[q] = merged.get(q, 0) + e
    return Factorization.from_pairs(merged.items())


def iterate_sigma(
    n: int,
    k_max: int,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
    store_digit_cap: int = TRACE_FACTORIZATION_DIGIT_CAP,
) -> SigmaTrace:
    """Trace n, sigma(n), ..., sigma^k_max(n) with residues mod n.

    One work meter spans the whole trace.  Budget and digit-cap problems
    end the trace with the matching status instead of raising.
    """
    if n < 1:
        raise ValueError("n must be positive")
    meter = WorkMeter(budget.max_work)

    def keep(f):
        return f if digits(f.value) <= store_digit_cap else None

    entries = []
    status = TraceStatus.COMPLETE
    try:
        cur = cached_factor(n, budget=budget, meter=meter, cache=cache)
    except BudgetExhausted:
        entries.append(TraceEntry(0, n, None, 0))
        return SigmaTrace(n, entries, TraceStatus.BUDGET_EXHAUSTED)
    entries.append(TraceEntry(0, n, keep(cur), 0))
    for k in range(1, k_max + 1):
        value = sigma(cur)
        if digits(value) > budget.max_digits:
            entries.append(TraceEntry(k, value, None, value % n))
            status = TraceStatus.DIGIT_LIMIT
            break
        try:
            cur = sigma_step(cur, budget=budget, meter=meter, cache=cache)
        except BudgetExhausted:
            entries.append(TraceEntry(k, value, None, value % n))
            status = TraceStatus.BUDGET_EXHAUSTED
            break
        except DigitLimit:
            entries.append(TraceEntry(k, value, None, value % n))
            status = TraceStatus.DIGIT_LIMIT
            break
        entries.append(TraceEntry(k, value, keep(cur), value % n))
    return SigmaTrace(n, entries, status)


def iterate_aliquot(
    n: int,
    k_max: int,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
    store_digit_cap: int = TRACE_FACTORIZATION_DIGIT_CAP,
    visited_cap: int = ALIQUOT_VISITED_CAP,
) -> AliquotTrace:
    """Trace the aliquot map until zero, a cycle, the horizon, or budget.

    Cycles are detected by a visited-value map (aliquot cycles of
    interest are short); when the map outgrows visited_cap the trace is
    cut off as HORIZON.
    """
    if n < 1:
        raise ValueError("n must be positive")
    meter = WorkMeter(budget.max_work)
    entries = []
    visited = {n: 0}
    value = n
    status = AliquotStatus.HORIZON
    cycle_length = None
    for k in range(0, k_max + 1):
        if digits(value) > budget.max_digits:
            entries.append(TraceEntry(k, value, None, value % n))
            status = AliquotStatus.DIGIT_LIMIT
            break
        try:
            f = cached_factor(value, budget=budget, meter=meter, cache=cache)
        except (BudgetExhausted, DigitLimit) as exc:
            entries.append(TraceEntry(k, value, None, value % n))
            status = (
                AliquotStatus.BUDGET_EXHAUSTED
                if isinstance(exc, BudgetExhausted)
                else AliquotStatus.DIGIT_LIMIT
            )
            break
        keep = f if digits(value) <= store_digit_cap else None
        entries.append(TraceEntry(k, value, keep, value % n))
        if k == k_max:
            break
        nxt = aliquot(f)
        if nxt == 0:
            entries.append(TraceEntry(k + 1, 0, None, 0))
            status = AliquotStatus.REACHED_ZERO
            break
        if nxt in visited:
            entries.append(TraceEntry(k + 1, nxt, None, nxt % n))
            status = AliquotStatus.CYCLE
            cycle_length = k + 1 - visited[nxt]
            break
        if len(visited) >= visited_cap:
            status = AliquotStatus.HORIZON
            break
        visited[nxt] = k + 1
        value = nxt
    return AliquotTrace(n, entries, status, cycle_length)


def gcd_sequence(
    n: int,
    k_max: int,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
):
    """Running gcds g_0=n, g_{i+1}=gcd(g_i, sigma^{i+1}(n)).

    Returns (values, status); the list is truncated where the trace was.
    """
    trace = iterate_sigma(n, k_max, budget=budget, cache=cache, store_digit_cap=0)
    gs = [n]
    for entry in trace.entries[1:]:
        gs.append(math.gcd(gs[-1], entry.value))
    return gs, trace.status


def ratio_sequence(
    n: int,
    k_max: int,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
):
    """Exact step ratios r_i = sigma^{i+1}(n) / sigma^i(n); (values, status)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    trace = iterate_sigma(n, k_max, budget=budget, cache=cache, store_digit_cap=0)
    vals = trace.values()
    ratios = [Fraction(vals[i + 1], vals[i]) for i in range(len(vals) - 1)]
    return ratios, trace.status


def square_probe(trace: SigmaTrace):
    """First k whose trace value is a square or twice a square, else None."""
    for entry in trace.entries:
        v = entry.value
        r = math.isqrt(v)
        if r * r == v:
            return entry.k
        if v % 2 == 0:
            r = math.isqrt(v // 2)
            if 2 * r * r == v:
                return entry.k
    return None


def lenstra_chain_search(
    k: int,
    m_max: int,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
):
    """Smallest m <= m_max whose aliquot iterates strictly increase for k
    steps, verified by recomputing the whole chain; None when no m qualifies."""
    if k < 1:
        raise ValueError("k must be >= 1")
    memo = {}

    def s(x):
        if x not in memo:
            f = cached_factor(x, budget=budget, cache=cache)
            memo[x] = aliquot(f)
        return memo[x]

    def chain_holds(m, step):
        prev = m
        for _ in range(k):
            nxt = step(prev)
            if nxt <= prev:
                return False
            prev = nxt
        return True

    def s_fresh(x):
        return aliquot(cached_factor(x, budget=budget))

    for m in range(2, m_max + 1):
        if chain_holds(m, s):
            # guard: recompute the chain without the memo before reporting
            assert chain_holds(m, s_fresh)
            return m
    return None


@dataclass
class ErdosViolation:
    m: int
    i: int
    side: str  # "lower" | "upper"
    chain_value: int


@dataclass
class ErdosReport:
    """Exceptions to the two-sided growth window
    (1-delta) m (s(m)/m)^i < s^i(m) < (1+delta) m (s(m)/m)^i,  1 <= i <= k."""

    k: int
    delta: Fraction
    m_lo: int
    m_hi: int
    applicable: int
    inapplicable: int
    per_step_violations: list  # [(i, lower_count, upper_count)]
    violators: int
    violation_fraction: Fraction
    samples: list = field(default_factory=list)

    def to_json_dict(self):
        return {
            "k": self.k,
            "delta": self.delta,
            "m_lo": self.m_lo,
            "m_hi": self.m_hi,
            "applicable": self.applicable,
            "inapplicable": self.inapplicable,
            "per_step_violations": self.per_step_violations,
            "violators": self.violators,
            "violation_fraction": self.violation_fraction,
            "samples": [
                {"m": v.m, "i": v.i, "side": v.side, "chain_value": v.chain_value}
                for v in self.samples
            ],
        }


def erdos_sampler(
    k: int,
    delta: Fraction,
    m_lo: int,
    m_hi: int,
    budget: Budget = DEFAULT_BUDGET,
    sample_cap: int = 20,
) -> ErdosReport:
    """Count m in [m_lo, m_hi] leaving the growth window at some step i <= k.

    m whose aliquot chain dies (hits 0, or 1 before step k) are
    inapplicable -- the window compares positive quantities -- and are
    tallied separately.  All comparisons are exact integer arithmetic.
    """
    if m_lo < 2 or m_hi < m_lo:
        raise ValueError("need 2 <= m_lo <= m_hi")
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0,1)")
    sig = kernels.sigma_sieve(m_hi)
    overflow = {}

    def s(x):
        if x <= m_hi:
            return sig[x] - x
        if x not in overflow:
            overflow[x] = aliquot(cached_factor(x, budget=budget))
        return overflow[x]

    a, b = delta.numerator, delta.denominator
    lower_counts = [0] * (k + 1)
    upper_counts = [0] * (k + 1)
    applicable = 0
    inapplicable = 0
    violators = 0
    samples = []
    for m in range(m_lo, m_hi + 1):
        chain = [m]
        dead = False
        for i in range(1, k + 1):
            nxt = s(chain[-1])
            if nxt == 0 or (nxt == 1 and i < k):
                dead = True
                break
            chain.append(nxt)
        if dead:
            inapplicable += 1
            continue
        applicable += 1
        s1 = chain[1]
        bad = False
        for i in range(1, k + 1):
            si = chain[i]
            lhs_scale = b * si * m ** (i - 1)
            window = s1**i
            if (b - a) * window >= lhs_scale:
                lower_counts[i] += 1
                bad = True
                if len(samples) < sample_cap:
                    samples.append(ErdosViolation(m, i, "lower", si))
            if lhs_scale >= (b + a) * window:
                upper_counts[i] += 1
                bad = True
                if len(samples) < sample_cap:
                    samples.append(ErdosViolation(m, i, "upper", si))
        if bad:
            violators += 1
    fraction = Fraction(violators, applicable) if applicable else Fraction(0)
    return ErdosReport(
        k=k,
        delta=delta,
        m_lo=m_lo,
        m_hi=m_hi,
        applicable=applicable,
        inapplicable=inapplicable,
        per_step_violations=[(i, lower_counts[i], upper_counts[i]) for i in range(1, k + 1)],
        violators=violators,
        violation_fraction=fraction,
        samples=samples,
    )


@dataclass
class Eq1Result:
    n: int
    lhs: Fraction  # S(S(n) * n) = S(sigma(n))
    rhs: Fraction  # S(n) * S(S(n))
    holds: bool

    def to_json_dict(self):
        return {"n": self.n, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def eq1_check(
    n: int,
    budget: Budget = DEFAULT_BUDGET,
    cache: FactorCache = None,
) -> Eq1Result:
    """For multiperfect n, compare S(S(n)*n) against S(n)*S(S(n)) exactly.

    S(n)*n is just sigma(n), so the left side is the abundancy of the
    next sigma-iterate.
    """
    if n < 2:
        raise NotMultiperfect("multiperfect inputs start at 6; 1 is excluded")
    meter = WorkMeter(budget.max_work)
    f = cached_factor(n, budget=budget, meter=meter, cache=cache)
    index = abundancy(f)
    if index.denominator != 1:
        raise NotMultiperfect(f"sigma({n})/{n} = {index} is not an integer")
    f_sigma = sigma_step(f, budget=budget, meter=meter, cache=cache)
    lhs = abundancy(f_sigma)
    f_index = cached_factor(int(index), budget=budget, meter=meter, cache=cache)
    rhs = index * abundancy(f_index)
    return Eq1Result(n, lhs, rhs, lhs < rhs)
