"""Exact arithmetic core: primality, budgeted factorization, divisor sums.

Everything here works on arbitrary-precision integers and is pure: values
are immutable once constructed and safe to share across scan workers.

Factorization strips small primes by trial division (gcd against blocks of
the prime table for speed), then probes the remaining cofactor with Pollard
p-1 and Brent-cycle rho.  Every probe is charged against a work budget so
callers can bound runtime; a cofactor that resists splitting raises
``BudgetExhausted`` instead of spinning forever.

Primality is Miller-Rabin: the 13-prime witness set proven deterministic
below 3.3e24, and 64 fixed strong-pseudoprime rounds above that.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

try:  # gmpy2 speeds the modmul-heavy inner loops; stdlib works fine without it
    from gmpy2 import mpz as _mpz
except ImportError:
    _mpz = int

__all__ = [
    "Budget",
    "BudgetExhausted",
    "DigitLimit",
    "Factorization",
    "PrimePower",
    "WorkMeter",
    "DEFAULT_BUDGET",
    "abundancy",
    "abundancy_bounds",
    "aliquot",
    "digits",
    "factor",
    "is_prime",
    "L_invariant",
    "multiply",
    "omega",
    "sigma",
    "sigma_pow",
    "tau",
]


class BudgetExhausted(RuntimeError):
    """A cofactor resisted splitting within the work budget."""


class DigitLimit(ValueError):
    """Value exceeds the decimal-digit cap for factorization attempts."""


@dataclass(frozen=True)
class Budget:
    """Caps on factorization effort: probe steps and input size."""

    max_work: int = 10_000_000
    max_digits: int = 2000

    def __post_init__(self):
        if self.max_work <= 0 or self.max_digits <= 0:
            raise ValueError("budget fields must be positive")


DEFAULT_BUDGET = Budget()


class WorkMeter:
    """Mutable probe-step counter, shared across the calls of one task."""

    __slots__ = ("limit", "spent")

    def __init__(self, limit: int):
        self.limit = limit
        self.spent = 0

    def charge(self, units: int = 1):
        self.spent += units
        if self.spent > self.limit:
            raise BudgetExhausted(f"work budget of {self.limit} probe steps exhausted")


@dataclass(frozen=True)
class PrimePower:
    prime: int
    exponent: int

    def __post_init__(self):
        if self.prime < 2:
            raise ValueError(f"prime must be >= 2, got {self.prime}")
        if self.exponent < 1:
            raise ValueError(f"exponent must be >= 1, got {self.exponent}")


@dataclass(frozen=True)
class Factorization:
    """A positive integer with its ordered prime-power decomposition."""

    value: int
    parts: tuple

    def __post_init__(self):
        prod = 1
        prev = 1
        for pp in self.parts:
            if pp.prime <= prev:
                raise ValueError("parts must be strictly increasing by prime")
            prev = pp.prime
            prod *= pp.prime**pp.exponent
        if prod != self.value:
            raise ValueError(f"parts multiply to {prod}, not {self.value}")
        if self.value < 1:
            raise ValueError("value must be positive")

    @classmethod
    def from_pairs(cls, pairs) -> "Factorization":
        """Build from (prime, exponent) pairs in any order."""
        parts = tuple(PrimePower(p, e) for p, e in sorted(pairs))
        value = 1
        for pp in parts:
            value *= pp.prime**pp.exponent
        return cls(value, parts)

    def pairs(self):
        return [(pp.prime, pp.exponent) for pp in self.parts]

    def __str__(self):
        if not self.parts:
            return "1"
        return " * ".join(
            f"{pp.prime}^{pp.exponent}" if pp.exponent > 1 else str(pp.prime)
            for pp in self.parts
        )


def digits(n: int) -> int:
    """Decimal digit count of a positive integer."""
    return len(str(n))


# --- primality ---------------------------------------------------------

# Witness set proven deterministic for n below this bound (Sorenson/Webster).
_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

_TINY_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _strong_probable_prime(n, d: int, s: int, base: int) -> bool:
    a = base % n
    if a in (0, 1, n - 1):
        return True
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _mr_bases_64():
    # First 64 primes, computed once.
    bases = []
    cand = 2
    while len(bases) < 64:
        if all(cand % p for p in bases):
            bases.append(cand)
        cand += 1
    return tuple(bases)


_ROUND_BASES = None


def is_prime(n: int) -> bool:
    """Exact for n below 3.3e24; 64 strong-pseudoprime rounds above."""
    if n < 2:
        return False
    for p in _TINY_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    nz = _mpz(n)
    if n < _DETERMINISTIC_BOUND:
        bases = _DETERMINISTIC_BASES
    else:
        global _ROUND_BASES
        if _ROUND_BASES is None:
            _ROUND_BASES = _mr_bases_64()
        bases = _ROUND_BASES
    return all(_strong_probable_prime(nz, d, s, a) for a in bases)


# --- trial-division table ----------------------------------------------

TRIAL_BOUND = 100_000
_BLOCK = 64

_prime_blocks_cache = None


def _prime_blocks():
    """Primes below TRIAL_BOUND in blocks of _BLOCK, each with its product."""
    global _prime_blocks_cache
    if _prime_blocks_cache is None:
        sieve = bytearray([1]) * TRIAL_BOUND
        sieve[0] = sieve[1] = 0
        for p in range(2, math.isqrt(TRIAL_BOUND) + 1):
            if sieve[p]:
                sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
        primes = [i for i in range(TRIAL_BOUND) if sieve[i]]
        blocks = []
        for i in range(0, len(primes), _BLOCK):
            chunk = primes[i : i + _BLOCK]
            prod = 1
            for p in chunk:
                prod *= p
            blocks.append((chunk, prod))
        _prime_blocks_cache = blocks
    return _prime_blocks_cache


# --- factorization probes ----------------------------------------------

_PM1_B1 = 40_000
_pm1_exponent_cache = None


def _pm1_exponent() -> int:
    """lcm-style exponent for p-1 stage 1: product of p^floor(log_p B1)."""
    global _pm1_exponent_cache
    if _pm1_exponent_cache is None:
        e = 1
        for chunk, _ in _prime_blocks():
            for p in chunk:
                if p > _PM1_B1:
                    break
                pk = p
                while pk * p <= _PM1_B1:
                    pk *= p
                e *= pk
            else:
                continue
            break
        _pm1_exponent_cache = e
    return _pm1_exponent_cache


def _pollard_pm1(n: int, meter: WorkMeter):
    """One p-1 stage-1 attempt; returns a nontrivial divisor or None."""
    exponent = _pm1_exponent()
    meter.charge(exponent.bit_length() // 8 + 1)
    a = pow(_mpz(2), exponent, _mpz(n))
    g = math.gcd(int(a) - 1, n)
    if 1 < g < n:
        return g
    return None


def _brent_rho(n: int, meter: WorkMeter) -> int:
    """Brent-cycle rho with batched gcds; deterministic parameter schedule.

    Only called on odd composites with no factor below TRIAL_BOUND, so a
    nontrivial divisor exists and is eventually found -- unless the meter
    runs dry first, which surfaces as BudgetExhausted.
    """
    nz = _mpz(n)
    batch = 128
    for c in range(1, 1_000_000):
        y = _mpz(2)
        r = 1
        q = _mpz(1)
        g = 1
        while g == 1:
            x = y
            meter.charge(r)
            for _ in range(r):
                y = (y * y + c) % nz
            k = 0
            while k < r and g == 1:
                ys = y
                steps = min(batch, r - k)
                meter.charge(steps)
                for _ in range(steps):
                    y = (y * y + c) % nz
                    q = q * abs(x - y) % nz
                g = math.gcd(int(q), n)
                k += steps
            r *= 2
        if g == n:
            # Batch overshot; replay the last stretch one gcd at a time.
            g = 1
            while g == 1:
                meter.charge(1)
                ys = (ys * ys + c) % nz
                g = math.gcd(abs(int(x - ys)), n)
        if g != n:
            return g
        # cycle collapsed for this c; try the next polynomial
    raise BudgetExhausted("rho parameter schedule exhausted")  # pragma: no cover


def _split(n: int, out: dict, multiplicity: int, meter: WorkMeter):
    """Recursively split cofactor n (no factors below TRIAL_BOUND) into out."""
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + multiplicity
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, out, 2 * multiplicity, meter)
        return
    d = _pollard_pm1(n, meter) or _brent_rho(n, meter)
    _split(d, out, multiplicity, meter)
    _split(n // d, out, multiplicity, meter)


def factor(n: int, budget: Budget = DEFAULT_BUDGET, meter: WorkMeter = None) -> Factorization:
    """Factor a positive integer under a work budget.

    The result is canonical (parts sorted by prime) and independent of
    probe order.  Raises DigitLimit when n is too large to attempt and
    BudgetExhausted when a cofactor resists splitting in time.
    """
    if n < 1:
        raise ValueError(f"can only factor positive integers, got {n}")
    if digits(n) > budget.max_digits:
        raise DigitLimit(f"{digits(n)} digits exceeds cap of {budget.max_digits}")
    if meter is None:
        meter = WorkMeter(budget.max_work)
    found = {}
    rem = n
    for chunk, prod in _prime_blocks():
        if rem == 1:
            break
        meter.charge(1)
        g = math.gcd(rem, prod)
        if g == 1:
            continue
        for p in chunk:
            if g % p == 0:
                e = 0
                while rem % p == 0:
                    rem //= p
                    e += 1
                found[p] = e
    if rem > 1:
        if rem < TRIAL_BOUND * TRIAL_BOUND:
            # no factor below TRIAL_BOUND, so the cofactor is prime
            found[rem] = found.get(rem, 0) + 1
        else:
            _split(rem, found, 1, meter)
    parts = tuple(PrimePower(p, e) for p, e in sorted(found.items()))
    return Factorization(n, parts)


# --- multiplicative functions ------------------------------------------


def sigma(f: Factorization) -> int:
    """Sum of all divisors: product of (p^(e+1)-1)/(p-1) over the parts."""
    total = 1
    for pp in f.parts:
        total *= (pp.prime ** (pp.exponent + 1) - 1) // (pp.prime - 1)
    return total


def sigma_pow(f: Factorization, k: int) -> int:
    """Sum of k-th powers of divisors; k=0 gives the divisor count."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return tau(f)
    total = 1
    for pp in f.parts:
        pk = pp.prime**k
        total *= (pk ** (pp.exponent + 1) - 1) // (pk - 1)
    return total


def tau(f: Factorization) -> int:
    """Divisor count: product of (e+1)."""
    t = 1
    for pp in f.parts:
        t *= pp.exponent + 1
    return t


def omega(f: Factorization) -> int:
    """Number of distinct prime factors."""
    return len(f.parts)


def aliquot(f: Factorization) -> int:
    """Sum of proper divisors: sigma(n) - n."""
    return sigma(f) - f.value


def abundancy(f: Factorization) -> Fraction:
    """sigma(n)/n in lowest terms."""
    return Fraction(sigma(f), f.value)


def L_invariant(f: Factorization) -> int:
    """lcm of (exponent + 1) over the parts; 1 for the empty factorization."""
    return math.lcm(*(pp.exponent + 1 for pp in f.parts)) if f.parts else 1


def abundancy_bounds(f: Factorization):
    """Bracket sigma(n)/n by products over the distinct primes q of n:
    prod (q+1)/q  <=  sigma(n)/n  <  prod q/(q-1),
    the lower bound attained exactly when n is squarefree."""
    if f.value < 2:
        raise ValueError("bounds need value >= 2")
    lower = Fraction(1)
    upper = Fraction(1)
    for pp in f.parts:
        lower *= Fraction(pp.prime + 1, pp.prime)
        upper *= Fraction(pp.prime, pp.prime - 1)
    return lower, upper


def multiply(f: Factorization, g: Factorization) -> Factorization:
    """Factorization of the product f.value * g.value."""
    merged = dict(f.pairs())
    for p, e in g.pairs():
        merged[p] = merged.get(p, 0) + e
    parts = tuple(PrimePower(p, e) for p, e in sorted(merged.items()))
    return Factorization(f.value * g.value, parts)
