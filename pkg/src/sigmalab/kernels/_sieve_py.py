"""Pure-Python sieve kernels.

Fallback implementations of the batched sieve routines; the compiled
extension in ``_sieve_ext.pyx`` is selected instead when it was built.
Both backends return ``array('q')`` and must produce identical values.
"""

from array import array
from math import isqrt


def spf_sieve(limit: int) -> array:
    """Smallest prime factor for 0..limit; spf[0]=0, spf[1]=1, spf[p]=p."""
    if limit < 0:
        raise ValueError("limit must be non-negative")
    spf = array("q", range(limit + 1))
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == p:
            for m in range(p * p, limit + 1, p):
                if spf[m] == m:
                    spf[m] = p
    return spf


def sigma_sieve(limit: int) -> array:
    """Sum of divisors for 0..limit; sigma[0]=0.

    Harmonic divisor loop: every d <= limit/2 is added to its proper
    multiples, and the n-divides-n term comes from the initial fill.
    """
    if limit < 0:
        raise ValueError("limit must be non-negative")
    sig = array("q", range(limit + 1))
    for d in range(1, limit // 2 + 1):
        for m in range(2 * d, limit + 1, d):
            sig[m] += d
    return sig


def sigma_segment(lo: int, hi: int) -> array:
    """Sum of divisors for lo <= n < hi as an array of length hi-lo."""
    if not 0 <= lo <= hi:
        raise ValueError("need 0 <= lo <= hi")
    sig = array("q", bytes(8 * (hi - lo)))
    for d in range(1, hi):
        start = max(d, lo + (-lo) % d)
        for m in range(start, hi, d):
            sig[m - lo] += d
    return sig
