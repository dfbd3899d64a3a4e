# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sieve kernels: smallest-prime-factor table and batched divisor sums."""

import array

from cpython cimport array


cdef array.array _LONGLONG_TEMPLATE = array.array("q", [])


def spf_sieve(Py_ssize_t limit):
    """Smallest prime factor for 0..limit; spf[0]=0, spf[1]=1, spf[p]=p."""
    if limit < 0:
        raise ValueError("limit must be non-negative")
    cdef array.array out = array.clone(_LONGLONG_TEMPLATE, limit + 1, zero=False)
    cdef long long[::1] spf = out
    cdef Py_ssize_t i, m, p
    for i in range(limit + 1):
        spf[i] = i
    p = 2
    while p * p <= limit:
        if spf[p] == p:
            for m in range(p * p, limit + 1, p):
                if spf[m] == m:
                    spf[m] = p
        p += 1
    return out


def sigma_sieve(Py_ssize_t limit):
    """Sum of divisors for 0..limit via one multiplicative pass over the
    smallest-prime-factor table; sigma[0]=0."""
    if limit < 0:
        raise ValueError("limit must be non-negative")
    cdef array.array spf_arr = spf_sieve(limit)
    cdef long long[::1] spf = spf_arr
    cdef array.array out = array.clone(_LONGLONG_TEMPLATE, limit + 1, zero=True)
    cdef array.array pp_arr = array.clone(_LONGLONG_TEMPLATE, limit + 1, zero=True)
    cdef long long[::1] sig = out
    cdef long long[::1] pp = pp_arr  # pp[n] = spf(n)^e, the full power of spf(n) in n
    cdef Py_ssize_t n
    cdef long long p, m, q
    if limit >= 1:
        sig[1] = 1
        pp_arr[1] = 1
    for n in range(2, limit + 1):
        p = spf[n]
        m = n // p
        if m % p != 0:
            pp[n] = p
            sig[n] = sig[m] * (p + 1)
        else:
            pp[n] = pp[m] * p
            q = pp[n] * p  # p^(e+1)
            sig[n] = sig[n // pp[n]] * ((q - 1) // (p - 1))
    return out


def sigma_segment(long long lo, long long hi):
    """Sum of divisors for lo <= n < hi as an array of length hi-lo."""
    if lo < 0 or hi < lo:
        raise ValueError("need 0 <= lo <= hi")
    cdef array.array out = array.clone(_LONGLONG_TEMPLATE, hi - lo, zero=True)
    cdef long long[::1] sig = out
    cdef long long d, m, start
    for d in range(1, hi):
        start = lo + (d - lo % d) % d
        if start < d:
            start = d
        for m in range(start, hi, d):
            sig[m - lo] += d
    return out
