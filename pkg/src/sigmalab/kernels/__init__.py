"""Sieve kernel selection.

The compiled extension is used when it was built; otherwise the
pure-Python fallback takes over.  ``SIGMA_LAB_PURE=1`` forces the
fallback (useful for the benchmark and for backend-equivalence tests).
"""

import os

from sigmalab.kernels import _sieve_py

if os.environ.get("SIGMA_LAB_PURE") == "1":
    _impl = _sieve_py
else:
    try:
        from sigmalab.kernels import _sieve_ext as _impl
    except ImportError:
        _impl = _sieve_py

BACKEND = "compiled" if _impl.__name__.endswith("_sieve_ext") else "pure"

spf_sieve = _impl.spf_sieve
sigma_sieve = _impl.sigma_sieve
sigma_segment = _impl.sigma_segment


def available_backends() -> dict:
    """Name -> module for every backend importable in this environment."""
    backends = {"pure": _sieve_py}
    try:
        from sigmalab.kernels import _sieve_ext

        backends["compiled"] = _sieve_ext
    except ImportError:
        pass
    return backends
