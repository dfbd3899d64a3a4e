"""sigmalab: a workbench for iterated sum-of-divisors dynamics.

Exact, arbitrary-precision computation of the divisor sum, its k-fold
iterates, divisor power sums, and aliquot sequences, plus the scans and
congruence probes built on them.  See the CLI (``sigma-lab``) for the
scriptable surface.
"""

__version__ = "0.1.0"

from sigmalab.arith import (
    Budget,
    BudgetExhausted,
    DigitLimit,
    Factorization,
    PrimePower,
    abundancy,
    abundancy_bounds,
    aliquot,
    factor,
    is_prime,
    L_invariant,
    sigma,
    sigma_pow,
    tau,
)
from sigmalab.store import FactorCache

__all__ = [
    "Budget",
    "BudgetExhausted",
    "DigitLimit",
    "FactorCache",
    "Factorization",
    "PrimePower",
    "abundancy",
    "abundancy_bounds",
    "aliquot",
    "factor",
    "is_prime",
    "L_invariant",
    "sigma",
    "sigma_pow",
    "tau",
    "__version__",
]
