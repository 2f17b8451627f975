"""Shared numeric policy.

Every tolerance used for state validation or derived spectra lives in one
record so tests and library code cannot drift apart. Mutating POLICY is
allowed (e.g. to loosen caps in exploratory scripts) but the defaults are
what the test suite pins down.
"""
from dataclasses import dataclass


@dataclass
class NumericPolicy:
    # state validity: norms, hermiticity, trace
    state_atol: float = 1e-10
    # derived spectra: entropies, eigenvalue comparisons
    spectrum_atol: float = 1e-9
    # eigenvalues below this contribute nothing to entropies
    eig_floor: float = 1e-12
    # uncertainty-principle slack for Gaussian covariance checks
    symplectic_atol: float = 1e-8
    # dense Hilbert-space dimension cap
    dim_cap: int = 2 ** 20
    # branching-representation caps
    branch_cap: int = 64
    env_cap: int = 10 ** 6
    # Gaussian bath band cap
    band_cap: int = 256
    # finegraining branch-count cap
    finegrain_cap: int = 2 ** 16


POLICY = NumericPolicy()


class CapExceeded(ValueError):
    """A configured size cap would be exceeded."""
