"""Branching states and the Gram-matrix fast path.

A branching state is

    sum_k  exp(i phi_k) sqrt(p_k) |pointer_k> prod_l |cond_k^(l)>

with orthonormal pointer states and a product of per-subsystem conditional
environment states in each branch. All fragment entropies then reduce to
K x K eigenproblems:

  * the fragment alone is a K-member mixture of product states, so its
    spectrum is that of the Gram kernel sqrt(p_j p_k) prod_F <cond_j|cond_k>;
  * fragment plus system has the spectrum of the phase-carrying kernel over
    the complement (global purity swaps the two sides).

That keeps environments of ~10^6 subsystems tractable: cost per fragment is
O(K^2 |F|) plus a K x K eigendecomposition.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numeric import POLICY, CapExceeded
from .qstate import FragmentSpec, HilbertShape, StateVector, _as_fragment
from .info import LN2, _entropy_from_eigs

# cache per-subsystem overlap tables only below this entry count
_OVERLAP_CACHE_LIMIT = 2 ** 24


@dataclass
class BranchingState:
    """probs/phases over K branches plus a K x N table of conditional states.

    conditionals[l] is a (K, d_l) array; row k is the normalized state of
    environment subsystem l in branch k. Zero-weight branches are allowed
    (they must carry zero probability in every derived quantity).
    """

    probs: np.ndarray
    phases: np.ndarray
    conditionals: list

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        self.phases = np.asarray(self.phases, dtype=float)
        k = len(self.probs)
        if k < 1 or k > POLICY.branch_cap:
            raise CapExceeded(f"branch count {k} outside [1, {POLICY.branch_cap}]")
        if self.probs.min() < -POLICY.eig_floor or abs(self.probs.sum() - 1.0) > POLICY.spectrum_atol:
            raise ValueError("branch probabilities must be a probability vector")
        self.probs = np.clip(self.probs, 0.0, None)
        if self.phases.shape != (k,):
            raise ValueError("phase/prob length mismatch")
        if len(self.conditionals) > POLICY.env_cap:
            raise CapExceeded(f"environment size {len(self.conditionals)} exceeds cap")
        conds = []
        for l, table in enumerate(self.conditionals):
            t = np.asarray(table, dtype=complex)
            if t.ndim != 2 or t.shape[0] != k:
                raise ValueError(f"conditional table {l} must be (K, d)")
            nrm = np.linalg.norm(t, axis=1)
            if np.abs(nrm - 1.0).max() > POLICY.state_atol:
                raise ValueError(f"conditional states of subsystem {l} not normalized")
            conds.append(t)
        self.conditionals = conds
        self._overlaps = None

    @property
    def n_branches(self) -> int:
        return len(self.probs)

    @property
    def n_env(self) -> int:
        return len(self.conditionals)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.sqrt(self.probs) * np.exp(1j * self.phases)

    def _pair_overlaps(self, indices) -> np.ndarray:
        """Stack of per-subsystem overlap matrices O[l][j,k] = <cond_j|cond_k>."""
        k = self.n_branches
        if self._overlaps is None and k * k * self.n_env <= _OVERLAP_CACHE_LIMIT:
            self._overlaps = np.stack([t.conj() @ t.T for t in self.conditionals])
        if self._overlaps is not None:
            return self._overlaps[list(indices)]
        return np.stack([self.conditionals[l].conj() @ self.conditionals[l].T for l in indices])

    def overlap_product(self, frag: FragmentSpec) -> np.ndarray:
        """prod_{l in frag} <cond_j^(l)|cond_k^(l)> as a K x K matrix."""
        k = self.n_branches
        idx = frag.sorted
        if not idx:
            return np.ones((k, k), dtype=complex)
        return np.prod(self._pair_overlaps(idx), axis=0)


def _check_frag(b: BranchingState, frag) -> FragmentSpec:
    frag = _as_fragment(frag)
    if frag.indices and max(frag.indices) >= b.n_env:
        raise ValueError("fragment index out of range")
    return frag


def fragment_gram(b: BranchingState, frag, include_system: bool = False) -> np.ndarray:
    """Gram kernel of the branch vectors restricted to the fragment.

    G[j,k] = sqrt(p_j p_k) exp(i(phi_k - phi_j)) prod_F <cond_j|cond_k>.
    With include_system set, the orthonormal pointer factors multiply the
    off-diagonal overlaps by delta_jk, so the kernel collapses to diag(p).
    """
    frag = _check_frag(b, frag)
    if include_system:
        return np.diag(b.probs).astype(complex)
    amp = np.sqrt(b.probs)
    ph = np.exp(1j * b.phases)
    g = np.outer(amp, amp) * np.outer(ph.conj(), ph) * b.overlap_product(frag)
    return 0.5 * (g + g.conj().T)


def _phase_kernel(b: BranchingState, frag: FragmentSpec) -> np.ndarray:
    """Coefficient matrix of the system density operator decohered by `frag`.

    Entry (j,k) is a_j a_k^* conj(prod_F <cond_j|cond_k>); its spectrum is
    the spectrum of the reduced state of (system + complement of frag).
    """
    a = b.amplitudes
    g = np.outer(a, a.conj()) * b.overlap_product(frag).conj()
    return 0.5 * (g + g.conj().T)


def gram_entropy(g: np.ndarray) -> float:
    return _entropy_from_eigs(np.linalg.eigvalsh(g))


def fragment_entropy(b: BranchingState, frag, include_system: bool = False) -> float:
    """von Neumann entropy (nats) of a fragment, or of system + fragment.

    The system+fragment case uses global purity: its spectrum equals that
    of the complement fragment's phase-carrying kernel.
    """
    frag = _check_frag(b, frag)
    if include_system:
        comp = frag.complement(b.n_env)
        return gram_entropy(_phase_kernel(b, comp))
    return gram_entropy(fragment_gram(b, frag))


def system_entropy(b: BranchingState) -> float:
    """Entropy of the system after decoherence by the whole environment."""
    return fragment_entropy(b, FragmentSpec.of(), include_system=True)


def decohered_system_entropy(b: BranchingState, frag) -> float:
    """Counterfactual system entropy with only `frag` doing the decohering:
    off-diagonals are damped by the fragment's records alone."""
    frag = _check_frag(b, frag)
    return gram_entropy(_phase_kernel(b, frag))


def mutual_info_branching(b: BranchingState, frag) -> float:
    """I(S : F) = H_S + H_F - H_{S,F} for the pure global branching state."""
    frag = _check_frag(b, frag)
    comp = frag.complement(b.n_env)
    h_s = gram_entropy(_phase_kernel(b, FragmentSpec(frozenset(range(b.n_env)))))
    h_f = gram_entropy(fragment_gram(b, frag))
    h_sf = gram_entropy(_phase_kernel(b, comp))
    return h_s + h_f - h_sf


def two_branch_entropy(gamma: float) -> float:
    """Entropy (nats) of an equal-weight two-branch system with decoherence
    factor gamma = |overlap product|^2.

    Closed form; algebraically identical to
    ln 2 - sqrt(G) arctanh sqrt(G) - ln sqrt(1-G) and to the series
    ln 2 - sum_n G^n / (2n(2n-1)), but stable at both endpoints.
    """
    if gamma < 0.0 or gamma > 1.0:
        raise ValueError(f"gamma {gamma!r} outside [0, 1]")
    r = np.sqrt(gamma)
    # ln2 - (1/2)[(1+r)ln(1+r) + (1-r)ln(1-r)]
    lo = (1.0 - r) * np.log1p(-r) if r < 1.0 else 0.0
    return float(LN2 - 0.5 * ((1.0 + r) * np.log1p(r) + lo))


def classical_quantum_decomposition(b: BranchingState, frag) -> tuple[float, float]:
    """Split I(S:F) into locally accessible and global parts.

    classical = H_F - H_F(0) with H_F(0) = 0 here (conditionals are pure
    and the environment starts in a product state), quantum = H_S - H of
    the system decohered by the complement alone.
    """
    frag = _check_frag(b, frag)
    comp = frag.complement(b.n_env)
    h_f = gram_entropy(fragment_gram(b, frag))
    h_s = system_entropy(b)
    h_s_comp = gram_entropy(_phase_kernel(b, comp))
    return h_f, h_s - h_s_comp


def to_state_vector(b: BranchingState) -> StateVector:
    """Dense export (system factor first); used by oracle tests."""
    if b.n_branches < 2:
        raise ValueError("dense export needs at least two branches")
    dims = (b.n_branches,) + tuple(t.shape[1] for t in b.conditionals)
    shape = HilbertShape(dims)  # raises CapExceeded when too big
    amps = np.zeros(shape.total_dim, dtype=complex)
    a = b.amplitudes
    for k in range(b.n_branches):
        if b.probs[k] == 0.0 and a[k] == 0.0:
            continue
        branch = np.array([a[k]])
        for t in b.conditionals:
            branch = np.kron(branch, t[k])
        block = np.zeros(b.n_branches, dtype=complex)
        block[k] = 1.0
        amps += np.kron(block, branch)
    return StateVector(shape, amps)
