"""Entropies and correlation measures.

All quantities are in nats internally (the analytic closed forms downstream
are stated in natural log); use to_bits() at the output boundary when
base-2 numbers are wanted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numeric import POLICY
from .qstate import DensityMatrix, FragmentSpec, HilbertShape, _as_fragment, partial_trace

LN2 = float(np.log(2.0))


def to_bits(nats: float) -> float:
    return nats / LN2


@dataclass(frozen=True)
class ProbVector:
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1:
            raise ValueError("probability vector must be 1-d")
        if p.min() < -POLICY.eig_floor:
            raise ValueError(f"negative probability {p.min()!r}")
        s = p.sum()
        if abs(s - 1.0) > POLICY.spectrum_atol:
            raise ValueError(f"probabilities sum to {s!r}, not 1")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthogonal projectors on a designated subsystem set, summing to 1."""

    projectors: tuple

    def __post_init__(self):
        ps = tuple(np.ascontiguousarray(p, dtype=complex) for p in self.projectors)
        if not ps:
            raise ValueError("empty basis")
        d = ps[0].shape[0]
        tol = POLICY.state_atol * 10
        acc = np.zeros((d, d), dtype=complex)
        for i, p in enumerate(ps):
            if p.shape != (d, d):
                raise ValueError("projector shape mismatch")
            if not np.allclose(p, p.conj().T, atol=tol, rtol=0.0):
                raise ValueError(f"projector {i} not Hermitian")
            if not np.allclose(p @ p, p, atol=tol, rtol=0.0):
                raise ValueError(f"projector {i} not idempotent")
            acc += p
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                if not np.allclose(ps[i] @ ps[j], 0.0, atol=tol, rtol=0.0):
                    raise ValueError(f"projectors {i},{j} not orthogonal")
        if not np.allclose(acc, np.eye(d), atol=tol, rtol=0.0):
            raise ValueError("projectors do not sum to identity")
        object.__setattr__(self, "projectors", ps)

    @classmethod
    def from_states(cls, kets) -> "MeasurementBasis":
        return cls(tuple(np.outer(k, np.conj(k)) for k in kets))

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]


@dataclass(frozen=True)
class Ensemble:
    weights: ProbVector
    states: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.states):
            raise ValueError("weight/state count mismatch")
        shapes = {s.shape.dims for s in self.states}
        if len(shapes) != 1:
            raise ValueError("ensemble members must share one shape")


def _entropy_from_eigs(lam: np.ndarray) -> float:
    lam = lam[lam > POLICY.eig_floor]
    return float(-np.sum(lam * np.log(lam)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """H(rho) = -Tr rho ln rho, in nats."""
    return _entropy_from_eigs(np.linalg.eigvalsh(rho.mat))


def shannon_entropy(p) -> float:
    if isinstance(p, ProbVector):
        p = p.probs
    p = np.asarray(p, dtype=float)
    return _entropy_from_eigs(p)


def mutual_information(rho: DensityMatrix, part_a) -> float:
    """I(A:B) = H(A) + H(B) - H(AB) over the (part_a, complement) split."""
    part_a = _as_fragment(part_a)
    part_a.validate_for(rho.shape)
    n = rho.shape.n_subsystems
    if not part_a.indices or len(part_a) == n:
        raise ValueError("bipartition must be a proper nonempty subset")
    part_b = part_a.complement(n)
    ha = von_neumann_entropy(partial_trace(rho, part_a))
    hb = von_neumann_entropy(partial_trace(rho, part_b))
    hab = von_neumann_entropy(rho)
    return ha + hb - hab


def _apply_projector(rho: DensityMatrix, projector: np.ndarray, on: FragmentSpec) -> np.ndarray:
    """Compute P rho P with P acting on the `on` subsystems only."""
    dims = rho.shape.dims
    n = len(dims)
    on_s = on.sorted
    rest = [i for i in range(n) if i not in on.indices]
    d_on = rho.shape.dim_of(on_s)
    perm = list(on_s) + rest
    t = rho.mat.reshape(dims + dims)
    t = t.transpose(perm + [n + i for i in perm]).reshape(d_on, -1, d_on, rho.shape.dim_of(rest))
    t = np.einsum("ai,ibjc,jd->abdc", projector, t, projector.conj().T, optimize=True)
    # t axes now: on row, rest row, on col, rest col -> back to original layout
    t = t.reshape([dims[i] for i in perm] + [dims[i] for i in perm])
    inv = np.argsort(perm)
    t = t.transpose(list(inv) + [n + i for i in inv])
    d = rho.shape.total_dim
    return t.reshape(d, d)


def conditional_state(rho: DensityMatrix, projector: np.ndarray, on) -> tuple[DensityMatrix | None, float]:
    """Project, renormalize and return (state, probability).

    A zero-probability branch returns (None, 0.0) rather than raising;
    callers that average over a basis just skip it.
    """
    on = _as_fragment(on)
    on.validate_for(rho.shape)
    projected = _apply_projector(rho, np.asarray(projector, dtype=complex), on)
    p = float(np.trace(projected).real)
    if p <= POLICY.eig_floor:
        return None, 0.0
    out = projected / p
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(rho.shape, out), p


def average_conditional_entropy(rho: DensityMatrix, basis: MeasurementBasis, on) -> float:
    """H(rest | basis on `on`) = sum_k p_k H(rho_rest | outcome k)."""
    on = _as_fragment(on)
    on.validate_for(rho.shape)
    rest = on.complement(rho.shape.n_subsystems)
    if not rest.indices:
        raise ValueError("measurement must leave a nonempty remainder")
    total = 0.0
    for proj in basis.projectors:
        cond, p = conditional_state(rho, proj, on)
        if cond is None:
            continue
        total += p * von_neumann_entropy(partial_trace(cond, rest))
    return total


def asymmetric_mutual_info(rho: DensityMatrix, basis: MeasurementBasis, on) -> float:
    """J = H(rest) - H(rest | outcomes of basis on `on`)."""
    on = _as_fragment(on)
    rest = on.complement(rho.shape.n_subsystems)
    h_rest = von_neumann_entropy(partial_trace(rho, rest))
    return h_rest - average_conditional_entropy(rho, basis, on)


def discord(rho: DensityMatrix, basis: MeasurementBasis, on) -> float:
    """Locally inaccessible information for this particular measurement."""
    on = _as_fragment(on)
    return mutual_information(rho, on) - asymmetric_mutual_info(rho, basis, on)


def bloch_basis(theta: float, phi: float) -> MeasurementBasis:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    k0 = np.array([c, np.exp(1j * phi) * s])
    k1 = np.array([-np.exp(-1j * phi) * s, c])
    return MeasurementBasis.from_states([k0, k1])


def min_discord(rho: DensityMatrix, on, grid: tuple[int, int] = (180, 90)) -> float:
    """Discord minimized over projective qubit bases on a Bloch-angle grid.

    Only qubit subsystems are searched, and only orthonormal bases;
    POVMs are out of scope. Grid resolution trades accuracy for time;
    the default matches the documented policy.
    """
    on = _as_fragment(on)
    on.validate_for(rho.shape)
    if rho.shape.dim_of(on.sorted) != 2:
        raise ValueError("basis search implemented for qubit subsystems only")
    i_sym = mutual_information(rho, on)
    rest = on.complement(rho.shape.n_subsystems)
    h_rest = von_neumann_entropy(partial_trace(rho, rest))
    n_theta, n_phi = grid
    best = np.inf
    for theta in np.linspace(0.0, np.pi, n_theta, endpoint=True):
        for phi in np.linspace(0.0, np.pi, n_phi, endpoint=False):
            j = h_rest - average_conditional_entropy(rho, bloch_basis(theta, phi), on)
            d = i_sym - j
            if d < best:
                best = d
    return float(best)


def holevo(ensemble: Ensemble) -> float:
    """chi = H(sum_k p_k rho_k) - sum_k p_k H(rho_k)."""
    w = ensemble.weights.probs
    avg = sum(p * s.mat for p, s in zip(w, ensemble.states))
    avg = 0.5 * (avg + avg.conj().T)
    h_avg = _entropy_from_eigs(np.linalg.eigvalsh(avg))
    h_members = sum(p * von_neumann_entropy(s) for p, s in zip(w, ensemble.states) if p > 0)
    return h_avg - h_members


def joint_distribution(rho: DensityMatrix, basis_a: MeasurementBasis, on_a,
                       basis_b: MeasurementBasis, on_b) -> np.ndarray:
    """p(i, j) for commuting projective measurements on disjoint subsystem sets."""
    on_a, on_b = _as_fragment(on_a), _as_fragment(on_b)
    if on_a.indices & on_b.indices:
        raise ValueError("measured subsystem sets overlap")
    out = np.zeros((len(basis_a.projectors), len(basis_b.projectors)))
    for i, pa in enumerate(basis_a.projectors):
        cond, p = conditional_state(rho, pa, on_a)
        if cond is None:
            continue
        for j, pb in enumerate(basis_b.projectors):
            _, q = conditional_state(cond, pb, on_b)
            out[i, j] = p * q
    return out


def shannon_mutual_observables(rho: DensityMatrix, basis_a: MeasurementBasis, on_a,
                               basis_b: MeasurementBasis, on_b) -> float:
    """Shannon mutual information of two measured observables."""
    pij = joint_distribution(rho, basis_a, on_a, basis_b, on_b)
    pa = pij.sum(axis=1)
    pb = pij.sum(axis=0)
    return shannon_entropy(pa) + shannon_entropy(pb) - shannon_entropy(pij.reshape(-1))
