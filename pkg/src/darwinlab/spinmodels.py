"""Concrete system-environment spin models.

All Hamiltonians here commute with the system's z operator (pure
decoherence): a c-not imprinting chain, a central spin coupled to
non-interacting bath qubits, the same bath with intra-environment
couplings (dense evolution), and a central-spin bath whose qubits start
partly mixed ("hazy"), purified by local ancillas.

The hazy model with site-independent couplings is permutation symmetric
over the bath, so reduced spectra decompose into spin-sector blocks of
size O(m) instead of 2^m. That is what makes bath sizes of ~10^2 with
per-qubit ancillas tractable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import comb, xlogy

from .numeric import POLICY, CapExceeded
from .branching import BranchingState, gram_entropy
from .info import LN2, _entropy_from_eigs
from .qstate import HilbertShape, StateVector, evolve_diagonal, qubits, tensor

PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
HALF = complex(1.0 / np.sqrt(2.0))


# ---------------------------------------------------------------------------
# c-not chain

def cnot_model(a: complex, b: complex, n: int) -> BranchingState:
    """Perfect-record model: every bath qubit copies the pointer index.

    Two branches with weights (|a|^2, |b|^2); conditional states are the
    orthogonal computational states, so one qubit already carries a full
    classical record.
    """
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > POLICY.state_atol:
        raise ValueError("|a|^2 + |b|^2 must be 1")
    probs = np.array([abs(a) ** 2, abs(b) ** 2])
    phases = np.array([np.angle(a), np.angle(b)])
    zero = np.array([1.0, 0.0], dtype=complex)
    one = np.array([0.0, 1.0], dtype=complex)
    conds = [np.stack([zero, one]) for _ in range(n)]
    return BranchingState(probs, phases, conds)


# ---------------------------------------------------------------------------
# central spin, non-interacting bath

@dataclass
class CentralSpinParams:
    """Couplings d_i (inverse time), elapsed time, and the initial states.

    env_init may be a single qubit ket shared by all bath sites or an
    (N, 2) array of per-site kets; the default |+> maximizes per-qubit
    record capacity (a z eigenstate would only pick up phases and record
    nothing).
    """

    couplings: np.ndarray
    t: float
    system_init: tuple[complex, complex] = (HALF, HALF)
    env_init: np.ndarray | None = None

    def __post_init__(self):
        self.couplings = np.atleast_1d(np.asarray(self.couplings, dtype=float))
        if self.couplings.ndim != 1 or len(self.couplings) < 1:
            raise ValueError("couplings must be a nonempty vector")

    @property
    def n_env(self) -> int:
        return len(self.couplings)

    def env_kets(self) -> np.ndarray:
        if self.env_init is None:
            return np.tile(PLUS, (self.n_env, 1))
        e = np.asarray(self.env_init, dtype=complex)
        if e.ndim == 1:
            e = np.tile(e / np.linalg.norm(e), (self.n_env, 1))
        if e.shape != (self.n_env, 2):
            raise ValueError("env_init must be a qubit ket or an (N, 2) array")
        return e


def uniform_couplings(rng, n: int) -> np.ndarray:
    """Site couplings drawn uniformly from (0, 1]."""
    return 1.0 - rng.random(n)


def central_spin_branching(p: CentralSpinParams) -> BranchingState:
    """Branching state of H = sigma^z sum_i d_i sigma^z_i at time t.

    Branch 0 (system |0>) evolves site i by exp(-i d_i t sigma^z), branch 1
    by the conjugate, so the conditional overlap is
    <env_i| exp(+2 i d_i t sigma^z) |env_i>, i.e. cos(2 d_i t) from |+>.
    """
    a, b = p.system_init
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > POLICY.state_atol:
        raise ValueError("system amplitudes not normalized")
    kets = p.env_kets()
    probs = np.array([abs(a) ** 2, abs(b) ** 2])
    phases = np.array([np.angle(a), np.angle(b)])
    conds = []
    for i, d in enumerate(p.couplings):
        ph = np.exp(-1j * d * p.t * np.array([1.0, -1.0]))
        conds.append(np.stack([ph * kets[i], ph.conj() * kets[i]]))
    return BranchingState(probs, phases, conds)


def plateau_mutual_info(h_s: float, d_env: int, sharp_e: int, sharp_f: float) -> float:
    """Plateau form of I(S:F) for random-ish conditional bath states:

        I = H_S - (e^{H_S} - 1)/2 * (d^-sharpF - d^-(sharpE - sharpF))
    """
    ex = math.exp(h_s) - 1.0
    return h_s - 0.5 * ex * (d_env ** (-sharp_f) - d_env ** (-(sharp_e - sharp_f)))


def redundancy_estimate(h_s: float, d_env: int, sharp_e: int, delta: float) -> tuple[float, float]:
    """Analytic fragment size and redundancy at information deficit delta:

        sharpF_delta = (H_S - ln(2 delta H_S)) / ln d_env,   R = sharpE / sharpF_delta
    """
    if h_s <= 0 or not 0 < delta < 1:
        raise ValueError("need H_S > 0 and 0 < delta < 1")
    arg = 2.0 * delta * h_s
    if arg <= 0:
        raise ValueError("log argument nonpositive")
    sharp_f = (h_s - math.log(arg)) / math.log(d_env)
    if sharp_f <= 0:
        raise ValueError(f"estimate breaks down: sharpF = {sharp_f!r} <= 0")
    return sharp_f, sharp_e / sharp_f


def hazy_redundancy_estimate(r_pure: float, h: float, h_m: float = LN2) -> float:
    """First-order mixed-environment correction R^h = (1 - h/h_m) R."""
    if not 0 <= h <= h_m:
        raise ValueError("need 0 <= h <= h_m")
    return (1.0 - h / h_m) * r_pure


# ---------------------------------------------------------------------------
# interacting environment (dense)

@dataclass
class InteractingEnvParams:
    """Central-spin couplings plus symmetric intra-bath pair couplings.

    pair_couplings must be symmetric with zero diagonal; entry (j, k) is
    used once per unordered pair.
    """

    couplings: np.ndarray
    pair_couplings: np.ndarray
    t: float

    def __post_init__(self):
        self.couplings = np.asarray(self.couplings, dtype=float)
        self.pair_couplings = np.asarray(self.pair_couplings, dtype=float)
        n = len(self.couplings)
        if self.pair_couplings.shape != (n, n):
            raise ValueError("pair coupling matrix shape mismatch")
        if not np.allclose(self.pair_couplings, self.pair_couplings.T, atol=0.0):
            raise ValueError("pair couplings must be symmetric")
        if np.any(np.diagonal(self.pair_couplings) != 0.0):
            raise ValueError("pair couplings must have zero diagonal")
        if n + 1 > 20:
            raise CapExceeded(f"{n}+1 qubits exceeds the dense cap")

    @property
    def n_env(self) -> int:
        return len(self.couplings)


def random_interacting_params(rng, n: int, t: float, sigma_d: float = 0.1,
                              sigma_m: float = 0.001) -> InteractingEnvParams:
    d = rng.normal(0.0, sigma_d, size=n)
    m = rng.normal(0.0, sigma_m, size=(n, n))
    m = np.triu(m, 1)
    m = m + m.T
    return InteractingEnvParams(d, m, t)


def _z_values(n: int) -> np.ndarray:
    """(2^n, n) matrix of sigma^z eigenvalues per computational basis state."""
    idx = np.arange(2 ** n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return 1.0 - 2.0 * bits


def interacting_phase_vector(p: InteractingEnvParams) -> np.ndarray:
    """Energy-times-time phases of H = sz sum_i d_i sz_i + sum_{j<k} m_jk sz_j sz_k
    over the (system, bath_1..bath_N) computational basis."""
    z = _z_values(p.n_env + 1)
    zs, ze = z[:, 0], z[:, 1:]
    energy = zs * (ze @ p.couplings) + 0.5 * np.einsum("bi,ij,bj->b", ze, p.pair_couplings, ze)
    return p.t * energy


def interacting_evolve(p: InteractingEnvParams,
                       system_init: tuple[complex, complex] = (HALF, HALF),
                       env_init: np.ndarray | None = None) -> StateVector:
    """Exact dense state at time t; system is subsystem 0."""
    kets = CentralSpinParams(p.couplings, p.t, system_init, env_init).env_kets()
    state = tensor(StateVector(qubits(1), np.asarray(system_init, dtype=complex)),
                   StateVector(qubits(p.n_env),
                               _product_amps(kets)))
    return evolve_diagonal(state, interacting_phase_vector(p))


def _product_amps(kets: np.ndarray) -> np.ndarray:
    amps = np.array([1.0], dtype=complex)
    for k in kets:
        amps = np.kron(amps, k)
    return amps


# ---------------------------------------------------------------------------
# hazy (partly mixed) environment

@dataclass(frozen=True)
class HazyParams:
    """Per-qubit pre-existing entropy h (nats) out of capacity h_m = ln d."""

    h: float
    h_m: float = LN2

    def __post_init__(self):
        if not 0.0 <= self.h <= self.h_m + 1e-12:
            raise ValueError(f"need 0 <= h <= {self.h_m}")


def binary_entropy(q: float) -> float:
    if q <= 0.0 or q >= 1.0:
        return 0.0
    return float(-q * np.log(q) - (1 - q) * np.log(1 - q))


def haze_weight(h: float) -> float:
    """Invert h = -q ln q - (1-q) ln(1-q) on the branch q in [1/2, 1]."""
    if h < 0 or h > LN2 + 1e-12:
        raise ValueError("qubit entropy must lie in [0, ln 2]")
    if h >= LN2:
        return 0.5
    if h == 0.0:
        return 1.0
    return float(brentq(lambda q: binary_entropy(q) - h, 0.5, 1.0 - 1e-16, xtol=1e-15))


def _spin_axis_op(k: int, axis: np.ndarray) -> np.ndarray:
    """n . J for spin j = k/2 in the basis |r> = x^{k-r} y^r, m_j = j - r."""
    mj = k / 2.0 - np.arange(k + 1)
    lower = np.sqrt((k / 2.0 + mj[:-1]) * (k / 2.0 - mj[:-1] + 1.0))
    op = np.diag(axis[2] * mj).astype(complex)
    op += np.diag(0.5 * (axis[0] + 1j * axis[1]) * lower, k=-1)
    op += np.diag(0.5 * (axis[0] - 1j * axis[1]) * lower, k=1)
    return op


def _sym_unitary(u: np.ndarray, k: int) -> np.ndarray:
    """sym_power of a 2x2 unitary via its spin-j rotation matrix.

    All intermediates stay O(1), unlike the direct polynomial expansion
    whose binomial coefficients cancel catastrophically for k beyond ~30.
    """
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    phase = np.sqrt(det)
    su = u / phase
    cos_half = float(np.clip(su[0, 0].real, -1.0, 1.0))
    sin_half = math.sqrt(max(0.0, 1.0 - cos_half * cos_half))
    theta = 2.0 * math.atan2(sin_half, cos_half)
    if sin_half < 1e-12:
        axis = np.array([0.0, 0.0, 1.0])
    else:
        axis = np.array([-su[0, 1].imag, -su[0, 1].real, -su[0, 0].imag]) / sin_half
    lam, vec = np.linalg.eigh(_spin_axis_op(k, axis))
    rot = (vec * np.exp(-1j * theta * lam)) @ vec.conj().T
    return phase ** k * rot


def sym_power(a: np.ndarray, k: int) -> np.ndarray:
    """Matrix of A acting on the degree-k symmetric subspace of (C^2)^k,
    i.e. the restriction of A^(x k) to the orthonormal symmetric basis
    |r> ~ sym(x^{k-r} y^r). Hermitian for Hermitian A and multiplicative:
    sym_power(AB) = sym_power(A) sym_power(B).

    Computed from the SVD A = U S V*: the diagonal factor lifts exactly
    and each unitary lifts to a Wigner rotation, so accuracy does not
    degrade with k.
    """
    if k == 0:
        return np.ones((1, 1), dtype=complex)
    a = np.asarray(a, dtype=complex)
    u, s, vh = np.linalg.svd(a)
    r = np.arange(k + 1)
    lifted = s[0] ** (k - r) * s[1] ** r
    return _sym_unitary(u, k) @ (lifted[:, None] * _sym_unitary(vh, k))


def sector_label_range(m: int):
    """Spin sectors j of m qubits; 2j runs over m, m-2, ..., (0 or 1)."""
    return [jj2 / 2.0 for jj2 in range(m % 2, m + 1, 2)]


def sector_multiplicity(m: int, j: float) -> int:
    k = int(round(m / 2.0 - j))
    lo = comb(m, k - 1, exact=True) if k >= 1 else 0
    return comb(m, k, exact=True) - lo


def sector_block(a: np.ndarray, m: int, j: float) -> np.ndarray:
    """Irreducible block of A^(x m) in the spin-j sector: det(A)^(m/2-j) Sym^(2j)(A)."""
    k = int(round(m / 2.0 - j))
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return (det ** k) * sym_power(a, int(round(2 * j)))


class HazyCentralSpin:
    """Central spin over N bath qubits that start with entropy h each.

    Site couplings must be equal; every bath qubit is purified by a local
    ancilla, and observers hold bath qubits only. Permutation symmetry
    turns all reduced spectra into per-sector blocks, exact for any N.
    """

    def __init__(self, n: int, coupling: float, t: float, haze: HazyParams,
                 system_init: tuple[complex, complex] = (HALF, HALF)):
        if n < 1:
            raise ValueError("need at least one bath qubit")
        self.n = n
        self.coupling = float(coupling)
        self.t = float(t)
        self.haze = haze
        a, b = system_init
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > POLICY.state_atol:
            raise ValueError("system amplitudes not normalized")
        self.amps = np.array([a, b], dtype=complex)
        q = haze_weight(haze.h)
        self.q = q
        phase = np.exp(-1j * self.coupling * self.t * np.array([1.0, -1.0]))
        u0 = np.diag(phase)
        u1 = np.diag(phase.conj())
        plus = np.outer(PLUS, PLUS.conj())
        minus = np.eye(2) - plus
        rho_mix = q * plus + (1 - q) * minus
        self.x = u0 @ rho_mix @ u0.conj().T
        self.y = u1 @ rho_mix @ u1.conj().T
        self.m01 = u0 @ rho_mix @ u1.conj().T
        # per-site branch overlap; independent of q
        self.g = float(np.trace(rho_mix @ u1.conj().T @ u0).real)

    def _p(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def system_entropy(self) -> float:
        p = self._p()
        off = self.amps[0] * self.amps[1].conjugate() * self.g ** self.n
        rho = np.array([[p[0], off], [np.conj(off), p[1]]])
        return _entropy_from_eigs(np.linalg.eigvalsh(rho))

    def _sector_eigs(self, m: int, joint: bool):
        """Eigenvalue/multiplicity pairs of the fragment (or system+fragment)."""
        p = self._p()
        gamma = self.amps[0] * self.amps[1].conjugate() * self.g ** (self.n - m)
        for j in sector_label_range(m):
            bx = sector_block(self.x, m, j)
            by = sector_block(self.y, m, j)
            if joint:
                bm = sector_block(self.m01, m, j)
                top = np.hstack([p[0] * bx, gamma * bm])
                bot = np.hstack([np.conj(gamma) * bm.conj().T, p[1] * by])
                block = np.vstack([top, bot])
            else:
                block = p[0] * bx + p[1] * by
            block = 0.5 * (block + block.conj().T)
            yield np.linalg.eigvalsh(block), sector_multiplicity(m, j)

    def _entropy(self, m: int, joint: bool) -> float:
        if m == 0:
            return self.system_entropy() if joint else 0.0
        total = 0.0
        for lam, mult in self._sector_eigs(m, joint):
            # no absolute floor here: sector multiplicities reach 1e12+,
            # so even 1e-14 eigenvalues can carry real weight
            lam = np.clip(lam, 0.0, None)
            total += mult * float(-np.sum(xlogy(lam, lam)))
        return total

    def fragment_entropy(self, m: int) -> float:
        """Entropy of m bath qubits (ancillas and system traced out)."""
        return self._entropy(m, joint=False)

    def joint_entropy(self, m: int) -> float:
        """Entropy of the system plus m bath qubits."""
        return self._entropy(m, joint=True)

    def mutual_info(self, m: int) -> float:
        if not 0 <= m <= self.n:
            raise ValueError("fragment size out of range")
        if m == 0:
            return 0.0
        return self.system_entropy() + self.fragment_entropy(m) - self.joint_entropy(m)

    def classical_term(self, m: int) -> float:
        """Locally accessible part H_F(t) - H_F(0); vanishes at h = h_m."""
        return self.fragment_entropy(m) - m * self.haze.h

    def dense_export(self) -> StateVector:
        """(system, qubit+ancilla pairs interleaved) for small-N oracle checks."""
        q = self.q
        chi = (np.sqrt(q) * np.kron(PLUS, [1, 0])
               + np.sqrt(1 - q) * np.kron(np.array([1, -1]) / np.sqrt(2), [0, 1]))
        phase = np.exp(-1j * self.coupling * self.t * np.array([1.0, -1.0]))
        u = [np.kron(np.diag(phase), np.eye(2)), np.kron(np.diag(phase.conj()), np.eye(2))]
        dims = (2,) + (2,) * (2 * self.n)
        shape = HilbertShape(dims)
        amps = np.zeros(shape.total_dim, dtype=complex)
        for k in range(2):
            branch = np.zeros(2, dtype=complex)
            branch[k] = self.amps[k]
            per_site = u[k] @ chi
            for _ in range(self.n):
                branch = np.kron(branch, per_site)
            amps += branch
        return StateVector(shape, amps)


def hazy_redundancy(base: CentralSpinParams, hp: HazyParams, delta: float = 0.1) -> float:
    """Redundancy at deficit delta for the hazy central-spin model.

    Site couplings must be equal (the permutation-symmetric fast path).
    Crossing of (1 - delta) H_S is located by linear interpolation between
    integer fragment sizes, never below one qubit. Only fragments strictly
    below half the bath count: at exactly half, purity alone pins I at H_S,
    which says nothing about records. If no sub-half fragment crosses, the
    returned value is the achieved fraction of the threshold (< 1).
    """
    d = np.unique(base.couplings)
    if len(d) != 1:
        raise ValueError("fast path requires equal couplings")
    model = HazyCentralSpin(base.n_env, float(d[0]), base.t, hp, base.system_init)
    h_s = model.system_entropy()
    if h_s <= 0.0:
        raise ValueError("system entropy is zero; redundancy undefined")
    threshold = (1.0 - delta) * h_s
    prev_m, prev_i = 0, 0.0
    for m in range(1, (base.n_env - 1) // 2 + 1):
        cur = model.mutual_info(m)
        if cur >= threshold:
            if m == 1:
                return float(base.n_env)
            frac = (threshold - prev_i) / (cur - prev_i)
            return base.n_env / (prev_m + frac * (m - prev_m))
        prev_m, prev_i = m, cur
    return prev_i / threshold
