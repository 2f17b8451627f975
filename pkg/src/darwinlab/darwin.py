"""Partial-information plots and redundancy extraction.

The experiment layer. Every decoherence model sits behind one small
source interface (size, system entropy, mutual information of a named
fragment) and the functions here do the statistics: uniform fragment
sampling without replacement, crossing detection, counterfactual
decoherence, observable sweeps, and stable CSV/manifest export.

Mirrored fragment sizes of globally pure sources are never recomputed:
purity gives I(E minus F) = 2 H_S - I(F) exactly, so the plot is
antisymmetric about f = 1/2 by construction and half the work is free.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .branching import (BranchingState, classical_quantum_decomposition,
                        decohered_system_entropy, mutual_info_branching,
                        system_entropy, to_state_vector, two_branch_entropy)
from .info import Ensemble, ProbVector, holevo, shannon_entropy
from .numeric import POLICY
from .photon import DecoherenceFactor, isotropic_mutual_info, photon_mutual_info
from .qbm import GaussianState, qbm_mutual_info
from .qstate import (DensityMatrix, FragmentSpec, HilbertShape, StateVector,
                     qubits, reduced_density, subsystem_entropy)
from .spinmodels import HALF, HazyCentralSpin, InteractingEnvParams, interacting_evolve


def _two_level_entropy(p0: float, p1: float, off: complex) -> float:
    lam = np.linalg.eigvalsh(np.array([[p0, off], [np.conj(off), p1]]))
    lam = lam[lam > POLICY.eig_floor]
    return float(-np.sum(lam * np.log(lam)))


# ---------------------------------------------------------------------------
# sources
#
# duck-typed: n_env, tag, symmetric, pure_global, pure_decoherence,
# system_entropy(), fragment_mutual_info(sites). Optional extras light up
# extra analyses: decohered_system_entropy / decoherence_fraction,
# decompose, state_vector.

class DenseSource:
    """Any pure global state with the system as subsystem 0."""

    symmetric = False
    pure_global = True
    pure_decoherence = False

    def __init__(self, state: StateVector, tag: str = "dense"):
        if state.shape.n_subsystems < 2:
            raise ValueError("need a system plus at least one environment part")
        self.state = state
        self.tag = tag
        self._h_s: float | None = None

    @property
    def n_env(self) -> int:
        return self.state.shape.n_subsystems - 1

    def system_entropy(self) -> float:
        if self._h_s is None:
            self._h_s = subsystem_entropy(self.state, (0,))
        return self._h_s

    def fragment_mutual_info(self, sites) -> float:
        keep = tuple(s + 1 for s in sorted(int(s) for s in sites))
        if not keep:
            return 0.0
        h_f = subsystem_entropy(self.state, keep)
        h_sf = subsystem_entropy(self.state, (0,) + keep)
        return self.system_entropy() + h_f - h_sf

    def state_vector(self) -> StateVector:
        return self.state


class BranchingSource:
    """Branching states on the Gram-kernel fast path."""

    symmetric = False
    pure_global = True
    pure_decoherence = True

    def __init__(self, b: BranchingState, tag: str = "branching"):
        self.b = b
        self.tag = tag

    @property
    def n_env(self) -> int:
        return self.b.n_env

    def system_entropy(self) -> float:
        return system_entropy(self.b)

    def fragment_mutual_info(self, sites) -> float:
        return mutual_info_branching(self.b, FragmentSpec.of(*sites))

    def decohered_system_entropy(self, sites) -> float:
        return decohered_system_entropy(self.b, FragmentSpec.of(*sites))

    def decompose(self, sites) -> tuple[float, float]:
        return classical_quantum_decomposition(self.b, FragmentSpec.of(*sites))

    def state_vector(self) -> StateVector:
        return to_state_vector(self.b)


class GaussianSource:
    """Gaussian system/bath state; environment units are bath bands."""

    symmetric = False
    pure_decoherence = False

    def __init__(self, state: GaussianState, tag: str = "qbm"):
        if state.n_modes < 2:
            raise ValueError("need the system mode plus at least one band")
        self.state = state
        self.tag = tag
        # mirror reuse is sound only for a globally pure state
        nus = state.symplectic_eigenvalues()
        tol = POLICY.symplectic_atol * max(1.0, float(np.max(np.abs(state.cov))))
        self.pure_global = bool(np.max(nus) <= 0.5 + tol)

    @property
    def n_env(self) -> int:
        return self.state.n_modes - 1

    def system_entropy(self) -> float:
        return self.state.marginal([0]).entropy()

    def fragment_mutual_info(self, sites) -> float:
        return qbm_mutual_info(self.state, tuple(sites))


class PhotonSource:
    """Closed-form scattered-photon plot at fixed total decoherence.

    All photons are interchangeable, so a fragment only counts; n_env
    just sets the resolution of the fraction grid. Isotropic mode keeps
    the decoherence but erases the directional records, which kills the
    classical plateau (and global purity with it).
    """

    symmetric = True
    pure_decoherence = True

    def __init__(self, gamma, n_env: int = 512, isotropic: bool = False,
                 tag: str | None = None):
        g = gamma.gamma if isinstance(gamma, DecoherenceFactor) else float(gamma)
        if not 0.0 <= g <= 1.0:
            raise ValueError("decoherence factor must lie in [0, 1]")
        if n_env < 2:
            raise ValueError("need at least two photons")
        self.gamma = g
        self.n_env = int(n_env)
        self.isotropic = bool(isotropic)
        self.pure_global = not isotropic
        self.tag = tag or ("photon-iso" if isotropic else "photon")

    def system_entropy(self) -> float:
        return two_branch_entropy(self.gamma)

    def fragment_mutual_info(self, sites) -> float:
        f = len(tuple(sites)) / self.n_env
        if self.isotropic:
            return isotropic_mutual_info(self.gamma, f)
        return photon_mutual_info(self.gamma, f)

    def decohered_system_entropy(self, sites) -> float:
        f = len(tuple(sites)) / self.n_env
        return two_branch_entropy(self.gamma ** f)

    def decoherence_fraction(self, delta_d: float) -> float:
        """Smallest f whose records alone reach (1 - delta_d) H_S."""
        if not 0.0 < delta_d < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.gamma == 0.0:
            return 1.0 / self.n_env  # every single photon decoheres fully
        if self.gamma == 1.0:
            raise ValueError("no decoherence at gamma = 1")
        target = (1.0 - delta_d) * self.system_entropy()
        return float(brentq(
            lambda f: two_branch_entropy(self.gamma ** f) - target,
            0.0, 1.0, xtol=1e-14))

    def decompose(self, sites) -> tuple[float, float]:
        f = len(tuple(sites)) / self.n_env
        quantum = (two_branch_entropy(self.gamma)
                   - two_branch_entropy(self.gamma ** (1.0 - f)))
        if self.isotropic:
            return 0.0, quantum
        return two_branch_entropy(self.gamma ** f), quantum


class HazySource:
    """Equal-coupling central spin over a partly mixed bath."""

    symmetric = True
    pure_global = False
    pure_decoherence = True

    def __init__(self, model: HazyCentralSpin, tag: str = "hazy"):
        self.model = model
        self.tag = tag

    @property
    def n_env(self) -> int:
        return self.model.n

    def system_entropy(self) -> float:
        return self.model.system_entropy()

    def fragment_mutual_info(self, sites) -> float:
        return self.model.mutual_info(len(tuple(sites)))

    def decohered_system_entropy(self, sites) -> float:
        m = len(tuple(sites))
        a = self.model.amps
        off = a[0] * np.conj(a[1]) * self.model.g ** m
        return _two_level_entropy(abs(a[0]) ** 2, abs(a[1]) ** 2, off)

    def decompose(self, sites) -> tuple[float, float]:
        # classical/quantum split stays exact for a hazy bath: the joint
        # entropy separates as H_SF = m h + H_(S decohered by E minus F)
        m = len(tuple(sites))
        quantum = (self.system_entropy()
                   - self.decohered_system_entropy(range(self.model.n - m)))
        return self.model.classical_term(m), quantum


class InteractingSource(DenseSource):
    """Interacting-environment model evolved once to a dense state.

    Pair couplings inside the bath scramble records away from single
    sites; with all of them zero the model is pure decoherence and the
    fragment-only counterfactuals are well defined (re-evolve with the
    couplings outside the fragment cut).
    """

    def __init__(self, params: InteractingEnvParams,
                 system_init: tuple[complex, complex] = (HALF, HALF),
                 env_init: np.ndarray | None = None, tag: str = "interacting"):
        self.params = params
        self.system_init = (complex(system_init[0]), complex(system_init[1]))
        self.env_init = env_init
        super().__init__(interacting_evolve(params, self.system_init, env_init), tag=tag)

    @property
    def pure_decoherence(self) -> bool:
        return not np.any(self.params.pair_couplings)

    def _masked_system_entropy(self, sites) -> float:
        keep = {int(s) for s in sites}
        d = np.where(np.isin(np.arange(self.params.n_env), list(keep)),
                     self.params.couplings, 0.0)
        cut = replace(self.params, couplings=d)
        return subsystem_entropy(interacting_evolve(cut, self.system_init, self.env_init), (0,))

    def decohered_system_entropy(self, sites) -> float:
        if not self.pure_decoherence:
            raise ValueError("intra-bath couplings leave no clean fragment-only counterfactual")
        return self._masked_system_entropy(sites)

    def decompose(self, sites) -> tuple[float, float]:
        sites = tuple(sorted(int(s) for s in sites))
        keep = tuple(s + 1 for s in sites)
        h_f = subsystem_entropy(self.state, keep) if keep else 0.0
        comp = tuple(i for i in range(self.n_env) if i not in set(sites))
        quantum = self.system_entropy() - self.decohered_system_entropy(comp)
        return h_f, quantum


def haar_random_source(n_env: int, seed: int, tag: str | None = None) -> DenseSource:
    """Haar-random pure state of one system qubit over n_env bath qubits."""
    if n_env < 1:
        raise ValueError("need at least one environment qubit")
    shape = qubits(n_env + 1)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x9A)))
    amps = rng.standard_normal(shape.total_dim) + 1j * rng.standard_normal(shape.total_dim)
    amps /= np.linalg.norm(amps)
    return DenseSource(StateVector(shape, amps), tag=tag or f"haar-{seed}")


# ---------------------------------------------------------------------------
# partial-information plots

@dataclass(frozen=True)
class PIPPoint:
    f: float
    sharp_f: int
    mean_i: float
    stddev: float
    samples: int


@dataclass(frozen=True)
class PartialInfoPlot:
    """Averaged I(S : fragment) against the fragment fraction f."""

    points: tuple
    source_tag: str
    h_system: float
    n_env: int

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        fs = [p.f for p in self.points]
        if any(b <= a for a, b in zip(fs, fs[1:])):
            raise ValueError("fragment fractions must increase strictly")
        slack = 1e-8 * max(1.0, self.h_system)
        for p in self.points:
            if not -slack <= p.mean_i <= 2.0 * self.h_system + slack:
                raise ValueError(f"mean information {p.mean_i} outside [0, 2 H_S] at f = {p.f}")

    @property
    def fractions(self) -> np.ndarray:
        return np.array([p.f for p in self.points])

    @property
    def means(self) -> np.ndarray:
        return np.array([p.mean_i for p in self.points])

    def point_at(self, sharp_f: int) -> PIPPoint:
        for p in self.points:
            if p.sharp_f == sharp_f:
                return p
        raise KeyError(sharp_f)


def default_cardinalities(n: int) -> tuple[int, ...]:
    """Every size up to min(n, 64), then a sparse geometric tail to n."""
    if n < 1:
        raise ValueError("need at least one environment part")
    cards = list(range(min(n, 64) + 1))
    m = 64
    while m < n:
        m = max(m + 1, int(round(m * 1.25)))
        cards.append(min(m, n))
    return tuple(dict.fromkeys(cards))


def _distinct_subsets(n: int, m: int, count: int, rng) -> list:
    """Up to count distinct sorted m-subsets of range(n), uniform without
    replacement; exhaustive when fewer exist."""
    if math.comb(n, m) <= count:
        return [tuple(c) for c in itertools.combinations(range(n), m)]
    seen, out = set(), []
    while len(out) < count:
        pick = tuple(sorted(rng.choice(n, size=m, replace=False).tolist()))
        if pick not in seen:
            seen.add(pick)
            out.append(pick)
    return out


def _paired_half_subsets(n: int, m: int, count: int, rng) -> list:
    """Half-size draws joined with their complements; for a pure source the
    pair mean is pinned to H_S, which keeps the midpoint noise-free."""
    if math.comb(n, m) <= count:
        return [tuple(c) for c in itertools.combinations(range(n), m)]
    full = frozenset(range(n))
    out, seen = [], set()
    for s in _distinct_subsets(n, m, (count + 1) // 2, rng):
        c = tuple(sorted(full - set(s)))
        if s in seen or c in seen:
            continue
        out.extend([s, c])
        seen.update([s, c])
    return out


def _worker_count() -> int:
    raw = os.environ.get("DARWINLAB_THREADS", "1")
    try:
        k = int(raw)
    except ValueError as exc:
        raise ValueError(f"DARWINLAB_THREADS must be an integer, got {raw!r}") from exc
    return max(1, k)


def _sample_size(source, m: int, count: int, seed: int) -> tuple[float, float, int]:
    n = source.n_env
    if m == 0:
        subsets = [()]
    elif m == n:
        subsets = [tuple(range(n))]
    elif getattr(source, "symmetric", False):
        subsets = [tuple(range(m))]
    else:
        rng = np.random.default_rng(np.random.SeedSequence((seed, m)))
        if 2 * m == n:
            subsets = _paired_half_subsets(n, m, count, rng)
        else:
            subsets = _distinct_subsets(n, m, count, rng)
    vals = np.array([source.fragment_mutual_info(s) for s in subsets])
    sd = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
    return float(vals.mean()), sd, len(vals)


def build_pip(source, fractions=None, samples_per_fraction: int = 24,
              seed: int = 0) -> PartialInfoPlot:
    """Sample the partial-information plot of a source.

    Fragment sizes come from `fractions` (rounded to site counts, the
    f = 0 and f = 1 endpoints always added) or from the default
    integer-then-geometric grid. Draws are uniform without replacement
    within each size and deterministic in `seed`; each size gets its own
    counter-keyed stream, so the thread count never changes the numbers.
    """
    if samples_per_fraction < 1:
        raise ValueError("need at least one sample per fraction")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    n = source.n_env
    if fractions is None:
        cards = default_cardinalities(n)
    else:
        ms = set()
        for f in fractions:
            if not 0.0 <= f <= 1.0:
                raise ValueError(f"fraction {f} outside [0, 1]")
            ms.add(int(round(float(f) * n)))
        cards = tuple(sorted(ms | {0, n}))
    h_s = source.system_entropy()
    pure = bool(getattr(source, "pure_global", False))
    keys = sorted({min(m, n - m) if pure else m for m in cards})
    workers = _worker_count()
    if workers > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda m: _sample_size(source, m, samples_per_fraction, seed), keys))
        stats = dict(zip(keys, results))
    else:
        stats = {m: _sample_size(source, m, samples_per_fraction, seed) for m in keys}
    points = []
    for m in cards:
        key = min(m, n - m) if pure else m
        mean, sd, k = stats[key]
        if key != m:
            mean = 2.0 * h_s - mean
        points.append(PIPPoint(m / n, m, mean, sd, k))
    return PartialInfoPlot(tuple(points), source.tag, h_s, n)


# ---------------------------------------------------------------------------
# redundancy

@dataclass(frozen=True)
class RedundancyReport:
    """Redundancy of a plot at information deficit delta.

    r_delta_d carries the decoherence-deficit companion when the caller
    computed one. No ordering against r_delta is enforced here: the two
    agree exactly for pure environments, and sampling noise around that
    equality would trip a hard inequality for no reason.
    """

    delta: float
    f_delta: float | None
    r_delta: float
    plateau_reached: bool
    interpolated: bool
    r_delta_d: float | None = None

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.r_delta < 0.0:
            raise ValueError("negative redundancy")


def redundancy(pip: PartialInfoPlot, delta: float = 0.1,
               r_delta_d: float | None = None) -> RedundancyReport:
    """How many disjoint fragments each miss at most delta of H_S.

    The crossing of (1 - delta) H_S is searched on fragments of at most
    half the environment and R = n / sharpF there, with the crossing
    size linearly interpolated between the bracketing samples. A size-1
    crossing means every unit is a full record and R = n exactly.

    plateau_reached reports whether any strictly-sub-half fragment
    crossed. A globally pure source always crosses by f = 1/2 (purity
    pins I there at H_S), so R bottoms out near 2 with the flag False:
    redundancy without records, the random-state baseline. If not even
    the half point crosses, r_delta is the achieved fraction of the
    threshold, below one.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if pip.h_system <= 0.0:
        raise ValueError("system entropy is zero; redundancy undefined")
    n = pip.n_env
    threshold = (1.0 - delta) * pip.h_system
    cand = [p for p in pip.points if 1 <= p.sharp_f and 2 * p.sharp_f <= n]
    if not cand:
        raise ValueError("plot has no fragments of half size or below")
    plateau = any(p.mean_i >= threshold for p in cand if 2 * p.sharp_f < n)
    hit = next((i for i, p in enumerate(cand) if p.mean_i >= threshold), None)
    if hit is None:
        best = max(p.mean_i for p in cand)
        return RedundancyReport(delta, None, best / threshold, False, False, r_delta_d)
    p = cand[hit]
    if p.sharp_f == 1:
        return RedundancyReport(delta, 1.0 / n, float(n), plateau, False, r_delta_d)
    if hit == 0:
        return RedundancyReport(delta, p.sharp_f / n, n / p.sharp_f, plateau, False, r_delta_d)
    prev = cand[hit - 1]
    frac = (threshold - prev.mean_i) / (p.mean_i - prev.mean_i)
    sharp = prev.sharp_f + frac * (p.sharp_f - prev.sharp_f)
    return RedundancyReport(delta, sharp / n, n / sharp, plateau, True, r_delta_d)


def _mean_decohered(source, m: int, count: int, seed: int) -> float:
    n = source.n_env
    if m == n:
        subsets = [tuple(range(n))]
    elif getattr(source, "symmetric", False):
        subsets = [tuple(range(m))]
    else:
        # keyed off the PIP streams so the two analyses never share draws
        rng = np.random.default_rng(np.random.SeedSequence((seed, 0x5D, m)))
        subsets = _distinct_subsets(n, m, count, rng)
    return float(np.mean([source.decohered_system_entropy(s) for s in subsets]))


def redundancy_of_decoherence(source, delta_d: float = 0.1,
                              samples_per_fraction: int = 12, seed: int = 0) -> float:
    """Redundancy measured on decoherence instead of information.

    Finds the mean fragment size whose records alone push the system
    entropy to (1 - delta_d) H_S and returns n over that size. Unlike
    the information crossing this one has no purity shortcut, so sizes
    run all the way to n; if even the full environment falls short the
    achieved fraction of the threshold (< 1) comes back instead.
    """
    if not 0.0 < delta_d < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    h_s = source.system_entropy()
    if h_s <= 0.0:
        raise ValueError("system entropy is zero; redundancy undefined")
    fraction = getattr(source, "decoherence_fraction", None)
    if fraction is not None:
        f = fraction(delta_d)
        return 1.0 / f if f > 0.0 else float(source.n_env)
    if not hasattr(source, "decohered_system_entropy"):
        raise ValueError("source offers no fragment-only decoherence counterfactual")
    n = source.n_env
    threshold = (1.0 - delta_d) * h_s
    prev_m, prev_h = 0, 0.0
    for m in (c for c in default_cardinalities(n) if c >= 1):
        cur = _mean_decohered(source, m, samples_per_fraction, seed)
        if cur >= threshold:
            if m == 1:
                return float(n)
            if prev_m == 0:
                return n / m
            frac = (threshold - prev_h) / (cur - prev_h)
            return n / (prev_m + frac * (m - prev_m))
        prev_m, prev_h = m, cur
    return prev_h / threshold


def decompose_mutual_info(source, sites) -> tuple[float, float]:
    """Split I(S:F) into locally accessible and quantum parts.

    classical = H_F(t) - H_F(0), quantum = H_S - H of the system
    decohered by everything outside F. Only factorizing pure-decoherence
    sources support the split; the parts are checked against the
    directly computed mutual information before being returned.
    """
    if not getattr(source, "pure_decoherence", False) or not hasattr(source, "decompose"):
        raise ValueError("decomposition needs a factorizing pure-decoherence source")
    sites = tuple(sorted(int(s) for s in sites))
    c, q = source.decompose(sites)
    i = source.fragment_mutual_info(sites)
    if abs(c + q - i) > 1e-9 * max(1.0, abs(i)):
        raise ArithmeticError(f"decomposition defect {c + q - i:.3e} at sites {sites}")
    return float(c), float(q)


# ---------------------------------------------------------------------------
# observable sweep

@dataclass(frozen=True)
class SweepPoint:
    mu: float
    holevo_info: float
    h_observable: float
    h_conditional: float
    fragments_passing: int
    redundant: bool


def _fragment_holevo(rho_sf: DensityMatrix, kets) -> float:
    dims = rho_sf.shape.dims
    df = int(np.prod(dims[1:]))
    rho4 = rho_sf.mat.reshape(2, df, 2, df)
    shape_f = HilbertShape(dims[1:])
    weights, members = [], []
    for k in kets:
        cond = np.einsum("a,aibj,b->ij", k.conj(), rho4, k)
        p = float(np.real(np.trace(cond)))
        if p <= POLICY.eig_floor:
            continue
        weights.append(p)
        members.append(DensityMatrix(shape_f, cond / p))
    w = np.array(weights)
    return holevo(Ensemble(ProbVector(w / w.sum()), tuple(members)))


def observable_sweep(source, mu_grid, fragment_size: int, delta: float = 0.1) -> tuple:
    """Holevo information held by disjoint fragments about sigma(mu).

    sigma(mu) = cos(mu) sigma_z + sin(mu) sigma_x on a qubit system.
    fragments_passing counts the disjoint size-`fragment_size` blocks
    whose Holevo bound reaches (1 - delta) H(sigma). The redundant flag
    is the consistency condition on the system alone: measuring the
    pointer first leaves at most delta of H(sigma) unresolved. Only
    observables close to the pointer can satisfy it, whatever the
    fragments say.
    """
    if fragment_size < 1:
        raise ValueError("fragment size must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    state = source.state_vector()
    if state.shape.dims[0] != 2:
        raise ValueError("observable sweep needs a qubit system")
    n = source.n_env
    if fragment_size > n:
        raise ValueError("fragment exceeds the environment")
    rho_s = reduced_density(state, (0,)).mat
    blocks = [reduced_density(state, (0,) + tuple(range(s + 1, s + 1 + fragment_size)))
              for s in range(0, n - fragment_size + 1, fragment_size)]
    out = []
    for mu in np.asarray(mu_grid, dtype=float):
        c, s = math.cos(mu / 2.0), math.sin(mu / 2.0)
        kets = (np.array([c, s], dtype=complex), np.array([-s, c], dtype=complex))
        p_sig = np.clip([float(np.real(k.conj() @ rho_s @ k)) for k in kets], 0.0, 1.0)
        h_sig = shannon_entropy(p_sig)
        p_z = np.clip(np.real(np.diag(rho_s)), 0.0, 1.0)
        h_cond = sum(p_z[j] * shannon_entropy([abs(k[j]) ** 2 for k in kets])
                     for j in range(2))
        chis = [_fragment_holevo(b, kets) for b in blocks]
        passing = int(sum(x >= (1.0 - delta) * h_sig for x in chis))
        redundant = bool(h_cond <= delta * h_sig + POLICY.spectrum_atol)
        out.append(SweepPoint(float(mu), float(np.mean(chis)), float(h_sig),
                              float(h_cond), passing, redundant))
    return tuple(out)


# ---------------------------------------------------------------------------
# export

CSV_HEADER = "f,sharpF,meanI_nats,stddev,samples"


def pip_to_csv(pip: PartialInfoPlot) -> str:
    """One row per fragment size; floats carry full round-trip precision."""
    rows = [CSV_HEADER]
    for p in pip.points:
        rows.append(f"{p.f!r},{p.sharp_f},{p.mean_i!r},{p.stddev!r},{p.samples}")
    return "\n".join(rows) + "\n"


def git_blob_sha(data: bytes) -> str:
    """Content hash in git's blob convention (matches `git hash-object`)."""
    h = hashlib.sha1(b"blob %d\x00" % len(data))
    h.update(data)
    return h.hexdigest()


def pip_manifest(pip: PartialInfoPlot, parameters: dict) -> dict:
    """Reproducibility sidecar for a CSV export."""
    return {
        "format": "darwinlab.pip.v1",
        "source": pip.source_tag,
        "n_env": pip.n_env,
        "h_system_nats": pip.h_system,
        "points": len(pip.points),
        "csv_sha": git_blob_sha(pip_to_csv(pip).encode("utf-8")),
        "parameters": dict(parameters),
    }
