"""Acceptance gate: one numbered end-to-end check per shipped claim.

Each test pins its own seeds and model parameters so the numbers are
reproducible bit-for-bit; tolerances are part of the claim, not of the
implementation. Runtime bounds are generous enough for CI noise but
tight enough to catch an accidental fall off a fast path.
"""
import math
import time
from dataclasses import replace
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from scipy.special import zeta

from darwinlab.branching import fragment_entropy, to_state_vector
from darwinlab.darwin import (BranchingSource, DenseSource, GaussianSource,
                              InteractingSource, PhotonSource, build_pip,
                              haar_random_source, observable_sweep, redundancy)
from darwinlab.envariance import (FineGrainSpec, SchmidtPair,
                                  branch_frequencies, fine_grain_born,
                                  reversal_demo, swap_and_counterswap)
from darwinlab.photon import (RATE_PREFACTOR_DIPOLE, dust_grain_redundancy,
                              measured_photon_redundancy, photon_redundancy)
from darwinlab.qbm import OhmicBathParams, qbm_evolve, qbm_redundancy
from darwinlab.qstate import FragmentSpec, subsystem_entropy
from darwinlab.spinmodels import (LN2, CentralSpinParams, HazyCentralSpin,
                                  HazyParams, central_spin_branching,
                                  cnot_model, hazy_redundancy,
                                  random_interacting_params,
                                  uniform_couplings)

from helpers import random_branching_state, random_unitary

RT2 = 1.0 / math.sqrt(2.0)


def test_01_perfect_record_plateau():
    started = time.monotonic()
    src = BranchingSource(cnot_model(RT2, RT2, 50), tag="cnot")
    for k in range(50):
        assert abs(src.fragment_mutual_info((k,)) - LN2) <= 1e-12
    pip = build_pip(src, samples_per_fraction=8, seed=0)
    assert pip.points[0].f == 0.0 and abs(pip.points[0].mean_i) <= 1e-12
    assert abs(pip.points[-1].mean_i - 2.0 * LN2) <= 1e-12
    for p in pip.points[1:-1]:
        assert abs(p.mean_i - LN2) <= 1e-12
    assert abs(redundancy(pip, 0.1).r_delta - 50.0) <= 1e-12
    assert time.monotonic() - started < 1.0


def test_02_kernel_path_matches_dense_path():
    started = time.monotonic()
    rng = np.random.default_rng(np.random.SeedSequence((2, 0xACC)))
    checked = 0
    while checked < 100:
        n = int(rng.integers(4, 13))
        k = int(rng.integers(2, 5))
        b = random_branching_state(rng, n, k)
        fast = BranchingSource(b)
        dense = DenseSource(to_state_vector(b))
        sv = dense.state
        for _ in range(3):
            m = int(rng.integers(1, n + 1))
            frag = tuple(sorted(rng.choice(n, size=m, replace=False).tolist()))
            h_fast = fragment_entropy(b, FragmentSpec.of(*frag))
            h_dense = subsystem_entropy(sv, tuple(s + 1 for s in frag))
            assert abs(h_fast - h_dense) <= 1e-9
            assert abs(fast.fragment_mutual_info(frag)
                       - dense.fragment_mutual_info(frag)) <= 1e-9
        checked += 1
    assert time.monotonic() - started < 30.0


def _complement_defect(source, rng, trials=30):
    n = source.n_env
    h2 = 2.0 * source.system_entropy()
    worst = 0.0
    for _ in range(trials):
        m = int(rng.integers(1, n))
        frag = tuple(sorted(rng.choice(n, size=m, replace=False).tolist()))
        comp = tuple(s for s in range(n) if s not in frag)
        got = source.fragment_mutual_info(frag) + source.fragment_mutual_info(comp)
        worst = max(worst, abs(got - h2))
    return worst


def test_03_partial_info_antisymmetry():
    rng = np.random.default_rng(np.random.SeedSequence((3, 0xACC)))
    exact = [
        BranchingSource(cnot_model(RT2, RT2, 10), tag="cnot"),
        BranchingSource(central_spin_branching(
            CentralSpinParams(couplings=uniform_couplings(rng, 10), t=4.0))),
        haar_random_source(10, seed=33),
        InteractingSource(random_interacting_params(rng, 10, 10.0, 0.1, 0.001)),
        PhotonSource(math.exp(-4.0), n_env=64),
    ]
    for src in exact:
        assert _complement_defect(src, rng) <= 1e-9, src.tag
    # symplectic entropies at squeezing 1e3 condition like s^2, so eight
    # digits is the honest floor for the oscillator source
    qbm_src = GaussianSource(qbm_evolve(OhmicBathParams(damping=0.05, bands=32),
                                        1e3, "x", 3.0))
    assert _complement_defect(qbm_src, rng) <= 1e-6


def test_04_central_spin_scaling():
    started = time.monotonic()
    for n in (25, 50, 100):
        rng = np.random.default_rng(np.random.SeedSequence((7, n)))
        couplings = 0.9 + 0.2 * rng.random(n)
        src = BranchingSource(
            central_spin_branching(CentralSpinParams(couplings=couplings,
                                                     t=math.pi / 4.0)),
            tag="central-spin")
        pip = build_pip(src, samples_per_fraction=24, seed=7)
        assert abs(redundancy(pip, 0.1).r_delta - n) <= 1.0
        for p in pip.points:
            if 0.25 <= p.f <= 0.75:
                assert abs(p.mean_i - LN2) <= 1e-6
    assert time.monotonic() - started < 60.0


def test_05_pointer_observable_selectivity():
    rng = np.random.default_rng(np.random.SeedSequence((3, 9)))
    params = CentralSpinParams(couplings=uniform_couplings(rng, 9), t=4.0)
    src = BranchingSource(central_spin_branching(params))
    mus = [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2]
    rows = observable_sweep(src, mus, fragment_size=3, delta=0.1)
    pointer, rotated = rows[0], rows[-1]
    assert pointer.holevo_info >= 0.9 * LN2
    assert pointer.fragments_passing == 3
    assert rotated.holevo_info <= 0.01
    assert pointer.redundant and not rotated.redundant
    for row in rows:
        within = row.h_conditional <= 0.1 * row.h_observable + 1e-9
        assert row.redundant == within


@pytest.mark.xfail(
    reason="best measured peak/floor ratio is ~4, not 5: random-state floors "
           "sit near R=2 under the across-half crossing convention, and no "
           "coupling draw pushes the t=10 peak past 5x that "
           "(see notes/decisions.md, item 29)",
    strict=True)
def test_06_redundancy_rise_and_fall():
    started = time.monotonic()
    rng = np.random.default_rng(np.random.SeedSequence((28, 16)))
    base = random_interacting_params(rng, 16, 10.0, sigma_d=0.1, sigma_m=0.001)
    r = {}
    for t in (0.5, 10.0, 500.0):
        src = InteractingSource(replace(base, t=t))
        pip = build_pip(src, samples_per_fraction=24, seed=28)
        r[t] = redundancy(pip, 0.1).r_delta
    assert time.monotonic() - started < 300.0
    assert r[10.0] > 5.0 * r[0.5]
    assert r[10.0] > 5.0 * r[500.0]


def test_07_oscillator_universal_plot():
    state = qbm_evolve(OhmicBathParams(damping=0.05), squeezing=1e3,
                       direction="x", t=3.0)
    pip = build_pip(GaussianSource(state), samples_per_fraction=96, seed=0)
    h_s = pip.h_system
    assert abs(h_s - math.log(1e3)) <= 0.1 * math.log(1e3)
    for p in pip.points:
        if 0.1 <= p.f <= 0.9:
            expected = h_s + 0.5 * math.log(p.f / (1.0 - p.f))
            assert abs(p.mean_i - expected) <= 0.1
    for delta in (0.1, 0.25):
        ratio = redundancy(pip, delta).r_delta / qbm_redundancy(1e3, delta)
        assert 0.5 <= ratio <= 2.0


def test_08_photon_halo():
    reference = 161280.0 * float(zeta(9)) / math.pi ** 3
    assert abs(RATE_PREFACTOR_DIPOLE / reference - 1.0) <= 5e-5

    src = PhotonSource(math.exp(-10.0), n_env=128)
    pip = build_pip(src, samples_per_fraction=8, seed=0)
    assert abs(pip.points[0].mean_i) <= 1e-10
    assert abs(pip.points[-1].mean_i - 2.0 * pip.h_system) <= 1e-10

    for t_over_tau in (5.0, 10.0, 20.0, 35.0, 50.0):
        closed = photon_redundancy(t_over_tau, 0.1)
        inverted = measured_photon_redundancy(t_over_tau, 0.1)
        assert abs(closed / inverted - 1.0) <= 0.15

    r_dust = dust_grain_redundancy(0.1, t=1e-6)
    assert 10.0 ** 7.5 <= r_dust <= 10.0 ** 8.5


def test_09_envariant_swaps_and_even_counting():
    rng = np.random.default_rng(np.random.SeedSequence((9, 0xACC)))
    for _ in range(10):
        k = int(rng.integers(2, 7))
        d = k + int(rng.integers(0, 3))
        coeffs = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=k)) / math.sqrt(k)
        pair = SchmidtPair(coeffs, random_unitary(rng, d)[:k],
                           random_unitary(rng, d)[:k])
        i, j = rng.choice(k, size=2, replace=False)
        res = swap_and_counterswap(pair, int(i), int(j))
        assert res.envariant
        assert res.fidelity >= 1.0 - 1e-12

    for m_total in range(2, 65):
        nums = rng.multinomial(m_total, (0.5, 0.3, 0.2))
        got = fine_grain_born(FineGrainSpec(tuple(int(v) for v in nums)))
        assert got.fractions == tuple(Fraction(int(v), m_total) for v in nums)

    two_one = fine_grain_born(FineGrainSpec((2, 1)))
    assert two_one.fractions == (Fraction(2, 3), Fraction(1, 3))


def test_10_branch_counting_statistics():
    m_total = 1000
    counts = np.arange(m_total + 1)
    for w1 in (0.5, 2.0 / 3.0, 0.7):
        p = branch_frequencies(m_total, (1.0 - w1, w1))
        assert abs(float(counts @ p) - w1 * m_total) <= 1e-9
        mu, var = w1 * m_total, w1 * (1.0 - w1) * m_total
        gauss = np.exp(-((counts - mu) ** 2) / (2.0 * var))
        gauss /= gauss.sum()
        assert 0.5 * float(np.abs(p - gauss).sum()) <= 0.01


def test_11_records_block_reversal():
    rng = np.random.default_rng(np.random.SeedSequence((11, 0xACC)))
    cases = [np.array([0.8, 0.6], dtype=complex),
             rng.normal(size=4) + 1j * rng.normal(size=4)]
    for amps in cases:
        res = reversal_demo(amps)
        assert abs(res.without_copy_fidelity - 1.0) <= 1e-12
        weights = np.abs(amps) ** 2 / float(np.sum(np.abs(amps) ** 2))
        assert np.allclose(res.with_copy_state, np.diag(weights), atol=1e-12)


def test_12_haar_baseline_redundancy():
    rs = []
    for i in range(20):
        src = haar_random_source(12, seed=1000 + i)
        pip = build_pip(src, samples_per_fraction=12, seed=1000 + i)
        rs.append(redundancy(pip, 0.1).r_delta)
    assert 1.5 <= float(np.mean(rs)) <= 3.0


def test_13_hazy_records():
    t = math.acos(0.85) / 2.0
    base = CentralSpinParams(couplings=np.ones(256), t=t)
    r_pure = hazy_redundancy(base, HazyParams(0.0), delta=0.1)
    for x in (0.5, 0.75, 0.9):
        r_hazy = hazy_redundancy(base, HazyParams(x * LN2), delta=0.1)
        assert abs(r_hazy / r_pure - (1.0 - x)) <= 0.25

    saturated = HazyCentralSpin(16, 1.0, t, HazyParams(LN2))
    for m in (1, 4, 16):
        assert abs(saturated.classical_term(m)) <= 1e-6
