import numpy as np
import pytest
from hypothesis import given, strategies as st

from darwinlab.info import (
    LN2,
    Ensemble,
    MeasurementBasis,
    ProbVector,
    asymmetric_mutual_info,
    average_conditional_entropy,
    bloch_basis,
    conditional_state,
    discord,
    holevo,
    min_discord,
    mutual_information,
    shannon_entropy,
    shannon_mutual_observables,
    to_bits,
    von_neumann_entropy,
)
from darwinlab.qstate import (
    DensityMatrix,
    FragmentSpec,
    HilbertShape,
    ket,
    pure_density,
    qubits,
    tensor,
)
from helpers import random_state_vector

Z_BASIS = MeasurementBasis.from_states([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
X_BASIS = MeasurementBasis.from_states(
    [np.array([1.0, 1.0]) / np.sqrt(2), np.array([1.0, -1.0]) / np.sqrt(2)]
)


def bell_density():
    return pure_density(ket([1, 0, 0, 1], dims=(2, 2)))


def classically_correlated():
    m = np.zeros((4, 4))
    m[0, 0] = m[3, 3] = 0.5
    return DensityMatrix(qubits(2), m)


def test_von_neumann_entropy_examples():
    assert von_neumann_entropy(pure_density(ket([1, 1j]))) == pytest.approx(0.0, abs=1e-12)
    mixed = DensityMatrix(qubits(1), np.eye(2) / 2)
    assert von_neumann_entropy(mixed) == pytest.approx(LN2, abs=1e-12)
    rho = DensityMatrix(qubits(1), np.diag([0.25, 0.75]))
    expect = -0.25 * np.log(0.25) - 0.75 * np.log(0.75)
    assert von_neumann_entropy(rho) == pytest.approx(expect, abs=1e-12)


def test_shannon_entropy_examples():
    assert shannon_entropy(ProbVector(np.array([1.0, 0.0]))) == 0.0
    assert shannon_entropy(np.array([0.5, 0.5])) == pytest.approx(LN2, abs=1e-12)
    expect = np.log(3) - (2 / 3) * np.log(2)
    assert shannon_entropy(np.array([1 / 3, 2 / 3])) == pytest.approx(expect, abs=1e-12)


def test_to_bits():
    assert to_bits(LN2) == pytest.approx(1.0, abs=1e-15)


def test_prob_vector_validation():
    with pytest.raises(ValueError):
        ProbVector(np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        ProbVector(np.array([-0.1, 1.1]))


def test_mutual_information_product_state():
    rng = np.random.default_rng(0)
    s = tensor(random_state_vector(rng, (2,)), random_state_vector(rng, (2,)))
    assert mutual_information(pure_density(s), FragmentSpec.of(0)) == pytest.approx(0.0, abs=1e-10)


def test_mutual_information_bell_and_classical():
    assert mutual_information(bell_density(), FragmentSpec.of(0)) == pytest.approx(2 * LN2, abs=1e-10)
    assert mutual_information(classically_correlated(), FragmentSpec.of(0)) == pytest.approx(LN2, abs=1e-10)


@given(st.integers(0, 10 ** 6))
def test_mutual_information_bounds(seed):
    rng = np.random.default_rng(seed)
    rho = pure_density(random_state_vector(rng, (2, 2, 2)))
    part = FragmentSpec.of(rng.integers(3))
    i = mutual_information(rho, part)
    assert i >= -1e-9


@given(st.integers(0, 10 ** 6))
def test_subadditivity(seed):
    rng = np.random.default_rng(seed)
    rho = pure_density(random_state_vector(rng, (2, 2, 3)))
    a, b = FragmentSpec.of(0), FragmentSpec.of(1, 2)
    ha = von_neumann_entropy(
        DensityMatrix(HilbertShape((2,)), rho.mat.reshape(2, 6, 2, 6).trace(axis1=1, axis2=3))
    )
    from darwinlab.qstate import partial_trace

    hb = von_neumann_entropy(partial_trace(rho, b))
    assert von_neumann_entropy(rho) <= ha + hb + 1e-9


def test_conditional_state_bell():
    proj0 = np.outer([1, 0], [1, 0])
    cond, p = conditional_state(bell_density(), proj0, FragmentSpec.of(0))
    assert p == pytest.approx(0.5, abs=1e-12)
    from darwinlab.qstate import partial_trace

    rho_b = partial_trace(cond, FragmentSpec.of(1))
    assert np.allclose(rho_b.mat, np.outer([1, 0], [1, 0]), atol=1e-12)


def test_conditional_state_zero_probability_flagged():
    rho = pure_density(ket([1, 0], dims=(2,)))
    big = pure_density(tensor(ket([1, 0]), ket([0, 1])))
    proj1 = np.outer([0, 1], [0, 1])
    cond, p = conditional_state(big, proj1, FragmentSpec.of(0))
    assert cond is None and p == 0.0


def test_conditional_probabilities_complete():
    rng = np.random.default_rng(4)
    rho = pure_density(random_state_vector(rng, (2, 2)))
    total = 0.0
    for proj in Z_BASIS.projectors:
        _, p = conditional_state(rho, proj, FragmentSpec.of(0))
        total += p
    assert total == pytest.approx(1.0, abs=1e-10)


def test_average_conditional_entropy_classical_record():
    # measuring the record side in z leaves no remaining uncertainty
    assert average_conditional_entropy(
        classically_correlated(), Z_BASIS, FragmentSpec.of(0)
    ) == pytest.approx(0.0, abs=1e-10)


def test_average_conditional_entropy_bell_any_basis():
    for basis in (Z_BASIS, X_BASIS, bloch_basis(0.77, 1.3)):
        assert average_conditional_entropy(
            bell_density(), basis, FragmentSpec.of(0)
        ) == pytest.approx(0.0, abs=1e-10)


def one_sided_mixture():
    # (|0><0| x |0><0| + |1><1| x |+><+|) / 2: records on side B are imperfect
    zero = np.outer([1, 0], [1, 0])
    one = np.outer([0, 1], [0, 1])
    plus = np.full((2, 2), 0.5)
    m = 0.5 * (np.kron(zero, zero) + np.kron(one, plus))
    return DensityMatrix(qubits(2), m)


def test_one_sided_accessibility():
    rho = one_sided_mixture()
    on_a = average_conditional_entropy(rho, Z_BASIS, FragmentSpec.of(0))
    on_b = average_conditional_entropy(rho, Z_BASIS, FragmentSpec.of(1))
    assert on_a == pytest.approx(0.0, abs=1e-10)
    assert on_b > 0.1


def test_asymmetric_mutual_info_examples():
    assert asymmetric_mutual_info(bell_density(), Z_BASIS, FragmentSpec.of(0)) == pytest.approx(
        LN2, abs=1e-10
    )
    rho = classically_correlated()
    j = asymmetric_mutual_info(rho, Z_BASIS, FragmentSpec.of(0))
    assert j == pytest.approx(mutual_information(rho, FragmentSpec.of(0)), abs=1e-10)


@given(st.integers(0, 10 ** 6))
def test_j_below_i_and_conservation(seed):
    rng = np.random.default_rng(seed)
    rho = pure_density(random_state_vector(rng, (2, 2)))
    basis = bloch_basis(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
    on = FragmentSpec.of(1)
    i = mutual_information(rho, on)
    j = asymmetric_mutual_info(rho, basis, on)
    d = discord(rho, basis, on)
    assert j <= i + 1e-9
    assert d >= -1e-9
    assert i == pytest.approx(j + d, abs=1e-9)


def test_discord_classical_pointer_basis_zero():
    assert discord(classically_correlated(), Z_BASIS, FragmentSpec.of(0)) == pytest.approx(
        0.0, abs=1e-10
    )


def test_discord_bell_any_basis():
    for basis in (Z_BASIS, X_BASIS):
        assert discord(bell_density(), basis, FragmentSpec.of(0)) == pytest.approx(LN2, abs=1e-10)


def up_upright_mixture():
    # mixture of nonorthogonal system states, each perfectly recorded on A
    up = np.array([1.0, 0.0])
    upright = np.array([np.cos(np.pi / 8), np.sin(np.pi / 8)])
    a0 = np.array([1.0, 0.0])
    a1 = np.array([0.0, 1.0])
    m = 0.5 * (
        np.kron(np.outer(up, up), np.outer(a0, a0))
        + np.kron(np.outer(upright, upright), np.outer(a1, a1))
    )
    return DensityMatrix(qubits(2), m)


def test_min_discord_asymmetry_of_access():
    rho = up_upright_mixture()
    grid = (24, 12)  # coarse grid keeps this test quick
    d_measuring_record = min_discord(rho, FragmentSpec.of(1), grid=grid)
    d_measuring_system = min_discord(rho, FragmentSpec.of(0), grid=grid)
    assert d_measuring_record <= 5e-3
    assert d_measuring_system > 0.01


def test_holevo_examples():
    rho0 = pure_density(ket([1, 0]))
    rho_plus = pure_density(ket([1, 1]))
    w = ProbVector(np.array([0.5, 0.5]))
    assert holevo(Ensemble(w, (rho0, rho0))) == pytest.approx(0.0, abs=1e-12)
    rho1 = pure_density(ket([0, 1]))
    assert holevo(Ensemble(w, (rho0, rho1))) == pytest.approx(LN2, abs=1e-12)
    avg = 0.5 * (rho0.mat + rho_plus.mat)
    expect = -np.sum(
        [lam * np.log(lam) for lam in np.linalg.eigvalsh(avg) if lam > 1e-12]
    )
    assert holevo(Ensemble(w, (rho0, rho_plus))) == pytest.approx(expect, abs=1e-10)


def test_holevo_bounded_by_weight_entropy():
    rng = np.random.default_rng(8)
    states = tuple(pure_density(random_state_vector(rng, (2,))) for _ in range(3))
    w = ProbVector(np.array([0.2, 0.3, 0.5]))
    chi = holevo(Ensemble(w, states))
    assert -1e-9 <= chi <= shannon_entropy(w) + 1e-9


def test_shannon_mutual_observables():
    rho = classically_correlated()
    assert shannon_mutual_observables(
        rho, Z_BASIS, FragmentSpec.of(0), Z_BASIS, FragmentSpec.of(1)
    ) == pytest.approx(LN2, abs=1e-10)
    bell = bell_density()
    m = shannon_mutual_observables(bell, Z_BASIS, FragmentSpec.of(0), Z_BASIS, FragmentSpec.of(1))
    assert m == pytest.approx(LN2, abs=1e-10)
    assert m < mutual_information(bell, FragmentSpec.of(0)) - 0.5

    rng = np.random.default_rng(1)
    prod = pure_density(tensor(random_state_vector(rng, (2,)), random_state_vector(rng, (2,))))
    assert shannon_mutual_observables(
        prod, Z_BASIS, FragmentSpec.of(0), X_BASIS, FragmentSpec.of(1)
    ) == pytest.approx(0.0, abs=1e-10)


@given(st.integers(0, 10 ** 6))
def test_measured_mi_below_quantum_mi(seed):
    rng = np.random.default_rng(seed)
    rho = pure_density(random_state_vector(rng, (2, 2)))
    m = shannon_mutual_observables(rho, Z_BASIS, FragmentSpec.of(0), Z_BASIS, FragmentSpec.of(1))
    assert m <= mutual_information(rho, FragmentSpec.of(0)) + 1e-9
