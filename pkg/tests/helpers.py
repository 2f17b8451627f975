"""Shared constructors for randomized test states."""
import numpy as np

from darwinlab.branching import BranchingState
from darwinlab.qstate import HilbertShape, StateVector


def random_ket(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_state_vector(rng, dims) -> StateVector:
    shape = HilbertShape(tuple(dims))
    return StateVector(shape, random_ket(rng, shape.total_dim))


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_branching_state(rng, n_env, k, d=2, allow_zero=False) -> BranchingState:
    w = rng.random(k)
    if allow_zero and k > 1:
        w[rng.integers(k)] = 0.0
    probs = w / w.sum()
    phases = rng.uniform(0.0, 2.0 * np.pi, size=k)
    conds = [np.stack([random_ket(rng, d) for _ in range(k)]) for _ in range(n_env)]
    return BranchingState(probs, phases, conds)
