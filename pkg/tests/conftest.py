"""Shared generators for randomized models, Orlicz functions, families."""

import numpy as np
import pytest

from robust_orlicz import (EssSupIndicator, Exponential, OrliczFamily,
                           PiecewiseLinear, Power, Scaled, ScenarioModel)


def random_prior(rng, n_atoms, allow_zeros=True):
    w = rng.exponential(size=n_atoms)
    if allow_zeros and n_atoms > 1 and rng.random() < 0.3:
        kill = rng.integers(0, n_atoms)
        w[kill] = 0.0
    return w / w.sum()


def random_model(rng, n_atoms=None, n_priors=None) -> ScenarioModel:
    if n_atoms is None:
        n_atoms = int(rng.integers(2, 9))
    if n_priors is None:
        n_priors = int(rng.integers(1, 6))
    atoms = [f"w{i}" for i in range(n_atoms)]
    priors = [random_prior(rng, n_atoms) for _ in range(n_priors)]
    return ScenarioModel(atoms, priors)


def random_phi(rng):
    kind = rng.integers(0, 5)
    if kind == 0:
        return Power(float(rng.uniform(1.0, 3.0)))
    if kind == 1:
        return Exponential(float(rng.uniform(0.5, 2.0)))
    if kind == 2:
        return EssSupIndicator()
    if kind == 3:
        n = int(rng.integers(1, 4))
        bps = np.sort(rng.uniform(0.0, 2.0, size=n))
        slopes = np.sort(rng.uniform(0.1, 3.0, size=n))
        bound = float(bps[-1] + rng.uniform(0.5, 2.0)) if rng.random() < 0.3 else None
        return PiecewiseLinear(bps, slopes, bound)
    inner = Power(float(rng.uniform(1.0, 2.5)))
    return Scaled(inner, float(rng.uniform(0.5, 2.0)),
                  1.0 + float(rng.uniform(0.0, 2.0)))


def random_family(rng, model) -> OrliczFamily:
    return OrliczFamily({l: random_phi(rng) for l in model.prior_labels})


def random_x(rng, n_atoms):
    x = rng.normal(size=n_atoms) * rng.choice([0.5, 1.0, 3.0])
    if rng.random() < 0.1:
        x[rng.integers(0, n_atoms)] = 0.0
    return x


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)


@pytest.fixture
def delta_model():
    """Two atoms, priors delta_1 and delta_2."""
    return ScenarioModel(["a", "b"], [[1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def uniform2_model():
    return ScenarioModel(["a", "b"], [[0.5, 0.5]])
