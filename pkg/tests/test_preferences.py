import math

import numpy as np
import pytest

from robust_orlicz import (Agent, CARAUtility, LinearUtility, OrliczFamily,
                           PiecewiseLinearUtility, Power, ScenarioModel,
                           ValidationError, aggregate_family, evaluate_utility,
                           luxemburg_norm, verify_extension_bound)

from conftest import random_model, random_x


def _linear_agent(model, penalty=None):
    pen = penalty or {l: 0.0 for l in model.prior_labels}
    return Agent(LinearUtility(), model.prior_labels, pen)


class TestUtilities:
    def test_linear(self):
        u = LinearUtility(2.0)
        assert u(3.0) == 6.0
        assert u(0.0) == 0.0

    def test_cara_normalised(self):
        u = CARAUtility.normalised(1.0)
        assert u(0.0) == pytest.approx(0.0, abs=1e-15)
        assert u(-1.0) == pytest.approx(-1.0, abs=1e-12)
        # concavity on a grid
        xs = np.linspace(-2, 2, 41)
        v = u(xs)
        assert np.all(np.diff(v, 2) <= 1e-12)

    def test_piecewise_linear_kink(self):
        # slope 2 below 0, slope 1 above: u(-1) = -2, u(1) = 1
        u = PiecewiseLinearUtility([0.0], [2.0, 1.0])
        assert u(0.0) == 0.0
        assert u(-1.0) == -2.0
        assert u(1.0) == 1.0
        assert u(-3.0) == -6.0

    def test_piecewise_linear_multiple_knots(self):
        u = PiecewiseLinearUtility([-1.0, 1.0], [3.0, 1.0, 0.5])
        assert u(0.0) == 0.0
        assert u(-1.0) == -1.0
        assert u(-2.0) == -4.0   # extends with slope 3 left of -1
        assert u(1.0) == 1.0
        assert u(3.0) == 2.0     # slope 0.5 beyond the last knot

    def test_convexity_rejected(self):
        with pytest.raises(ValidationError):
            PiecewiseLinearUtility([0.0], [1.0, 2.0])  # increasing slopes

    def test_decreasing_rejected(self):
        with pytest.raises(ValidationError):
            PiecewiseLinearUtility([0.0], [1.0, -0.5])


class TestAgent:
    def test_requires_unit_loss_normalisation(self, uniform2_model):
        with pytest.raises(ValidationError):
            Agent(LinearUtility(2.0), ["P1"], {"P1": 0.0})

    def test_requires_vanishing_min_penalty(self, uniform2_model):
        with pytest.raises(ValidationError):
            Agent(LinearUtility(), ["P1"], {"P1": 0.5})

    def test_negative_penalty_rejected(self, delta_model):
        with pytest.raises(ValidationError):
            Agent(LinearUtility(), ["P1", "P2"], {"P1": 0.0, "P2": -1.0})

    def test_cara_raw_parameters_must_normalise(self):
        with pytest.raises(ValidationError):
            Agent(CARAUtility(beta=1.0, scale=1.0), ["P1"], {"P1": 0.0})


class TestEvaluateUtility:
    def test_linear_single_prior(self, uniform2_model):
        a = _linear_agent(uniform2_model)
        assert evaluate_utility(uniform2_model, a, [0.0, 2.0]) == pytest.approx(1.0)

    def test_min_over_priors(self, delta_model):
        a = Agent(LinearUtility(), ["P1", "P2"], {"P1": 0.0, "P2": 0.0})
        assert evaluate_utility(delta_model, a, [1.0, 8.0]) == pytest.approx(1.0)

    def test_penalty_shifts_choice(self, delta_model):
        a = Agent(LinearUtility(), ["P1", "P2"], {"P1": 9.0, "P2": 0.0})
        # P1 gives 1 + 9 = 10, P2 gives 8 + 0 = 8
        assert evaluate_utility(delta_model, a, [1.0, 8.0]) == pytest.approx(8.0)

    def test_unknown_prior_rejected(self, uniform2_model):
        a = Agent(LinearUtility(), ["P9"], {"P9": 0.0})
        with pytest.raises(ValidationError):
            evaluate_utility(uniform2_model, a, [1.0, 1.0])


class TestAggregateFamily:
    def test_linear_agent_gives_identity(self, uniform2_model):
        fam = aggregate_family(uniform2_model, [_linear_agent(uniform2_model)])
        phi = fam.phi("P1")
        for x in [0.0, 0.3, 1.0, 5.0]:
            assert phi(x) == pytest.approx(x, abs=1e-12)

    def test_cara_agent_closed_form(self, uniform2_model):
        a = Agent(CARAUtility.normalised(1.0), uniform2_model.prior_labels,
                  {"P1": 0.0})
        fam = aggregate_family(uniform2_model, [a])
        phi = fam.phi("P1")
        for x in [0.0, 0.5, 1.0, 2.0]:
            assert phi(x) == pytest.approx(math.expm1(x) / math.expm1(1.0),
                                           rel=1e-12)
        assert phi(1.0) <= 1.0 + 1e-12

    def test_penalty_divides(self, delta_model):
        a = Agent(LinearUtility(), ["P1", "P2"], {"P1": 0.0, "P2": 1.0})
        fam = aggregate_family(delta_model, [a])
        assert fam.phi("P2")(2.0) == pytest.approx(1.0)  # x / (1 + c)

    def test_uncovered_prior_rejected(self, delta_model):
        a = Agent(LinearUtility(), ["P1"], {"P1": 0.0})
        with pytest.raises(ValidationError):
            aggregate_family(delta_model, [a])

    def test_phi_at_one_bounded(self, rng):
        for _ in range(10):
            m = random_model(rng)
            agents = []
            for _ in range(int(rng.integers(1, 4))):
                beta = float(rng.uniform(0.2, 3.0))
                pen = {l: float(rng.uniform(0.0, 2.0)) for l in m.prior_labels}
                pen[m.prior_labels[int(rng.integers(0, m.n_priors))]] = 0.0
                agents.append(Agent(CARAUtility.normalised(beta),
                                    m.prior_labels, pen))
            fam = aggregate_family(m, agents)
            for label in m.prior_labels:
                assert fam.phi(label)(1.0) <= 1.0 + 1e-9

    def test_more_agents_never_shrink_the_norm(self, rng):
        m = random_model(rng, n_atoms=4, n_priors=2)
        a1 = Agent(CARAUtility.normalised(0.5), m.prior_labels,
                   {l: 0.0 for l in m.prior_labels})
        a2 = Agent(CARAUtility.normalised(2.5), m.prior_labels,
                   {l: 0.0 for l in m.prior_labels})
        fam1 = aggregate_family(m, [a1])
        fam12 = aggregate_family(m, [a1, a2])
        for _ in range(5):
            x = random_x(rng, m.n_atoms)
            n1 = luxemburg_norm(m, x, fam1).value
            n12 = luxemburg_norm(m, x, fam12).value
            assert n12 >= n1 - 1e-9 * max(1.0, n1)

    def test_preference_consistent_ordering(self, rng):
        # if |X| <= |Y| pointwise then ||X|| <= ||Y||
        m = random_model(rng)
        a = Agent(CARAUtility.normalised(1.0), m.prior_labels,
                  {l: 0.0 for l in m.prior_labels})
        fam = aggregate_family(m, [a])
        for _ in range(10):
            x = np.abs(random_x(rng, m.n_atoms))
            y = x + np.abs(random_x(rng, m.n_atoms))
            assert (luxemburg_norm(m, x, fam).value
                    <= luxemburg_norm(m, y, fam).value + 1e-9)


class TestExtensionBound:
    def test_no_violations_linear(self, uniform2_model):
        agents = [_linear_agent(uniform2_model)]
        fam = aggregate_family(uniform2_model, agents)
        rep = verify_extension_bound(uniform2_model, agents, fam,
                                     sample_size=50)
        assert rep.violations == 0
        assert rep.max_slack <= 1e-9

    def test_no_violations_mixed_agents(self, rng):
        for _ in range(5):
            m = random_model(rng)
            agents = [
                Agent(CARAUtility.normalised(float(rng.uniform(0.3, 2.0))),
                      m.prior_labels, {l: 0.0 for l in m.prior_labels}),
                Agent(PiecewiseLinearUtility([0.0], [1.0, 0.5]),
                      m.prior_labels, {l: 0.0 for l in m.prior_labels}),
            ]
            fam = aggregate_family(m, agents)
            rep = verify_extension_bound(m, agents, fam, sample_size=20)
            assert rep.violations == 0
            assert rep.n_checks > 0
