import json
import math

import numpy as np
import pytest

from robust_orlicz import (EssSupIndicator, Exponential, OrliczFamily,
                           PiecewiseLinear, Power, Scaled, ScenarioModel,
                           ValidationError, agents_from_json, decode_float,
                           dumps_report, encode_float, family_from_json,
                           family_to_json, jsonify, model_from_json,
                           model_to_json, orlicz_from_json, orlicz_to_json)

from conftest import random_model, random_phi


class TestFloatCodec:
    def test_infinities(self):
        assert encode_float(math.inf) == "inf"
        assert encode_float(-math.inf) == "-inf"
        assert decode_float("inf") == math.inf
        assert decode_float("-inf") == -math.inf

    def test_round_trip_finite(self):
        for v in [0.0, 1.5, -2.25, 1e-300]:
            assert decode_float(encode_float(v)) == v

    def test_jsonify_significant_digits(self):
        out = jsonify({"a": 1.0 / 3.0, "b": [math.inf, True, 7]})
        assert out["a"] == 0.333333333333
        assert out["b"] == ["inf", True, 7]

    def test_jsonify_preserves_zero_and_bools(self):
        assert jsonify(0.0) == 0.0
        assert jsonify(False) is False


class TestOrliczRoundTrip:
    def test_known_kinds(self):
        for phi in [Power(2.5), Exponential(1.5), EssSupIndicator(),
                    PiecewiseLinear([0.0, 1.0], [0.5, 2.0], bound=3.0),
                    Scaled(Power(2), 2.0, 1.5)]:
            back = orlicz_from_json(orlicz_to_json(phi))
            for x in [0.0, 0.4, 1.0, 2.7]:
                assert back(x) == phi(x)

    def test_random_functions(self, rng):
        for _ in range(20):
            phi = random_phi(rng)
            back = orlicz_from_json(orlicz_to_json(phi))
            for x in rng.uniform(0.0, 4.0, size=5):
                assert back(float(x)) == phi(float(x))

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            orlicz_from_json({"kind": "mystery"})

    def test_missing_field_rejected(self):
        with pytest.raises(ValidationError):
            orlicz_from_json({"kind": "power"})


class TestModelRoundTrip:
    def test_random_models(self, rng):
        for _ in range(10):
            m = random_model(rng)
            back = model_from_json(model_to_json(m))
            assert back.atoms == m.atoms
            assert back.prior_labels == m.prior_labels
            np.testing.assert_allclose(np.stack(back.priors),
                                       np.stack(m.priors), rtol=1e-15)

    def test_default_labels(self):
        m = model_from_json({"atoms": ["a", "b"],
                             "priors": [{"masses": [0.5, 0.5]}]})
        assert m.prior_labels == ("P1",)

    def test_missing_sections_rejected(self):
        with pytest.raises(ValidationError):
            model_from_json({"atoms": ["a"]})


class TestFamilyRoundTrip:
    def test_uniform_spec(self, uniform2_model):
        fam = family_from_json({"uniform": {"kind": "power", "p": 2}},
                               uniform2_model)
        assert fam.phi("P1")(2.0) == 4.0

    def test_joint_spec_with_penalties(self, delta_model):
        fam = family_from_json(
            {"joint": {"kind": "power", "p": 1},
             "gamma": {"P1": 0.0, "P2": 1.0}}, delta_model)
        assert fam.phi("P2")(2.0) == pytest.approx(1.0)

    def test_per_prior_round_trip(self, rng):
        m = random_model(rng)
        fam = OrliczFamily({l: random_phi(rng) for l in m.prior_labels})
        back = family_from_json(family_to_json(m, fam), m)
        for l in m.prior_labels:
            for x in [0.3, 1.0, 2.0]:
                assert back.phi(l)(x) == fam.phi(l)(x)

    def test_empty_spec_rejected(self, uniform2_model):
        with pytest.raises(ValidationError):
            family_from_json({}, uniform2_model)


class TestAgents:
    def test_parse_and_reject(self):
        good = {"agents": [{"utility": {"kind": "cara", "beta": 1.0},
                            "priors": ["P1"], "penalty": {"P1": 0.0}}]}
        agents = agents_from_json(good)
        assert len(agents) == 1
        assert agents[0].utility(-1.0) == pytest.approx(-1.0, abs=1e-12)
        with pytest.raises(ValidationError):
            agents_from_json({"agents": [{"priors": ["P1"],
                                          "penalty": {"P1": 0.0}}]})

    def test_piecewise_utility_spec(self):
        data = {"agents": [{"utility": {"kind": "piecewise_linear",
                                        "knots": [0.0], "slopes": [1.0, 0.5]},
                            "priors": ["P1"], "penalty": {"P1": 0.0},
                            "name": "pw"}]}
        a = agents_from_json(data)[0]
        assert a.name == "pw"
        assert a.utility(2.0) == 1.0


class TestDumpsReport:
    def test_deterministic_and_sorted(self):
        obj = {"b": 1.0 / 3.0, "a": [math.inf, 2.0]}
        s1 = dumps_report(obj)
        s2 = dumps_report({"a": [math.inf, 2.0], "b": 1.0 / 3.0})
        assert s1 == s2
        parsed = json.loads(s1)
        assert parsed["a"][0] == "inf"
        assert parsed["b"] == 0.333333333333
