"""Variational-preference agents and the aggregated Orlicz family.

Each agent carries a concave nondecreasing utility u with u(0) = 0, a
subset of the model priors, and a penalty c >= 0 with min c = 0. The
aggregated Orlicz function of a prior P is the pointwise sup of
(-u_i(-x)) / (1 + c_i(P)) over agents whose prior set contains P; the
normalisation u(-1) = -1 pins phi_P(1) <= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .model import ScenarioModel, canonicalise, expectation
from .norms import DEFAULT_TOL, OrliczFamily, luxemburg_norm
from .orlicz import INF, OrliczFunction, validate_orlicz

NORMALISATION_TOL = 1e-9


class Utility:
    """Concave nondecreasing u on the reals with u(0) = 0."""

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self.eval_array(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


@dataclass(frozen=True)
class LinearUtility(Utility):
    slope: float = 1.0

    def __post_init__(self):
        if self.slope <= 0:
            raise ValidationError("utility slope must be positive")

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        return self.slope * x


@dataclass(frozen=True)
class CARAUtility(Utility):
    """u(x) = scale * (1 - exp(-beta x)); scale = 1/(e^beta - 1) gives
    the normalisation u(-1) = -1."""

    beta: float
    scale: float

    def __post_init__(self):
        if self.beta <= 0 or self.scale <= 0:
            raise ValidationError("CARA parameters must be positive")

    @staticmethod
    def normalised(beta: float) -> "CARAUtility":
        return CARAUtility(beta=beta, scale=1.0 / math.expm1(beta))

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.scale * -np.expm1(-self.beta * x)


@dataclass(frozen=True)
class PiecewiseLinearUtility(Utility):
    """Concave piecewise-linear utility: knots (ascending, containing 0 in
    range or not), slopes nonincreasing, anchored by u(0) = 0."""

    knots: tuple
    slopes: tuple  # slopes[i] on [knots[i], knots[i+1]); slopes[0] extends left

    def __init__(self, knots: Sequence[float], slopes: Sequence[float]):
        kn = tuple(float(k) for k in knots)
        sl = tuple(float(s) for s in slopes)
        if len(sl) != len(kn) + 1:
            raise ValidationError("need one more slope than knots")
        if any(x >= y for x, y in zip(kn, kn[1:])):
            raise ValidationError("knots must be strictly ascending")
        if any(x < y for x, y in zip(sl, sl[1:])) :
            raise ValidationError("slopes must be nonincreasing (concavity)")
        if any(s < 0 for s in sl):
            raise ValidationError("utility must be nondecreasing")
        object.__setattr__(self, "knots", kn)
        object.__setattr__(self, "slopes", sl)

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        kn = np.asarray(self.knots)
        sl = np.asarray(self.slopes)
        grid = np.concatenate([kn, [0.0]]) if 0.0 not in self.knots else kn
        grid = np.unique(grid)
        # value at each grid point, anchored so that u(0) = 0
        def seg_slope(t):
            i = int(np.searchsorted(kn, t, side="right"))
            return sl[i]
        vals = np.zeros(grid.size)
        z = int(np.searchsorted(grid, 0.0))
        for i in range(z + 1, grid.size):
            vals[i] = vals[i - 1] + seg_slope(grid[i - 1]) * (grid[i] - grid[i - 1])
        for i in range(z - 1, -1, -1):
            vals[i] = vals[i + 1] - seg_slope(grid[i]) * (grid[i + 1] - grid[i])
        idx = np.clip(np.searchsorted(grid, x, side="right") - 1, 0, grid.size - 1)
        below = x < grid[0]
        slopes_at = np.array([seg_slope(g) for g in grid])
        out = vals[idx] + slopes_at[idx] * (x - grid[idx])
        # left of the first grid point the leftmost slope extends
        out = np.where(below, vals[0] + sl[0] * (x - grid[0]), out)
        return out


@dataclass(frozen=True)
class Agent:
    utility: Utility
    prior_labels: tuple
    penalty: Dict[str, float]
    name: str = ""

    def __init__(self, utility: Utility, prior_labels: Sequence[str],
                 penalty: Dict[str, float], name: str = ""):
        prior_labels = tuple(str(l) for l in prior_labels)
        if not prior_labels:
            raise ValidationError("agent needs at least one prior")
        penalty = {str(k): float(v) for k, v in penalty.items()}
        missing = [l for l in prior_labels if l not in penalty]
        if missing:
            raise ValidationError(f"agent penalty misses priors {missing}")
        if any(v < 0 for v in penalty.values()):
            raise ValidationError("penalties must be nonnegative")
        if min(penalty[l] for l in prior_labels) > NORMALISATION_TOL:
            raise ValidationError("penalty must vanish at some prior (min c = 0)")
        if abs(utility(0.0)) > NORMALISATION_TOL:
            raise ValidationError("utility must satisfy u(0) = 0")
        if abs(utility(-1.0) + 1.0) > NORMALISATION_TOL:
            raise ValidationError(
                "utility normalisation u(-1) = -1 violated; renormalise the "
                "utility rather than relying on silent rescaling")
        object.__setattr__(self, "utility", utility)
        object.__setattr__(self, "prior_labels", prior_labels)
        object.__setattr__(self, "penalty", penalty)
        object.__setattr__(self, "name", name)


def evaluate_utility(model: ScenarioModel, agent: Agent, x) -> float:
    """min over the agent's priors of E_P[u(X)] + c(P)."""
    missing = [l for l in agent.prior_labels if l not in model.prior_labels]
    if missing:
        raise ValidationError(f"agent priors {missing} are not model priors")
    xc = canonicalise(model, x).values
    return min(
        expectation(model.prior(l), agent.utility(xc)) + agent.penalty[l]
        for l in agent.prior_labels
    )


@dataclass(frozen=True)
class AggregateOrlicz(OrliczFunction):
    """phi(x) = max over agent terms of (-u(-x)) / (1 + c)."""

    terms: tuple  # of (Utility, one_plus_c)

    def __init__(self, terms: Sequence[Tuple[Utility, float]]):
        terms = tuple((u, float(d)) for u, d in terms)
        if not terms:
            raise ValidationError("aggregate needs at least one term")
        if any(d < 1.0 for _, d in terms):
            raise ValidationError("divisors 1 + c must be >= 1")
        object.__setattr__(self, "terms", terms)

    @property
    def domain_bound(self) -> float:
        return INF

    def _eval_array(self, x: np.ndarray) -> np.ndarray:
        out = np.full(x.shape, -INF)
        for u, d in self.terms:
            out = np.maximum(out, -u.eval_array(-x) / d)
        return np.maximum(out, 0.0)


def aggregate_family(model: ScenarioModel, agents: Sequence[Agent]) -> OrliczFamily:
    """Pointwise-sup aggregation of the agents' risk attitudes per prior.

    Every model prior must be covered by at least one agent; each
    aggregated function is validated as an Orlicz function and must
    satisfy phi_P(1) <= 1 (a consequence of the utility normalisation).
    """
    functions = {}
    for label in model.prior_labels:
        terms = [(a.utility, 1.0 + a.penalty[label])
                 for a in agents if label in a.prior_labels]
        if not terms:
            raise ValidationError(f"prior {label!r} is covered by no agent")
        phi = AggregateOrlicz(terms)
        validate_orlicz(phi)
        if phi(1.0) > 1.0 + NORMALISATION_TOL:
            raise ValidationError(
                f"aggregated function exceeds 1 at x = 1 for prior {label!r}")
        functions[label] = phi
    return OrliczFamily(functions)


@dataclass
class ExtensionBoundReport:
    n_checks: int
    max_slack: float
    violations: int

    def to_dict(self) -> dict:
        return {"n_checks": self.n_checks, "max_slack": self.max_slack,
                "violations": self.violations}


def verify_extension_bound(model: ScenarioModel, agents: Sequence[Agent],
                           family: OrliczFamily, sample_size: int = 100,
                           tol: float = DEFAULT_TOL,
                           seed: int = 0) -> ExtensionBoundReport:
    """Check E_P[-u_i(-|X|/lam)] <= 1 + c_i(P) at lam = ||X|| (1 + 10 tol).

    This is the finite-model form of the continuity estimate that lets
    each preference functional extend to the aggregated space; the
    reported slack is the worst value of LHS - RHS and must be <= 0 up
    to tolerance.
    """
    rng = np.random.default_rng(seed)
    max_slack = -INF
    violations = 0
    checks = 0
    for _ in range(sample_size):
        x = rng.normal(size=model.n_atoms) * rng.integers(1, 5)
        abs_x = np.abs(canonicalise(model, x).values)
        value = luxemburg_norm(model, abs_x, family, tol=tol).value
        if not (0 < value < INF):
            continue
        lam = value * (1.0 + 10.0 * tol)
        for agent in agents:
            for label in agent.prior_labels:
                if label not in model.prior_labels:
                    continue
                lhs = expectation(model.prior(label),
                                  -agent.utility.eval_array(-abs_x / lam))
                slack = lhs - (1.0 + agent.penalty[label])
                checks += 1
                max_slack = max(max_slack, slack)
                if slack > 10.0 * tol:
                    violations += 1
    return ExtensionBoundReport(n_checks=checks, max_slack=max_slack,
                                violations=violations)
