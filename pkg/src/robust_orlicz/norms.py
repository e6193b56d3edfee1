"""Robust Luxemburg norms over a family of priors.

The norm is inf{lam > 0 : sup_P E_P[phi_P(|X|/lam)] <= 1}, located by
bracketing and bisection on log(lam). The modular is monotone in lam but
may jump (ess-sup indicator), so derivative-free bracketing is the only
safe strategy; the reported value is the midpoint of the final bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional

import numpy as np

from .errors import ConsistencyError, ValidationError
from .model import RandomVariable, ScenarioModel, canonicalise, expectation
from .orlicz import EssSupIndicator, OrliczFunction, Power, Scaled

INF = math.inf

DEFAULT_TOL = 1e-10
MAX_ITER = 200
_LAMBDA_CAP = 2.0 ** 1023
_LAMBDA_FLOOR = 1e-300


@dataclass(frozen=True)
class OrliczFamily:
    """Assignment of one Orlicz function to each prior of a model."""

    functions: Mapping[str, OrliczFunction]

    def __init__(self, functions: Mapping[str, OrliczFunction]):
        object.__setattr__(self, "functions", dict(functions))

    def phi(self, label: str) -> OrliczFunction:
        try:
            return self.functions[label]
        except KeyError:
            raise ValidationError(f"family has no Orlicz function for prior {label!r}") from None

    def check_model(self, model: ScenarioModel) -> None:
        missing = [l for l in model.prior_labels if l not in self.functions]
        if missing:
            raise ValidationError(f"family misses priors {missing}")

    def phi_max(self, x) -> float:
        return max(phi(x) for phi in self.functions.values())

    def phi_max_finite_point(self, grid=None) -> Optional[float]:
        """Some x0 > 0 with sup_P phi_P(x0) finite, or None."""
        if grid is None:
            grid = [2.0 ** (-k) for k in range(0, 64)]
        for x0 in grid:
            if self.phi_max(x0) < INF:
                return x0
        return None

    # -- constructors -----------------------------------------------------

    @staticmethod
    def uniform(model: ScenarioModel, phi: OrliczFunction) -> "OrliczFamily":
        return OrliczFamily({l: phi for l in model.prior_labels})

    @staticmethod
    def additively_penalised(model: ScenarioModel, phi: OrliczFunction,
                             gamma: Mapping[str, float]) -> "OrliczFamily":
        _check_labels(model, gamma, "gamma")
        return OrliczFamily({l: Scaled(phi, 1.0, 1.0 + float(gamma[l]))
                             for l in model.prior_labels})

    @staticmethod
    def multiplicatively_weighted(model: ScenarioModel, phi: OrliczFunction,
                                  theta: Mapping[str, float]) -> "OrliczFamily":
        _check_labels(model, theta, "theta")
        return OrliczFamily({l: Scaled(phi, float(theta[l]), 1.0)
                             for l in model.prior_labels})

    @staticmethod
    def doubly_penalised(model: ScenarioModel, phi: OrliczFunction,
                         theta: Mapping[str, float],
                         gamma: Mapping[str, float]) -> "OrliczFamily":
        _check_labels(model, theta, "theta")
        _check_labels(model, gamma, "gamma")
        return OrliczFamily({l: Scaled(phi, float(theta[l]), 1.0 + float(gamma[l]))
                             for l in model.prior_labels})

    @staticmethod
    def power_ladder(model: ScenarioModel, start: int = 1) -> "OrliczFamily":
        """Prior number n gets phi(x) = x**(start + n - 1)."""
        return OrliczFamily({l: Power(float(start + i))
                             for i, l in enumerate(model.prior_labels)})


def _check_labels(model: ScenarioModel, mapping: Mapping[str, float], name: str) -> None:
    missing = [l for l in model.prior_labels if l not in mapping]
    if missing:
        raise ValidationError(f"{name} misses priors {missing}")


@dataclass
class NormResult:
    value: float
    bracket: tuple
    modular_at_value: float
    iterations: int
    per_prior_norms: Dict[str, float]

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "bracket": list(self.bracket),
            "modular_at_value": self.modular_at_value,
            "iterations": self.iterations,
            "per_prior_norms": dict(self.per_prior_norms),
        }


# -- modulars -------------------------------------------------------------


def single_prior_modular(prior: np.ndarray, phi: OrliczFunction,
                         abs_x: np.ndarray, lam: float) -> float:
    if lam <= 0:
        raise ValidationError("modular scale must be positive")
    pos = prior > 0.0
    if not np.any(pos):
        return 0.0
    vals = phi._eval_array(abs_x[pos] / lam)
    if np.any(np.isinf(vals)):
        return INF
    return float(np.dot(prior[pos], vals))


def modular(model: ScenarioModel, x, lam: float, family: OrliczFamily,
            early_exit: bool = False) -> float:
    """sup over priors of E_P[phi_P(|X| / lam)]."""
    family.check_model(model)
    abs_x = np.abs(canonicalise(model, x).values)
    best = 0.0
    for label, prior in zip(model.prior_labels, model.priors):
        m = single_prior_modular(prior, family.phi(label), abs_x, lam)
        if m > best:
            best = m
        if early_exit and best > 1.0:
            return best
    return best


# -- norms ----------------------------------------------------------------


def _norm_bisection(pred: Callable[[float], bool], tol: float,
                    max_iter: int) -> tuple:
    """inf of the (upward-closed) set {lam : pred(lam)}.

    Returns (value, (lo, hi), iterations); value may be 0.0 or inf.
    """
    it = 0
    if pred(1.0):
        hi, lo = 1.0, 0.5
        while pred(lo):
            hi, lo = lo, lo / 2.0
            it += 1
            if lo < _LAMBDA_FLOOR:
                return 0.0, (0.0, hi), it
    else:
        lo, hi = 1.0, 2.0
        while not pred(hi):
            lo, hi = hi, hi * 2.0
            it += 1
            if hi > _LAMBDA_CAP:
                return INF, (lo, INF), it
    while it < max_iter and hi - lo > tol * max(1.0, hi):
        mid = math.sqrt(lo * hi) if lo > 0 else 0.5 * (lo + hi)
        if not lo < mid < hi:
            mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
        it += 1
    return 0.5 * (lo + hi), (lo, hi), it


def single_prior_luxemburg(prior: np.ndarray, phi: OrliczFunction, x,
                           tol: float = DEFAULT_TOL) -> float:
    """Luxemburg (semi)norm of X under one prior; closed forms when exact."""
    abs_x = np.abs(np.asarray(x, dtype=float))
    pos = prior > 0.0
    if not np.any(pos) or not np.any(abs_x[pos] > 0):
        return 0.0
    if isinstance(phi, Power):
        return float(np.dot(prior[pos], abs_x[pos] ** phi.p) ** (1.0 / phi.p))
    if isinstance(phi, EssSupIndicator):
        return float(np.max(abs_x[pos]))
    if isinstance(phi, Scaled) and isinstance(phi.inner, Power):
        p, d = phi.inner.p, phi.one_plus_gamma
        base = float(np.dot(prior[pos], abs_x[pos] ** p) ** (1.0 / p))
        return phi.theta * base / d ** (1.0 / p)
    if isinstance(phi, Scaled) and isinstance(phi.inner, EssSupIndicator):
        return phi.theta * float(np.max(abs_x[pos]))
    value, _, _ = _norm_bisection(
        lambda lam: single_prior_modular(prior, phi, abs_x, lam) <= 1.0,
        tol, MAX_ITER)
    return value


def luxemburg_norm(model: ScenarioModel, x, family: OrliczFamily,
                   tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER,
                   check_consistency: bool = True) -> NormResult:
    """Robust Luxemburg norm with per-prior breakdown.

    The sup of the per-prior norms must agree with the joint bisection
    value within 2 * tol; a violation raises ConsistencyError, since the
    two expressions are definitionally equal.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    family.check_model(model)
    abs_x = np.abs(canonicalise(model, x).values)

    def pred(lam: float) -> bool:
        for label, prior in zip(model.prior_labels, model.priors):
            if single_prior_modular(prior, family.phi(label), abs_x, lam) > 1.0:
                return False
        return True

    value, bracket, iters = _norm_bisection(pred, tol, max_iter)
    per_prior = {
        label: single_prior_luxemburg(prior, family.phi(label), abs_x, tol)
        for label, prior in zip(model.prior_labels, model.priors)
    }
    if value == INF:
        mod_at = INF
    elif value == 0.0:
        mod_at = 0.0
    else:
        mod_at = modular(model, abs_x, bracket[1], family)
    if check_consistency:
        sup_pp = max(per_prior.values())
        if value == INF or sup_pp == INF:
            ok = value == sup_pp
        else:
            ok = abs(value - sup_pp) <= 2.0 * tol * max(1.0, value, sup_pp)
        if not ok:
            raise ConsistencyError(
                f"joint bisection value {value!r} disagrees with sup of "
                f"per-prior norms {sup_pp!r}")
    return NormResult(value=value, bracket=bracket, modular_at_value=mod_at,
                      iterations=iters, per_prior_norms=per_prior)


def penalised_norm(model: ScenarioModel, x, phi: OrliczFunction,
                   gamma: Mapping[str, float], tol: float = DEFAULT_TOL,
                   max_iter: int = MAX_ITER) -> NormResult:
    """inf{lam : sup_P (E_P[phi(|X|/lam)] - gamma(P)) <= 1}.

    Cross-checked against the equivalent family phi_P = phi / (1 + gamma_P).
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    _check_labels(model, gamma, "gamma")
    if any(float(g) < 0 for g in gamma.values()):
        raise ValidationError("penalties must be nonnegative")
    abs_x = np.abs(canonicalise(model, x).values)

    def pred(lam: float) -> bool:
        for label, prior in zip(model.prior_labels, model.priors):
            m = single_prior_modular(prior, phi, abs_x, lam)
            if m - float(gamma[label]) > 1.0:
                return False
        return True

    value, bracket, iters = _norm_bisection(pred, tol, max_iter)
    family = OrliczFamily.additively_penalised(model, phi, gamma)
    cross = luxemburg_norm(model, abs_x, family, tol=tol, max_iter=max_iter)
    if value == INF or cross.value == INF:
        ok = value == cross.value
    else:
        ok = abs(value - cross.value) <= 4.0 * tol * max(1.0, value)
    if not ok:
        raise ConsistencyError(
            f"penalised norm {value!r} disagrees with scaled-family norm {cross.value!r}")
    return NormResult(value=value, bracket=bracket,
                      modular_at_value=cross.modular_at_value,
                      iterations=iters, per_prior_norms=cross.per_prior_norms)


def weighted_lp_norm(model: ScenarioModel, x, p: float,
                     theta: Mapping[str, float]) -> float:
    """sup_P theta(P) * ||X||_{L^p(P)} in closed form; p may be inf."""
    if p < 1.0:
        raise ValidationError("p must be at least 1")
    _check_labels(model, theta, "theta")
    if any(float(t) <= 0 or not math.isfinite(float(t)) for t in theta.values()):
        raise ValidationError("theta must be finite and positive")
    abs_x = np.abs(canonicalise(model, x).values)
    best = 0.0
    for label, prior in zip(model.prior_labels, model.priors):
        pos = prior > 0.0
        if not np.any(pos):
            continue
        if math.isinf(p):
            n = float(np.max(abs_x[pos]))
        else:
            n = float(np.dot(prior[pos], abs_x[pos] ** p) ** (1.0 / p))
        best = max(best, float(theta[label]) * n)
    return best


def risk_measure(model: ScenarioModel, x, gamma: Mapping[str, float]) -> float:
    """rho(X) = sup_P E_P[X] - gamma(P) for X >= 0 quasi-surely."""
    _check_labels(model, gamma, "gamma")
    xc = canonicalise(model, x).values
    if np.any(xc < 0):
        raise ValidationError("risk_measure expects a nonnegative claim")
    return max(
        expectation(prior, xc) - float(gamma[label])
        for label, prior in zip(model.prior_labels, model.priors)
    )
