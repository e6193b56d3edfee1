"""Orlicz functions: evaluation, convex conjugates, affine minorants.

An Orlicz function here is a lower semicontinuous, nondecreasing, convex
map phi: [0, inf) -> [0, inf] with phi(0) = 0 that is finite at some
positive point and nonzero at some positive point. Values are plain
floats with math.inf as the explicit +infinity sentinel; every `evaluate`
accepts scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError
from .scalar import bisect_threshold, golden_section_max

INF = math.inf

_BRACKET_CAP = 2.0 ** 1023


@dataclass(frozen=True)
class AffineMinorant:
    """A line a*x + b with a > 0, b <= 0 lying below an Orlicz function."""

    a: float
    b: float

    def __call__(self, x: float) -> float:
        return self.a * x + self.b


class OrliczFunction:
    """Base class. Subclasses implement `_eval_array` and `domain_bound`.

    `conjugate` and `right_derivative` have numeric fallbacks here and are
    overridden with closed forms where those exist.
    """

    @property
    def domain_bound(self) -> float:
        """Supremum of {x : phi(x) < inf}."""
        raise NotImplementedError

    def _eval_array(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0):
            raise ValidationError("Orlicz functions are defined on [0, inf) only")
        out = self._eval_array(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    # -- conjugation ------------------------------------------------------

    def conjugate(self, y: float) -> float:
        """phi*(y) = sup_{x >= 0} (x*y - phi(x)).

        Numeric route: the objective is concave in x, so bracket expansion
        in powers of 2 followed by golden-section search is safe.
        """
        if y < 0:
            raise ValidationError("conjugate argument must be nonnegative")
        if y == 0.0:
            return 0.0

        def g(x: float) -> float:
            v = self(x)
            return -INF if v == INF else x * y - v

        bound = self.domain_bound
        if math.isfinite(bound):
            hi = bound
        else:
            hi = 1.0
            while hi < _BRACKET_CAP and g(2.0 * hi) >= g(hi):
                hi *= 2.0
            if hi >= _BRACKET_CAP and g(hi) > 0:
                return INF
            # g is concave: g(2 hi) < g(hi) places the max in [0, 2 hi]
            hi = min(2.0 * hi, _BRACKET_CAP)
        _, best = golden_section_max(g, 0.0, hi, tol=1e-12)
        # lsc value at a finite domain bound is the left limit; include it
        best = max(best, g(hi), 0.0)
        return best

    def conjugate_array(self, y: np.ndarray) -> np.ndarray:
        ys = np.atleast_1d(np.asarray(y, dtype=float))
        return np.array([self.conjugate(float(v)) for v in ys])

    # -- derivatives ------------------------------------------------------

    def right_derivative(self, x: float) -> float:
        """Right derivative at x >= 0; inf at a jump to infinity."""
        if x >= self.domain_bound:
            return INF
        h = 1e-7 * max(1.0, x)
        hi = self(x + h)
        if hi == INF:
            return INF
        return (hi - self(x)) / h

    # -- affine minorant --------------------------------------------------

    def affine_minorant(self) -> AffineMinorant:
        """Line a*x + b <= phi with a > 0, b <= 0.

        Constructed as a subgradient at the point where phi first reaches 1
        (or at the domain bound if phi jumps to infinity before that).
        """
        bound = self.domain_bound
        if math.isfinite(bound) and self(bound) < 1.0:
            x1 = bound
            a = (self(x1) + 1.0) / x1
        else:
            hi = min(1.0, bound / 2.0) if math.isfinite(bound) else 1.0
            while self(hi) < 1.0:
                hi = min(2.0 * hi, bound) if math.isfinite(bound) else 2.0 * hi
                if hi >= _BRACKET_CAP:
                    raise ValidationError("Orlicz function never reaches level 1")
            lo = 0.0
            lo, x1, _ = bisect_threshold(lambda t: self(t) >= 1.0, lo, hi)
            a = self.right_derivative(x1)
            if a == INF or a <= 0.0:
                a = (self(x1) + 1.0) / x1
        b = min(0.0, self(x1) - a * x1)
        return AffineMinorant(a=a, b=b)

    # -- validation -------------------------------------------------------

    def _check_nontrivial(self) -> None:
        bound = self.domain_bound
        if bound <= 0:
            raise ValidationError("Orlicz function must be finite somewhere on (0, inf)")
        probe = bound / 2.0 if math.isfinite(bound) else 1.0
        if self(probe) == INF:
            raise ValidationError("Orlicz function must be finite somewhere on (0, inf)")
        # positivity somewhere (possibly +inf counts)
        x = probe
        while x <= 2.0 ** 600:
            if self(min(x, bound) if math.isfinite(bound) else x) > 0.0:
                return
            if math.isfinite(bound) and x >= bound:
                break
            x *= 2.0
        if math.isfinite(bound) and self(bound) == 0.0:
            # jump to inf just beyond the bound still counts as nonzero
            return
        raise ValidationError("Orlicz function is identically zero")


@dataclass(frozen=True)
class Power(OrliczFunction):
    """phi(x) = x**p with p >= 1."""

    p: float

    def __post_init__(self):
        if self.p < 1.0:
            raise ValidationError("Power exponent must satisfy p >= 1")

    @property
    def domain_bound(self) -> float:
        return INF

    def _eval_array(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return x ** self.p

    def conjugate(self, y: float) -> float:
        if y < 0:
            raise ValidationError("conjugate argument must be nonnegative")
        if self.p == 1.0:
            return 0.0 if y <= 1.0 else INF
        q = self.p / (self.p - 1.0)
        return (self.p - 1.0) * self.p ** (-q) * y ** q

    def conjugate_array(self, y: np.ndarray) -> np.ndarray:
        ys = np.atleast_1d(np.asarray(y, dtype=float))
        if self.p == 1.0:
            return np.where(ys <= 1.0, 0.0, INF)
        q = self.p / (self.p - 1.0)
        return (self.p - 1.0) * self.p ** (-q) * ys ** q

    def right_derivative(self, x: float) -> float:
        if self.p == 1.0:
            return 1.0
        return self.p * x ** (self.p - 1.0)


@dataclass(frozen=True)
class Exponential(OrliczFunction):
    """phi(x) = exp(beta * x) - 1 with beta > 0."""

    beta: float

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValidationError("Exponential rate must be positive")

    @property
    def domain_bound(self) -> float:
        return INF

    def _eval_array(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.expm1(self.beta * x)

    def conjugate(self, y: float) -> float:
        if y < 0:
            raise ValidationError("conjugate argument must be nonnegative")
        if y <= self.beta:
            return 0.0
        r = y / self.beta
        return r * math.log(r) - r + 1.0

    def conjugate_array(self, y: np.ndarray) -> np.ndarray:
        ys = np.atleast_1d(np.asarray(y, dtype=float))
        r = np.maximum(ys / self.beta, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = r * np.log(r) - r + 1.0
        return np.where(ys <= self.beta, 0.0, out)

    def right_derivative(self, x: float) -> float:
        return self.beta * math.exp(self.beta * x)


@dataclass(frozen=True)
class EssSupIndicator(OrliczFunction):
    """phi(x) = inf * 1_{(1, inf)}(x); its Luxemburg norm is the ess-sup."""

    @property
    def domain_bound(self) -> float:
        return 1.0

    def _eval_array(self, x: np.ndarray) -> np.ndarray:
        return np.where(x <= 1.0, 0.0, INF)

    def conjugate(self, y: float) -> float:
        if y < 0:
            raise ValidationError("conjugate argument must be nonnegative")
        return float(y)

    def conjugate_array(self, y: np.ndarray) -> np.ndarray:
        return np.atleast_1d(np.asarray(y, dtype=float)).copy()

    def right_derivative(self, x: float) -> float:
        return 0.0 if x < 1.0 else INF


@dataclass(frozen=True)
class PiecewiseLinear(OrliczFunction):
    """Convex piecewise-linear phi given by breakpoints and slopes.

    slopes[i] applies on [breakpoints[i], breakpoints[i+1]); the function
    is 0 below the first breakpoint and +inf beyond `bound` (if finite),
    with the left-limit value at the bound itself.
    """

    breakpoints: tuple
    slopes: tuple
    bound: Optional[float] = None
    _knots: np.ndarray = field(init=False, repr=False, compare=False)
    _values: np.ndarray = field(init=False, repr=False, compare=False)

    def __init__(self, breakpoints: Sequence[float], slopes: Sequence[float],
                 bound: Optional[float] = None):
        bp = tuple(float(b) for b in breakpoints)
        sl = tuple(float(s) for s in slopes)
        if len(bp) != len(sl) or not bp:
            raise ValidationError("need equally many breakpoints and slopes")
        if any(b < 0 for b in bp) or any(x >= y for x, y in zip(bp, bp[1:])):
            raise ValidationError("breakpoints must be ascending and nonnegative")
        if any(s < 0 for s in sl) or any(x > y for x, y in zip(sl, sl[1:])):
            raise ValidationError("slopes must be nondecreasing and nonnegative (convexity)")
        if bound is not None:
            bound = float(bound)
            if bound <= 0 or bound < bp[-1]:
                raise ValidationError("domain bound must be positive and beyond the last breakpoint")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "slopes", sl)
        object.__setattr__(self, "bound", bound)
        knots = np.asarray(bp)
        vals = np.concatenate([[0.0], np.cumsum(np.asarray(sl[:-1]) * np.diff(knots))])
        object.__setattr__(self, "_knots", knots)
        object.__setattr__(self, "_values", vals)
        self._check_nontrivial()

    @property
    def domain_bound(self) -> float:
        return INF if self.bound is None else self.bound

    def _eval_array(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._knots, x, side="right") - 1
        below = idx < 0
        idx = np.clip(idx, 0, len(self._knots) - 1)
        out = self._values[idx] + np.asarray(self.slopes)[idx] * (x - self._knots[idx])
        out = np.where(below, 0.0, out)
        if self.bound is not None:
            out = np.where(x > self.bound, INF, out)
        return out

    def right_derivative(self, x: float) -> float:
        if self.bound is not None and x >= self.bound:
            return INF
        idx = int(np.searchsorted(self._knots, x, side="right")) - 1
        return 0.0 if idx < 0 else self.slopes[idx]

    def conjugate(self, y: float) -> float:
        # x y - phi(x) is piecewise linear in x, so the sup sits at a knot
        # (or at the domain bound); beyond the top slope it is infinite
        if y < 0:
            raise ValidationError("conjugate argument must be nonnegative")
        if self.bound is None and y > self.slopes[-1]:
            return INF
        best = 0.0
        for x, v in zip(self._knots, self._values):
            best = max(best, x * y - v)
        if self.bound is not None:
            best = max(best, self.bound * y - self(self.bound))
        elif y == self.slopes[-1]:
            # the objective is constant past the last knot
            best = max(best, self._knots[-1] * y - self._values[-1])
        return best

    def conjugate_array(self, y: np.ndarray) -> np.ndarray:
        ys = np.atleast_1d(np.asarray(y, dtype=float))
        return np.array([self.conjugate(float(v)) for v in ys])


@dataclass(frozen=True)
class Scaled(OrliczFunction):
    """phi(x) = inner(theta * x) / one_plus_gamma.

    Houses the multiplicative weight and additive-penalty divisor of the
    penalised families; theta > 0 and one_plus_gamma >= 1.
    """

    inner: OrliczFunction
    theta: float
    one_plus_gamma: float = 1.0

    def __post_init__(self):
        if self.theta <= 0.0 or not math.isfinite(self.theta):
            raise ValidationError("theta must be finite and positive")
        if self.one_plus_gamma < 1.0:
            raise ValidationError("additive divisor must satisfy 1 + gamma >= 1")

    @property
    def domain_bound(self) -> float:
        return self.inner.domain_bound / self.theta

    def _eval_array(self, x: np.ndarray) -> np.ndarray:
        return self.inner._eval_array(self.theta * x) / self.one_plus_gamma

    def conjugate(self, y: float) -> float:
        # sup x*y - inner(theta x)/d  =  inner*(d*y/theta) / d
        if y < 0:
            raise ValidationError("conjugate argument must be nonnegative")
        d = self.one_plus_gamma
        return self.inner.conjugate(d * y / self.theta) / d

    def conjugate_array(self, y: np.ndarray) -> np.ndarray:
        d = self.one_plus_gamma
        ys = np.atleast_1d(np.asarray(y, dtype=float))
        return self.inner.conjugate_array(d * ys / self.theta) / d

    def right_derivative(self, x: float) -> float:
        d = self.inner.right_derivative(self.theta * x)
        return INF if d == INF else self.theta * d / self.one_plus_gamma


def validate_orlicz(phi: OrliczFunction) -> None:
    """Run the construction-time axioms; raises ValidationError."""
    if phi(0.0) != 0.0:
        raise ValidationError("phi(0) must be 0")
    phi._check_nontrivial()
