"""Discrete scenario models: atoms, prior families, quasi-sure structure.

A ScenarioModel is a finite sample space together with finitely many
probability priors. The polar set collects atoms that are null under
every prior; random variables are canonicalised by zeroing them there,
so that quasi-sure equality becomes entrywise equality of canonical
representatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

PROB_SUM_TOL = 1e-12
PROB_RENORM_TOL = 1e-9


@dataclass(frozen=True)
class MeasureVector:
    """Signed mass vector over the atoms of a model."""

    masses: np.ndarray

    def __init__(self, masses):
        object.__setattr__(self, "masses", np.asarray(masses, dtype=float))

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.masses)))

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def abs(self) -> "MeasureVector":
        return MeasureVector(np.abs(self.masses))

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.masses >= 0))

    def absolutely_continuous_wrt(self, other: np.ndarray) -> bool:
        other = np.asarray(other, dtype=float)
        return bool(np.all(self.masses[other == 0.0] == 0.0))


@dataclass(frozen=True)
class ScenarioModel:
    atoms: tuple
    priors: tuple
    prior_labels: tuple

    def __init__(self, atoms: Sequence[str], priors: Iterable, prior_labels=None):
        atoms = tuple(str(a) for a in atoms)
        mats = []
        for p in priors:
            v = np.asarray(p, dtype=float)
            if v.shape != (len(atoms),):
                raise ValidationError("prior length does not match atom count")
            if np.any(v < 0):
                raise ValidationError("prior has negative mass")
            s = float(v.sum())
            if abs(s - 1.0) > PROB_RENORM_TOL:
                raise ValidationError(f"prior mass {s!r} deviates from 1 beyond tolerance")
            if abs(s - 1.0) > PROB_SUM_TOL:
                v = v / s
            v.setflags(write=False)
            mats.append(v)
        if not mats:
            raise ValidationError("a model needs at least one prior")
        if prior_labels is None:
            prior_labels = tuple(f"P{i + 1}" for i in range(len(mats)))
        else:
            prior_labels = tuple(str(l) for l in prior_labels)
            if len(prior_labels) != len(mats) or len(set(prior_labels)) != len(mats):
                raise ValidationError("prior labels must be unique and match the prior count")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "priors", tuple(mats))
        object.__setattr__(self, "prior_labels", prior_labels)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_priors(self) -> int:
        return len(self.priors)

    def prior(self, label: str) -> np.ndarray:
        try:
            return self.priors[self.prior_labels.index(label)]
        except ValueError:
            raise ValidationError(f"unknown prior label {label!r}") from None

    @property
    def support_mask(self) -> np.ndarray:
        """Boolean mask of atoms charged by at least one prior."""
        return np.max(np.stack(self.priors), axis=0) > 0.0

    def polar_set(self) -> frozenset:
        """Atoms null under every prior."""
        mask = ~self.support_mask
        return frozenset(a for a, m in zip(self.atoms, mask) if m)


@dataclass(frozen=True)
class RandomVariable:
    values: np.ndarray
    canonical: bool = False

    def __init__(self, values, canonical: bool = False):
        v = np.asarray(values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "canonical", canonical)

    def __abs__(self) -> "RandomVariable":
        return RandomVariable(np.abs(self.values), canonical=self.canonical)


def canonicalise(model: ScenarioModel, x) -> RandomVariable:
    """Zero a random variable on the polar set; idempotent."""
    v = x.values if isinstance(x, RandomVariable) else np.asarray(x, dtype=float)
    if v.shape != (model.n_atoms,):
        raise ValidationError("random variable length does not match atom count")
    return RandomVariable(np.where(model.support_mask, v, 0.0), canonical=True)


def qs_order(model: ScenarioModel, x, y) -> str:
    """Compare two random variables in the quasi-sure order.

    Returns one of 'le', 'ge', 'eq', 'incomparable'; only entries on the
    quasi-sure support matter.
    """
    xc = canonicalise(model, x).values
    yc = canonicalise(model, y).values
    le = bool(np.all(xc <= yc))
    ge = bool(np.all(xc >= yc))
    if le and ge:
        return "eq"
    if le:
        return "le"
    if ge:
        return "ge"
    return "incomparable"


def qs_min(model: ScenarioModel, x, y) -> RandomVariable:
    xc = canonicalise(model, x).values
    yc = canonicalise(model, y).values
    return RandomVariable(np.minimum(xc, yc), canonical=True)


def qs_max(model: ScenarioModel, x, y) -> RandomVariable:
    xc = canonicalise(model, x).values
    yc = canonicalise(model, y).values
    return RandomVariable(np.maximum(xc, yc), canonical=True)


def expectation(weights, g) -> float:
    """Sum of weights * g with the convention 0 * inf = 0.

    `weights` must be nonnegative (signed integration lives in the duality
    module); returns inf as soon as a positive-mass entry hits g = inf.
    """
    w = weights.masses if isinstance(weights, MeasureVector) else np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValidationError("expectation requires a nonnegative measure")
    gv = np.asarray(g, dtype=float)
    pos = w > 0.0
    if np.any(np.isinf(gv[pos])):
        return math.inf
    return float(np.dot(w[pos], gv[pos]))
