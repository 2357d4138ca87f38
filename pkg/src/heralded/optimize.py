"""Closed-form optima for the cat and squeezed-cat targets, and a small pattern-search maximizer."""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .phase_space import wigner_negativity
from .scheme import SchemeParams, herald_probability
from .targets import fidelity_cat_closed, fidelity_scat_closed

_E2 = math.e ** 2
_E4 = math.e ** 4
_ROOT73 = math.sqrt(73)
_ROOT_SCAT = math.sqrt(36 + _E4)

CAT_THRESHOLD = math.atanh(8 / (3 + _ROOT73))
SCAT_THRESHOLD = math.atanh((2 * _E4 - 3) / (3 + 3 * _E4 + _E2 * _ROOT_SCAT))


class BelowThreshold(ValueError):
    pass


def _coth(r):
    return 1 / math.tanh(r)


def optimal_t_cat(r):
    if r < CAT_THRESHOLD:
        raise BelowThreshold(f"r = {r} is below the cat threshold {CAT_THRESHOLD:.10f}")
    return min(1.0, math.sqrt((_ROOT73 - 3) * _coth(r) + 8) / 4)


def optimal_t_scat(r):
    if r < SCAT_THRESHOLD:
        raise BelowThreshold(f"r = {r} is below the squeezed-cat threshold {SCAT_THRESHOLD:.10f}")
    num = (_E2 * _ROOT_SCAT - 3 * (1 + _E4)) * _coth(r) + 4 * _E4 - 3
    return math.sqrt(max(0.0, num / (8 * _E4 - 6)))


def cat_probability_closed(r):
    """P(1, r, t~(r), pi)."""
    return (
        4 * math.sqrt(2) * (32 * math.tanh(r) ** 2 + 3 * _ROOT73 - 41)
        / ((3 * _ROOT73 - 9) ** 1.5 * math.cosh(r) ** 2)
    )


# P(1, r, tau(r), pi) = (A cosh^2 r - B) / (C cosh^4 r)
_W = _E4 * _E2 - 13 * _E2 + _ROOT_SCAT * (_E4 + 1)
_SCAT_A = 6 * _E2 * (4 * _E4 - 3) * _W
_SCAT_B = (4 * _E4 - 3) ** 3
_SCAT_C = 6 * math.sqrt(6) * math.e ** 3 * _W ** 1.5


def scat_probability_closed(r):
    u = math.cosh(r) ** 2
    return (_SCAT_A * u - _SCAT_B) / (_SCAT_C * u * u)


def best_probability_cat():
    r = math.acosh(8 / math.sqrt(3 * _ROOT73 - 9))
    return r, cat_probability_closed(r)


def best_probability_scat():
    # d/du (A u - B)/(C u^2) = 0  ->  u = 2B/A
    r = math.acosh(math.sqrt(2 * _SCAT_B / _SCAT_A))
    return r, scat_probability_closed(r)


AXES = ("r", "t", "phi")


@dataclass(frozen=True)
class Optimum:
    params: dict
    value: float
    evaluations: int


class ObjectiveError(RuntimeError):
    def __init__(self, params, cause):
        super().__init__(f"objective failed at {params}: {cause}")
        self.params = params


def _objective(name, n, tol):
    if callable(name):
        return name
    if name == "fidelity_cat":
        return lambda r, t, phi: fidelity_cat_closed(r, t, phi)
    if name == "fidelity_scat":
        return lambda r, t, phi: fidelity_scat_closed(r, t, phi)
    if name == "probability":
        return lambda r, t, phi: herald_probability(SchemeParams(r, phi, t, n))
    if name == "negativity":
        return lambda r, t, phi: wigner_negativity(SchemeParams(r, phi, t, n), tol)
    raise ValueError(f"unknown objective {name!r}")


def maximize(objective, fixed, bounds, grid_points=9, step_tol=1e-6, n=1, tol=1e-5):
    """Coarse grid scan followed by compass search with a halving step.

    ``fixed`` maps some of r, t, phi to values; ``bounds`` maps the remaining
    ones to (low, high). ``objective`` is a name or a callable f(r, t, phi);
    ``n`` and ``tol`` feed the probability and negativity objectives.
    """
    free = [a for a in AXES if a in bounds]
    if set(free) & set(fixed) or set(free) | set(fixed) != set(AXES):
        raise ValueError("every one of r, t, phi must be either fixed or bounded, not both")
    lo = np.array([bounds[a][0] for a in free], dtype=float)
    hi = np.array([bounds[a][1] for a in free], dtype=float)
    if np.any(lo > hi):
        raise ValueError("bounds must satisfy low <= high")
    func = _objective(objective, n, tol)
    cache = {}

    def evaluate(point):
        key = tuple(float(v) for v in point)
        if key not in cache:
            params = dict(fixed, **dict(zip(free, key)))
            try:
                cache[key] = float(func(params["r"], params["t"], params["phi"]))
            except Exception as exc:
                raise ObjectiveError(params, exc) from exc
        return cache[key]

    def as_params(point):
        return dict(fixed, **{a: float(v) for a, v in zip(free, point)})

    if not free:
        return Optimum(as_params(()), evaluate(()), len(cache))

    axes = [np.linspace(l, h, grid_points) if h > l else np.array([l]) for l, h in zip(lo, hi)]
    best = max((np.array(pt) for pt in itertools.product(*axes)), key=evaluate)
    best_val = evaluate(best)

    step = (hi - lo) / max(grid_points - 1, 1)
    while np.any(step >= step_tol):
        moved = False
        for i, sign in itertools.product(range(len(free)), (1, -1)):
            if step[i] < step_tol:
                continue
            trial = best.copy()
            trial[i] = min(hi[i], max(lo[i], trial[i] + sign * step[i]))
            if trial[i] == best[i]:
                continue
            val = evaluate(trial)
            if val > best_val:
                best, best_val, moved = trial, val, True
        if not moved:
            step = step / 2
    return Optimum(as_params(best), best_val, len(cache))
