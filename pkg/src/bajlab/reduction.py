"""Change of variables turning the equality of two Bajraktarevic means into
the equality of a mean and a weighted arithmetic mean, plus the formula
recovering the weight from mean values alone.

With r = h/k and u = r(x), the transported functions

    p = k o r^{-1},  q(u) = p(u) * u,  phi = f o r^{-1},  psi = g o r^{-1}

live on J = r(I), and B_{f,g} = B_{h,k} on I^2 exactly when
B_{q,p} = B_{phi,psi} on J^2.  The composed functions have no closed form;
they are black-box evaluables built on the numerical inverse of r, with
derivatives supplied by the chain rule and the inverse-function rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NearDegenerateError
from .expr import DualValue
from .generator import DEFAULT_SAMPLES, Func1, GeneratorPair, OpenInterval, ratio_inverse
from .mean import bajraktarevic
from .numerics import chebyshev_nodes

_DENOMINATOR_FLOOR = 1e-12


@dataclass(frozen=True)
class ReducedProblem:
    """The transported equality problem on J = (h/k)(core of I)."""

    J: OpenInterval
    p: Func1
    q: Func1
    phi: Func1
    psi: Func1
    pair_qp: GeneratorPair
    pair_phipsi: GeneratorPair
    pullback: Callable[[np.ndarray], np.ndarray]  # u -> x with (h/k)(x) = u


def _inverse_dual(pairHK: GeneratorPair, u) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """x = r^{-1}(u) plus x'(u), x''(u) from the inverse-function rule."""
    u = np.asarray(u, dtype=float)
    x = ratio_inverse(pairHK, u)
    x = np.asarray(x, dtype=float)
    r = pairHK.ratio_dual(x)
    x1 = 1.0 / r.v1
    x2 = -r.v2 * x1 * x1 * x1
    return x, x1, x2


def _compose(outer: Func1, pairHK: GeneratorPair, label: str) -> Func1:
    def dual(u):
        x, x1, x2 = _inverse_dual(pairHK, u)
        o = outer.dual(x)
        return DualValue(o.v0, o.v1 * x1, o.v2 * x1 * x1 + o.v1 * x2)

    def value(u):
        return outer.value(np.asarray(ratio_inverse(pairHK, u), dtype=float))

    return Func1(dual, value, source=label)


def reduce_problem(pairFG: GeneratorPair, pairHK: GeneratorPair,
                   n_samples: int = DEFAULT_SAMPLES) -> ReducedProblem:
    """Builds and validates the transported pairs (q, p) and (phi, psi).

    J's endpoints are the (monotone) images of the core endpoints of I
    under h/k; all sampling on J then stays inside J's own core margin.
    Validation failure of a composed pair signals a hypothesis violation in
    the inputs.
    """
    a, b = pairHK.domain.core()
    ra = float(np.asarray(pairHK.ratio_value(np.array([a])))[0])
    rb = float(np.asarray(pairHK.ratio_value(np.array([b])))[0])
    J = OpenInterval(min(ra, rb), max(ra, rb))

    p = _compose(pairHK.g, pairHK, "p")
    phi = _compose(pairFG.f, pairHK, "phi")
    psi = _compose(pairFG.g, pairHK, "psi")

    def q_dual(u):
        u = np.asarray(u, dtype=float)
        seed = DualValue(u, np.ones_like(u), np.zeros_like(u))
        return seed * p.dual(u)

    q = Func1(q_dual, lambda u: np.asarray(u, dtype=float) * p.value(u), source="q")

    pair_qp = GeneratorPair.from_functions(q, p, J, label="(q, p) on J")
    pair_phipsi = GeneratorPair.from_functions(phi, psi, J, label="(phi, psi) on J")
    pair_qp.require_valid(n_samples)
    pair_phipsi.require_valid(n_samples)

    def pullback(u):
        return np.asarray(ratio_inverse(pairHK, u), dtype=float)

    return ReducedProblem(J, p, q, phi, psi, pair_qp, pair_phipsi, pullback)


def substitution_residual(pairFG: GeneratorPair, pairHK: GeneratorPair,
                          reduced: ReducedProblem, grid: int = 15) -> tuple[float, float]:
    """Checks the substitution chain on a grid x grid Chebyshev set of J^2.

    Returns (residual_qp, residual_phipsi) where

        residual_qp     = max |B_{q,p}(u,v)     - (h/k)(B_{h,k}(x,y))|
        residual_phipsi = max |B_{phi,psi}(u,v) - (h/k)(B_{f,g}(x,y))|

    with x, y the pullbacks of u, v.  Both hold identically (independently
    of whether the two means are equal).
    """
    a, b = reduced.J.core()
    nodes = chebyshev_nodes(a, b, grid)
    U, V = np.meshgrid(nodes, nodes, indexing="ij")
    u = U.ravel()
    v = V.ravel()
    x = reduced.pullback(u)
    y = reduced.pullback(v)

    lhs_qp = np.asarray(bajraktarevic(reduced.pair_qp, u, v))
    rhs_qp = np.asarray(pairHK.ratio_value(np.asarray(bajraktarevic(pairHK, x, y))))
    lhs_ps = np.asarray(bajraktarevic(reduced.pair_phipsi, u, v))
    rhs_ps = np.asarray(pairHK.ratio_value(np.asarray(bajraktarevic(pairFG, x, y))))
    return (float(np.max(np.abs(lhs_qp - rhs_qp))),
            float(np.max(np.abs(lhs_ps - rhs_ps))))


def recover_weight(mean_oracle: Callable[[float, float], float],
                   v0: float, p_v0: float, u: float) -> float:
    """Weight value p(u) from mean values, normalized so p(v0) = p_v0.

    Uses p(u) = p(v0) * (v0 - M(u, v0)) / (M(u, v0) - u), valid because a
    strict mean keeps M(u, v0) != u for u != v0.
    """
    if u == v0:
        raise ValueError("u must differ from the base point v0")
    m = float(mean_oracle(u, v0))
    denominator = m - u
    if abs(denominator) < _DENOMINATOR_FLOOR:
        raise NearDegenerateError(
            f"mean({u!r}, {v0!r}) = {m!r} is too close to u; "
            "probe further from the base point")
    return p_v0 * (v0 - m) / denominator
