"""Wronskians and the algebraic relations behind mean-equality verdicts.

Every fit samples the same Chebyshev node set on the core subinterval and
applies the same tolerances, so cross-checks between fitted quantities are
meaningful.  "Failure" of a fit is a regular outcome (ok=False), not an
exception: two means can be equal without any particular relation holding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .generator import DEFAULT_SAMPLES, Func1, GeneratorPair
from .numerics import chebyshev_nodes, solve_normal_equations

FIT_TOLERANCE = 1e-7            # relative, shared by all least-squares fits
CONSTANCY_TOLERANCE = 1e-7      # spread allowance is this * (1 + |median|)
DETERMINANT_FLOOR = 1e-6        # after normalizing each equation's coefficients
CONDITION_REPORT = 1e8          # normal-equation condition worth flagging


@dataclass(frozen=True)
class ConstantFit:
    """A pointwise ratio that is supposed to be constant across the nodes."""

    value: float    # median of the pointwise ratios (outlier-resistant)
    spread: float   # max - min of the pointwise ratios
    ok: bool
    nodes: int
    tolerance: float


@dataclass(frozen=True)
class EquivalenceWitness:
    """Constants with h = a f + b g, k = c f + d g and ad - bc != 0."""

    a: float
    b: float
    c: float
    d: float
    residual: float          # max relative deviation over samples
    det_normalized: float    # |ad - bc| after unit-normalizing (a,b) and (c,d)
    ok: bool
    nodes: int
    tolerance: float


@dataclass(frozen=True)
class QuadraticFormFit:
    """Coefficients with a f^2 + b fg + c g^2 = 1 on the samples."""

    a: float
    b: float
    c: float
    residual: float
    ok: bool
    condition: float
    hint: str | None
    nodes: int
    tolerance: float


@dataclass(frozen=True)
class Quadratic:
    """P(t) = c0 + c1 t + c2 t^2, fitted over the attained ratio values."""

    c0: float
    c1: float
    c2: float
    residual: float
    positive: bool
    ok: bool
    condition: float
    nodes: int
    tolerance: float

    def __call__(self, t):
        return self.c0 + t * (self.c1 + t * self.c2)


def _fit_nodes(pair: GeneratorPair, n_samples: int) -> np.ndarray:
    a, b = pair.domain.core()
    return chebyshev_nodes(a, b, n_samples)


def wronskian(pair: GeneratorPair, x, order: int = 0):
    """f'g - fg' (order 0) or f''g' - f'g'' (order 1) at x, via dual numbers."""
    return pair.wronskian_values(x, order)


def _constant_fit(ratios: np.ndarray, n_samples: int, base_tol: float) -> ConstantFit:
    value = float(np.median(ratios))
    spread = float(np.max(ratios) - np.min(ratios))
    tol = base_tol * (1.0 + abs(value))
    return ConstantFit(value, spread, spread <= tol, n_samples, tol)


def fit_gamma(pairA: GeneratorPair, pairB: GeneratorPair,
              n_samples: int = DEFAULT_SAMPLES,
              tolerance: float = CONSTANCY_TOLERANCE) -> ConstantFit:
    """Tests W_B / W_A for constancy; the constant is the gamma of the
    proportionality between the two Wronskians."""
    xs = _fit_nodes(pairA, n_samples)
    wa = np.asarray(pairA.wronskian_values(xs), dtype=float) + np.zeros_like(xs)
    wb = np.asarray(pairB.wronskian_values(xs), dtype=float) + np.zeros_like(xs)
    return _constant_fit(wb / wa, n_samples, tolerance)


def check_cubic_ratio(pair: GeneratorPair, n_samples: int = DEFAULT_SAMPLES,
                      tolerance: float = CONSTANCY_TOLERANCE) -> ConstantFit:
    """Tests W_{f',g'} / W_{f,g}^3 for constancy."""
    xs = _fit_nodes(pair, n_samples)
    w0 = np.asarray(pair.wronskian_values(xs, 0), dtype=float) + np.zeros_like(xs)
    w1 = np.asarray(pair.wronskian_values(xs, 1), dtype=float) + np.zeros_like(xs)
    return _constant_fit(w1 / w0 ** 3, n_samples, tolerance)


def fit_quadratic_form(pair: GeneratorPair, n_samples: int = DEFAULT_SAMPLES,
                       tolerance: float = FIT_TOLERANCE) -> QuadraticFormFit:
    """Least-squares solve of a f^2 + b fg + c g^2 = 1 over the nodes.

    The right side is fixed at exactly 1 (no pre-rescaling of the pair).  If
    the fit fails but some combination is nearly a nonunit constant, a hint
    reports the rescaling that would repair it.
    """
    if n_samples < 8:
        raise ValueError("n_samples must be at least 8")
    xs = _fit_nodes(pair, n_samples)
    f = np.asarray(pair.f.value(xs), dtype=float) + np.zeros_like(xs)
    g = np.asarray(pair.g.value(xs), dtype=float) + np.zeros_like(xs)
    cols = [f * f, f * g, g * g]
    coef, cond = solve_normal_equations(cols, np.ones_like(xs))
    combo = cols[0] * coef[0] + cols[1] * coef[1] + cols[2] * coef[2]
    residual = float(np.max(np.abs(combo - 1.0)))
    ok = bool(residual <= tolerance and np.isfinite(cond))
    hint = None
    if not ok:
        hint = _rescale_hint(cols, tolerance)
        if cond > CONDITION_REPORT:
            note = f"normal equations ill-conditioned (cond={cond:.3g})"
            hint = f"{hint}; {note}" if hint else note
    return QuadraticFormFit(float(coef[0]), float(coef[1]), float(coef[2]),
                            residual, ok, cond, hint, n_samples, tolerance)


def _rescale_hint(cols: list[np.ndarray], tolerance: float) -> str | None:
    # Is some combination a (nonunit) constant?  Smallest-eigenvector of the
    # centered Gram matrix finds the flattest direction.
    M = np.column_stack(cols)
    centered = M - M.mean(axis=0)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    v = vt[-1]
    combo = M @ v
    mean = float(np.mean(combo))
    if abs(mean) > 1e-9 and float(np.max(np.abs(combo - mean))) <= tolerance * (1.0 + abs(mean)):
        scale = 1.0 / np.sqrt(abs(mean))
        return (f"combination equals the constant {mean:.6g} rather than 1; "
                f"rescaling both generators by {scale:.6g} would normalize it")
    return None


def fit_ratio_quadratic(pair: GeneratorPair, n_samples: int = DEFAULT_SAMPLES,
                        tolerance: float = FIT_TOLERANCE) -> Quadratic:
    """Fits the quadratic P with P(f/g) = 1/g^2, i.e. g = (1/sqrt(P)) o (f/g).

    Succeeds when the max relative residual stays within tolerance and P is
    positive at every node.
    """
    xs = _fit_nodes(pair, n_samples)
    f = np.asarray(pair.f.value(xs), dtype=float) + np.zeros_like(xs)
    g = np.asarray(pair.g.value(xs), dtype=float) + np.zeros_like(xs)
    t = f / g
    target = 1.0 / (g * g)
    coef, cond = solve_normal_equations([np.ones_like(t), t, t * t], target)
    fitted = coef[0] + t * (coef[1] + t * coef[2])
    residual = float(np.max(np.abs(fitted - target) / np.abs(target)))
    positive = bool(np.all(fitted > 0.0))
    ok = bool(residual <= tolerance and positive and np.isfinite(cond))
    return Quadratic(float(coef[0]), float(coef[1]), float(coef[2]),
                     residual, positive, ok, cond, n_samples, tolerance)


def fit_equivalence(pairA: GeneratorPair, pairB: GeneratorPair,
                    n_samples: int = DEFAULT_SAMPLES,
                    tolerance: float = FIT_TOLERANCE) -> EquivalenceWitness:
    """Searches for constants with h = a f + b g and k = c f + d g.

    Two independent 2-unknown least-squares solves; success needs both max
    relative residuals within tolerance and a normalized determinant above
    DETERMINANT_FLOOR.
    """
    if n_samples < 8:
        raise ValueError("n_samples must be at least 8")
    xs = _fit_nodes(pairA, n_samples)
    f = np.asarray(pairA.f.value(xs), dtype=float) + np.zeros_like(xs)
    g = np.asarray(pairA.g.value(xs), dtype=float) + np.zeros_like(xs)
    h = np.asarray(pairB.f.value(xs), dtype=float) + np.zeros_like(xs)
    k = np.asarray(pairB.g.value(xs), dtype=float) + np.zeros_like(xs)

    def solve_one(target):
        coef, _ = solve_normal_equations([f, g], target)
        fitted = coef[0] * f + coef[1] * g
        scale = float(np.max(np.abs(target)))
        res = float(np.max(np.abs(fitted - target))) / (scale if scale > 0 else 1.0)
        return coef, res

    (a, b), res_h = solve_one(h)
    (c, d), res_k = solve_one(k)
    residual = max(res_h, res_k)
    n_ab = float(np.hypot(a, b))
    n_cd = float(np.hypot(c, d))
    det_norm = float(abs(a * d - b * c) / (n_ab * n_cd)) if n_ab > 0 and n_cd > 0 else 0.0
    ok = bool(residual <= tolerance and det_norm >= DETERMINANT_FLOOR)
    return EquivalenceWitness(float(a), float(b), float(c), float(d),
                              residual, det_norm, ok, n_samples, tolerance)


def product_identity_residual(weight_p: ex.ExprAst | str | Func1,
                              pair_phipsi: GeneratorPair,
                              grid: int = 15) -> float:
    """Residual of the cross-differentiated equality between the weighted
    arithmetic mean with weight p and the mean of (phi, psi).

    Both sides are the product of a bracket in (phi, psi) derivatives and a
    bracket in p; they must agree at every (u, v).  Returns the maximum
    absolute difference over a grid x grid Chebyshev set, normalized by the
    largest side magnitude seen.
    """
    if grid < 5:
        raise ValueError("grid must be at least 5")
    p = weight_p if isinstance(weight_p, Func1) else Func1.from_expression(weight_p)
    a, b = pair_phipsi.domain.core()
    nodes = chebyshev_nodes(a, b, grid)
    U, V = np.meshgrid(nodes, nodes, indexing="ij")
    u = U.ravel()
    v = V.ravel()

    phi_u = pair_phipsi.f.dual(u)
    phi_v = pair_phipsi.f.dual(v)
    psi_u = pair_phipsi.g.dual(u)
    psi_v = pair_phipsi.g.dual(v)
    p_u = p.dual(u)
    p_v = p.dual(v)

    psi_sum = psi_u.v0 + psi_v.v0
    phi_sum = phi_u.v0 + phi_v.v0
    p_sum = p_u.v0 + p_v.v0
    left = ((phi_u.v1 * psi_sum - phi_sum * psi_u.v1)
            * (p_v.v1 * p_u.v0 * (v - u) + p_v.v0 * p_sum))
    right = ((phi_v.v1 * psi_sum - phi_sum * psi_v.v1)
             * (p_u.v1 * p_v.v0 * (u - v) + p_u.v0 * p_sum))
    magnitude = max(float(np.max(np.abs(left))), float(np.max(np.abs(right))))
    if magnitude == 0.0:
        return float(np.max(np.abs(left - right)))
    return float(np.max(np.abs(left - right))) / magnitude
