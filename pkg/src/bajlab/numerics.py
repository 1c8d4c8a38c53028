"""Shared numerical kernels: node sets, monotone inversion, quadrature, tiny
least-squares solves.

Everything here is deterministic: fixed node orderings, fixed iteration
schedules, no randomness.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import QuadratureError, RangeError


def chebyshev_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    """n Chebyshev(-Lobatto) nodes on [lo, hi], ascending, endpoints included."""
    if n < 2:
        raise ValueError("need at least 2 nodes")
    k = np.arange(n)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    nodes = mid - half * np.cos(np.pi * k / (n - 1))
    # the analytic endpoints are lo/hi exactly; rounding in mid/half must not
    # push the extreme nodes outside the closed interval
    nodes[0] = lo
    nodes[-1] = hi
    return nodes


def invert_monotone(
    value_fn: Callable[[np.ndarray], np.ndarray],
    dual_fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    lo: float,
    hi: float,
    target,
    x_tol: float = 1e-13,
):
    """Solves value_fn(x) = target for a strictly monotone value_fn on [lo, hi].

    Bisection brackets the root (guaranteed for continuous monotone input),
    then a capped Newton polish using `dual_fn` (value, derivative) restores
    fast local accuracy; stragglers fall back to pure bisection down to
    `x_tol`.  `target` may be a scalar or an array; the result has the same
    shape.  Raises RangeError when a target is outside [f(lo), f(hi)].
    """
    t = np.asarray(target, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)

    f_lo = float(np.asarray(value_fn(np.array([lo]))).reshape(-1)[0])
    f_hi = float(np.asarray(value_fn(np.array([hi]))).reshape(-1)[0])
    increasing = f_hi > f_lo
    t_min, t_max = (f_lo, f_hi) if increasing else (f_hi, f_lo)
    if np.any(t < t_min) or np.any(t > t_max):
        bad = t[(t < t_min) | (t > t_max)][0]
        raise RangeError(
            f"target {bad!r} outside attained range [{t_min!r}, {t_max!r}]")

    a = np.full_like(t, lo)
    b = np.full_like(t, hi)
    sign = 1.0 if increasing else -1.0

    # phase 1: bisect to a coarse bracket
    coarse = max(x_tol, 1e-6)
    while np.max(b - a) > coarse:
        m = 0.5 * (a + b)
        below = sign * (np.asarray(value_fn(m)) - t) < 0.0
        a = np.where(below, m, a)
        b = np.where(below, b, m)

    # phase 2: capped Newton polish; converged entries are frozen so a step
    # that lands exactly on the root is kept, not re-bisected
    x = 0.5 * (a + b)
    done = np.zeros(t.shape, dtype=bool)
    for _ in range(12):
        v, d = dual_fn(x)
        below = sign * (np.asarray(v) - t) < 0.0
        a = np.where(~done & below, x, a)
        b = np.where(~done & ~below, x, b)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = (np.asarray(v) - t) / np.asarray(d)
        x_new = x - step
        bad = ~np.isfinite(x_new) | (x_new < a) | (x_new > b)
        x_new = np.where(bad, 0.5 * (a + b), x_new)
        x_new = np.where(done, x, x_new)
        done = done | (np.abs(x_new - x) <= x_tol)
        x = x_new
        if np.all(done):
            break

    # phase 3: pure bisection for anything still wide
    active = ~done
    while np.any(active) and np.max(np.where(active, b - a, 0.0)) > x_tol:
        m = 0.5 * (a + b)
        below = sign * (np.asarray(value_fn(m)) - t) < 0.0
        a = np.where(active & below, m, a)
        b = np.where(active & ~below, m, b)
        x = np.where(active, 0.5 * (a + b), x)

    return float(x[0]) if scalar else x


def _simpson(fa, fm, fb, h):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive_step(f, a, fa, m, fm, b, fb, whole, eps, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    if abs(delta) <= 15.0 * eps or depth >= 40:
        if depth >= 40 and abs(delta) > 15.0 * eps:
            raise QuadratureError("adaptive Simpson recursion depth exceeded", (a, b))
        return left + right + delta / 15.0
    return (_adaptive_step(f, a, fa, lm, flm, m, fm, left, eps / 2.0, depth + 1)
            + _adaptive_step(f, m, fm, rm, frm, b, fb, right, eps / 2.0, depth + 1))


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, eps: float) -> float:
    """Adaptive Simpson quadrature of a scalar integrand to absolute tolerance eps."""
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(fa, fm, fb, b - a)
    return _adaptive_step(f, a, fa, m, fm, b, fb, whole, eps, 0)


def cumulative_integral(
    fvec: Callable[[np.ndarray], np.ndarray],
    xs: np.ndarray,
    eps: float,
) -> np.ndarray:
    """Integrals of f from xs[0] to every node of the ascending grid xs.

    Each segment gets a two-level Simpson estimate from one vectorized
    evaluation; segments whose Richardson error estimate exceeds their share
    of eps are re-done with scalar adaptive Simpson.
    """
    n = len(xs) - 1
    width = xs[-1] - xs[0]
    # 5 points per segment: endpoints, midpoint, quarter points
    pts = np.concatenate([
        xs,
        0.5 * (xs[:-1] + xs[1:]),
        0.75 * xs[:-1] + 0.25 * xs[1:],
        0.25 * xs[:-1] + 0.75 * xs[1:],
    ])
    vals = np.asarray(fvec(pts))
    f_nodes = vals[: n + 1]
    f_mid = vals[n + 1: 2 * n + 1]
    f_q1 = vals[2 * n + 1: 3 * n + 1]
    f_q3 = vals[3 * n + 1:]
    h = xs[1:] - xs[:-1]
    s1 = _simpson(f_nodes[:-1], f_mid, f_nodes[1:], h)
    s2 = (_simpson(f_nodes[:-1], f_q1, f_mid, 0.5 * h)
          + _simpson(f_mid, f_q3, f_nodes[1:], 0.5 * h))
    err = (s2 - s1) / 15.0
    seg = s2 + err
    budget = eps * h / width
    refine = np.abs(err) > budget
    for i in np.nonzero(refine)[0]:
        seg[i] = adaptive_simpson(
            lambda x: float(np.asarray(fvec(np.array([x]))).reshape(-1)[0]),
            float(xs[i]), float(xs[i + 1]), float(budget[i]))
    out = np.empty(n + 1)
    out[0] = 0.0
    np.cumsum(seg, out=out[1:])
    return out


def solve_normal_equations(columns: list[np.ndarray], rhs: np.ndarray):
    """Least squares via normal equations for 2 or 3 columns.

    Returns (coefficients, condition number of the normal matrix).  A
    singular system reports condition = inf and the minimum-norm solution.
    """
    A = np.column_stack(columns)
    ata = A.T @ A
    atb = A.T @ rhs
    cond = float(np.linalg.cond(ata))
    try:
        coef = np.linalg.solve(ata, atb)
    except np.linalg.LinAlgError:
        coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        cond = float("inf")
    return coef, cond
