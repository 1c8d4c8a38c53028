"""The sine/identity/hyperbolic generator family and the canonical
quasiarithmetic generator obtained by integrating the Wronskian.

s_alpha and c_alpha solve Y'' = alpha * Y with s(0)=0, s'(0)=1, c(0)=1,
c'(0)=0 and satisfy c^2 - alpha * s^2 = 1; composing them with a strictly
monotone inner function produces the generator pairs whose means coincide
with a quasiarithmetic mean without the pairs being equivalent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from . import expr as ex
from .errors import ValidationError
from .expr import DualValue
from .generator import DEFAULT_SAMPLES, Func1, GeneratorPair, OpenInterval
from .numerics import chebyshev_nodes, cumulative_integral, invert_monotone

# Below this, sqrt(|alpha|) cancellation makes the closed forms lose digits;
# three series terms are exact to ~1e-27 there.
_SERIES_THRESHOLD = 1e-8

QUADRATURE_TOL = 1e-10
W_TABLE_NODES = 513

# Margin keeping cos(sqrt(-alpha) w) positive for alpha < 0.
_NEGATIVE_ALPHA_WINDOW = math.pi / 2.0 - 1e-6


def s_alpha(alpha: float, t):
    """Odd solution of Y'' = alpha Y: sin/identity/sinh scaled to s'(0) = 1."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if alpha == 0.0:
        out = t.copy()
    else:
        r = math.sqrt(abs(alpha))
        closed = np.sin(r * t) / r if alpha < 0 else np.sinh(r * t) / r
        series = t * (1.0 + alpha * t * t / 6.0 * (1.0 + alpha * t * t / 20.0))
        out = np.where(abs(alpha) * t * t < _SERIES_THRESHOLD, series, closed)
    return float(out[0]) if scalar else out


def c_alpha(alpha: float, t):
    """Even solution of Y'' = alpha Y: cos/one/cosh (branches are continuous)."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if alpha == 0.0:
        out = np.ones_like(t)
    else:
        r = math.sqrt(abs(alpha))
        out = np.cos(r * t) if alpha < 0 else np.cosh(r * t)
    return float(out[0]) if scalar else out


def s_alpha_dual(alpha: float, t: DualValue) -> DualValue:
    # s' = c, s'' = alpha s
    s0 = s_alpha(alpha, t.v0)
    c0 = c_alpha(alpha, t.v0)
    return t.chain(s0, c0, alpha * s0)


def c_alpha_dual(alpha: float, t: DualValue) -> DualValue:
    # c' = alpha s, c'' = alpha c
    s0 = s_alpha(alpha, t.v0)
    c0 = c_alpha(alpha, t.v0)
    return t.chain(c0, alpha * s0, alpha * c0)


def _compose_family_asts(alpha: float, w_ast: ex.ExprAst) -> tuple[ex.ExprAst, ex.ExprAst]:
    if alpha == 0.0:
        return w_ast, ex.num(1.0)
    r = math.sqrt(abs(alpha))
    arg = w_ast if r == 1.0 else ex.mul(ex.num(r), w_ast)
    odd, even = ("sin", "cos") if alpha < 0 else ("sinh", "cosh")
    f = ex.call(odd, arg)
    if r != 1.0:
        f = ex.div(f, ex.num(r))
    return f, ex.call(even, arg)


def build_family_pair(alpha: float, w: Union[str, ex.ExprAst],
                      domain: OpenInterval,
                      n_samples: int = DEFAULT_SAMPLES) -> GeneratorPair:
    """Validated pair (s_alpha o w, c_alpha o w) for a strictly monotone w.

    For alpha < 0 the range of sqrt(-alpha)*w must stay inside
    (-pi/2, pi/2) so the cosine factor keeps positive; wider inner ranges
    are rejected up front.
    """
    w_ast = ex.parse(w) if isinstance(w, str) else w
    inner = GeneratorPair.from_expressions(w_ast, ex.num(1.0), domain)
    inner.require_valid(n_samples)
    if alpha < 0:
        a, b = domain.core()
        xs = chebyshev_nodes(a, b, n_samples)
        reach = math.sqrt(-alpha) * float(np.max(np.abs(np.asarray(inner.f.value(xs)))))
        if reach >= _NEGATIVE_ALPHA_WINDOW:
            raise ValidationError(
                f"inner function range too wide for alpha={alpha}: "
                f"sqrt(-alpha)*|w| reaches {reach:.6g}, needs < {_NEGATIVE_ALPHA_WINDOW:.6g}")
    f_ast, g_ast = _compose_family_asts(alpha, w_ast)
    pair = GeneratorPair.from_expressions(f_ast, g_ast, domain)
    pair.require_valid(n_samples)
    return pair


def family_pair_from_dual_fn(alpha: float, w_dual: Callable[[np.ndarray], DualValue],
                             domain: OpenInterval, label: str = "",
                             n_samples: int = DEFAULT_SAMPLES) -> GeneratorPair:
    """Family pair over a black-box inner function given by dual evaluation
    (used when w exists only as a table, e.g. an integrated Wronskian)."""
    f = Func1(lambda x: s_alpha_dual(alpha, w_dual(x)), source=label and f"s[{alpha:g}]({label})")
    g = Func1(lambda x: c_alpha_dual(alpha, w_dual(x)), source=label and f"c[{alpha:g}]({label})")
    pair = GeneratorPair.from_functions(f, g, domain)
    pair.require_valid(n_samples)
    return pair


@dataclass(frozen=True)
class SampledFunction:
    """Strictly monotone function known at nodes, with a monotone piecewise
    cubic interpolant.  Slopes, when supplied, come from exact derivative
    data (Fritsch-Carlson limited so monotonicity survives); otherwise the
    interpolant is a pchip."""

    xs: np.ndarray
    values: np.ndarray
    domain: OpenInterval
    interpolant: object
    derivative: object
    dual_fn: Callable[[np.ndarray], DualValue] | None = None

    @classmethod
    def from_table(cls, xs: np.ndarray, values: np.ndarray, domain: OpenInterval,
                   slopes: np.ndarray | None = None,
                   dual_fn: Callable[[np.ndarray], DualValue] | None = None) -> "SampledFunction":
        xs = np.asarray(xs, dtype=float)
        values = np.asarray(values, dtype=float)
        diffs = np.diff(xs)
        if np.any(diffs <= 0):
            raise ValueError("nodes must be strictly increasing")
        if slopes is not None:
            interp = CubicHermiteSpline(xs, values, _limit_slopes(xs, values, slopes))
        else:
            interp = PchipInterpolator(xs, values)
        return cls(xs, values, domain, interp, interp.derivative(), dual_fn)

    def value(self, x):
        return self.interpolant(x)

    def dual(self, x) -> DualValue:
        if self.dual_fn is not None:
            return self.dual_fn(np.asarray(x, dtype=float))
        d2 = self.interpolant.derivative(2)
        x = np.asarray(x, dtype=float)
        return DualValue(self.interpolant(x), self.derivative(x), d2(x))

    def inverse(self, t):
        """Solves value(x) = t by bracketed bisection plus Newton polish."""
        return invert_monotone(
            lambda x: self.interpolant(x),
            lambda x: (self.interpolant(x), self.derivative(x)),
            float(self.xs[0]), float(self.xs[-1]), t)

    def mean(self, x, y):
        """Quasiarithmetic mean generated by this function."""
        wx = np.asarray(self.interpolant(x), dtype=float)
        wy = np.asarray(self.interpolant(y), dtype=float)
        avg = 0.5 * (wx + wy)
        avg = np.clip(avg, np.minimum(wx, wy), np.maximum(wx, wy))
        return self.inverse(avg if avg.ndim else float(avg))


def _limit_slopes(xs, values, slopes):
    # Fritsch-Carlson cap: |slope| <= 3 |secant| on both adjacent segments.
    secants = np.diff(values) / np.diff(xs)
    limited = np.asarray(slopes, dtype=float).copy()
    cap = 3.0 * np.minimum(np.abs(np.concatenate([secants[:1], secants])),
                           np.abs(np.concatenate([secants, secants[-1:]])))
    return np.clip(limited, -cap, cap)


def canonical_w(pair: GeneratorPair, table_nodes: int = W_TABLE_NODES) -> SampledFunction:
    """The antiderivative of the Wronskian, pinned to 0 at the core midpoint.

    Tabulated on a uniform grid of the core subinterval by adaptive Simpson
    quadrature (absolute tolerance 1e-10) and interpolated with a monotone
    piecewise cubic whose slopes are the exactly-known Wronskian values.
    Strict monotonicity is inherited from the Wronskian's constant sign.
    """
    a, b = pair.domain.core()
    xs = np.linspace(a, b, table_nodes)

    def w_values(x):
        return np.asarray(pair.wronskian_values(x), dtype=float) + np.zeros_like(np.asarray(x, dtype=float))

    cumulative = cumulative_integral(w_values, xs, QUADRATURE_TOL)
    mid = (table_nodes - 1) // 2
    values = cumulative - cumulative[mid]
    slopes = w_values(xs)
    interp = CubicHermiteSpline(xs, values, _limit_slopes(xs, values, slopes))

    def dual_fn(x):
        x = np.asarray(x, dtype=float)
        fd = pair.f.dual(x)
        gd = pair.g.dual(x)
        w1 = fd.v1 * gd.v0 - fd.v0 * gd.v1          # derivative of the table
        w2 = fd.v2 * gd.v0 - fd.v0 * gd.v2          # its derivative in turn
        return DualValue(np.asarray(interp(x), dtype=float), w1, w2)

    return SampledFunction(xs, values, pair.domain, interp, interp.derivative(), dual_fn)
