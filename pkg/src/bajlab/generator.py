"""Generator pairs (f, g) and the hypotheses that make B_{f,g} a strict mean.

A pair is usable when g > 0 and the Wronskian f'g - fg' keeps one sign on
the domain (equivalently the ratio f/g is strictly monotone).  Checks are
sampling-based on Chebyshev nodes of the epsilon-shrunk "core" subinterval;
they are a numerical screen, not a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import expr as ex
from .errors import ValidationError
from .numerics import chebyshev_nodes, invert_monotone

# All sampling, fitting and inversion stay this (relative) margin away from
# the open domain's endpoints, where generators may blow up.
CORE_MARGIN = 1e-3

# g and |W| must clear this on the core subinterval or the pair is rejected
# as numerically degenerate.
VALIDATION_FLOOR = 1e-9

DEFAULT_SAMPLES = 257

INVERSION_X_TOL = 1e-13


@dataclass(frozen=True)
class OpenInterval:
    """Bounded open interval (lo, hi)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def core(self) -> tuple[float, float]:
        """Closed core subinterval [lo + m, hi - m], m = CORE_MARGIN * width."""
        m = CORE_MARGIN * self.width
        return self.lo + m, self.hi - m

    def core_midpoint(self) -> float:
        a, b = self.core()
        return 0.5 * (a + b)


class Func1:
    """A one-variable function exposing value and second-order dual evaluation.

    Wraps either an expression tree (fast value path + dual path) or a pair
    of black-box callables (used for composed functions that have no closed
    form, e.g. anything built on a numerical inverse).
    """

    __slots__ = ("_value", "_dual", "source", "ast")

    def __init__(self, dual_fn: Callable, value_fn: Callable | None = None,
                 source: str | None = None, ast: ex.ExprAst | None = None):
        self._dual = dual_fn
        self._value = value_fn if value_fn is not None else (lambda x: dual_fn(x).v0)
        self.source = source
        self.ast = ast

    @classmethod
    def from_expression(cls, source_or_ast: Union[str, ex.ExprAst]) -> "Func1":
        ast = ex.parse(source_or_ast) if isinstance(source_or_ast, str) else source_or_ast
        return cls(
            dual_fn=lambda x, _a=ast: ex.eval_dual(_a, x),
            value_fn=lambda x, _a=ast: ex.eval_value(_a, x),
            source=ex.to_source(ast),
            ast=ast,
        )

    @classmethod
    def constant(cls, value: float) -> "Func1":
        return cls.from_expression(ex.num(value))

    def value(self, x):
        return self._value(x)

    def dual(self, x) -> ex.DualValue:
        return self._dual(x)

    def __repr__(self):
        return f"Func1({self.source or '<callable>'})"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    min_g: float
    min_abs_wronskian: float
    wronskian_sign: int  # +1 / -1; 0 when the sign is mixed (never with ok=True)
    samples_used: int


@dataclass(frozen=True)
class GeneratorPair:
    """Functions (f, g) on an open domain; g > 0 and f/g strictly monotone.

    Immutable; construct via from_expressions / from_functions and check
    with validate_pair (or require_valid) before feeding it to the mean,
    fit, or classification operations.
    """

    f: Func1
    g: Func1
    domain: OpenInterval
    label: str = field(default="", compare=False)

    @classmethod
    def from_expressions(cls, f, g, domain: OpenInterval, label: str = "") -> "GeneratorPair":
        return cls(Func1.from_expression(f), Func1.from_expression(g), domain, label)

    @classmethod
    def from_functions(cls, f: Func1, g: Func1, domain: OpenInterval, label: str = "") -> "GeneratorPair":
        return cls(f, g, domain, label)

    def ratio_value(self, x):
        return self.f.value(x) / self.g.value(x)

    def ratio_dual(self, x) -> ex.DualValue:
        return self.f.dual(x) / self.g.dual(x)

    def wronskian_values(self, x, order: int = 0):
        """f'g - fg' (order 0) or f''g' - f'g'' (order 1), vectorized."""
        fd = self.f.dual(x)
        gd = self.g.dual(x)
        if order == 0:
            return fd.v1 * gd.v0 - fd.v0 * gd.v1
        if order == 1:
            return fd.v2 * gd.v1 - fd.v1 * gd.v2
        raise ValueError("order must be 0 or 1")

    def ratio_range(self) -> tuple[float, float]:
        """Attained range of f/g over the closed core subinterval."""
        a, b = self.domain.core()
        ra = float(np.asarray(self.ratio_value(np.array([a])))[0])
        rb = float(np.asarray(self.ratio_value(np.array([b])))[0])
        return (ra, rb) if ra <= rb else (rb, ra)

    def require_valid(self, n_samples: int = DEFAULT_SAMPLES) -> ValidationReport:
        report = validate_pair(self, n_samples)
        if not report.ok:
            raise ValidationError(
                f"generator pair {self.describe()} failed validation: "
                f"min g = {report.min_g:.3g}, min |W| = {report.min_abs_wronskian:.3g}, "
                f"Wronskian sign = {report.wronskian_sign:+d}",
                report,
            )
        return report

    def describe(self) -> str:
        if self.label:
            return self.label
        f = self.f.source or "<f>"
        g = self.g.source or "<g>"
        return f"({f}, {g}) on ({self.domain.lo}, {self.domain.hi})"


def validate_pair(pair: GeneratorPair, n_samples: int = DEFAULT_SAMPLES) -> ValidationReport:
    """Samples g and the Wronskian at Chebyshev nodes of the core subinterval.

    ok requires min g and min |W| above VALIDATION_FLOOR and a single
    Wronskian sign across all nodes.  A sign change between nodes counts as
    failure; no attempt is made at rigorous global verification.
    """
    if n_samples < 8:
        raise ValueError("n_samples must be at least 8")
    a, b = pair.domain.core()
    xs = chebyshev_nodes(a, b, n_samples)
    g = np.asarray(pair.g.value(xs), dtype=float)
    g = g + np.zeros_like(xs)
    w = np.asarray(pair.wronskian_values(xs), dtype=float) + np.zeros_like(xs)
    min_g = float(np.min(g))
    min_abs_w = float(np.min(np.abs(w)))
    if np.all(w > VALIDATION_FLOOR):
        sign = 1
    elif np.all(w < -VALIDATION_FLOOR):
        sign = -1
    else:
        sign = 0
    ok = (min_g > VALIDATION_FLOOR) and (min_abs_w > VALIDATION_FLOOR) and sign != 0
    return ValidationReport(ok, min_g, min_abs_w, sign, n_samples)


def ratio_inverse(pair: GeneratorPair, t, x_tol: float = INVERSION_X_TOL):
    """Solves (f/g)(x) = t on the core subinterval.

    Bisection on the monotone ratio bracketed by the core endpoints, then a
    capped Newton polish using the dual-number derivative.  `t` may be a
    scalar or an array.  Raises RangeError when t is not attained.
    """
    a, b = pair.domain.core()

    def dual_ratio(x):
        d = pair.ratio_dual(x)
        return d.v0, d.v1

    return invert_monotone(pair.ratio_value, dual_ratio, a, b, t, x_tol)
