"""The two-variable Bajraktarevic mean and its quasiarithmetic special case.

B_{f,g}(x, y) = (f/g)^{-1}( (f(x)+f(y)) / (g(x)+g(y)) ).  With g = 1 this
is the quasiarithmetic mean w^{-1}((w(x)+w(y))/2).
"""

from __future__ import annotations

from typing import Union

import numpy as np

from . import expr as ex
from .errors import RangeError
from .generator import Func1, GeneratorPair, OpenInterval, ratio_inverse

# The exact intermediate ratio always lies in the attained range
# (internality); clamping only absorbs float dust at x ~ y.
_CLAMP_EXPANSION = 1e-12


def _clamped_ratio(pair: GeneratorPair, x, y):
    fx = pair.f.value(x)
    fy = pair.f.value(y)
    gx = pair.g.value(x)
    gy = pair.g.value(y)
    t = (fx + fy) / (gx + gy)
    r_min, r_max = pair.ratio_range()
    slack = _CLAMP_EXPANSION * (1.0 + max(abs(r_min), abs(r_max)))
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < r_min - slack) or np.any(t_arr > r_max + slack):
        bad = t_arr[(t_arr < r_min - slack) | (t_arr > r_max + slack)]
        raise RangeError(
            f"intermediate ratio {float(np.atleast_1d(bad)[0])!r} escapes the attained "
            f"range [{r_min!r}, {r_max!r}]; pair is numerically degenerate")
    return np.clip(t, r_min, r_max) if isinstance(t, np.ndarray) else min(max(t, r_min), r_max)


def bajraktarevic(pair: GeneratorPair, x, y):
    """B_{f,g}(x, y) for x, y in the core subinterval (scalars or arrays).

    The result lies between x and y, strictly when x != y.
    """
    return ratio_inverse(pair, _clamped_ratio(pair, x, y))


def quasiarithmetic(w: Union[str, ex.ExprAst, Func1], domain: OpenInterval, x, y):
    """w^{-1}((w(x)+w(y))/2) for a strictly monotone w on the domain's core.

    Convenience wrapper: builds and validates the pair (w, 1) on each call;
    for inner loops build the pair once and use bajraktarevic.
    """
    w_fn = w if isinstance(w, Func1) else Func1.from_expression(w)
    pair = GeneratorPair.from_functions(w_fn, Func1.constant(1.0), domain)
    pair.require_valid()
    return bajraktarevic(pair, x, y)
