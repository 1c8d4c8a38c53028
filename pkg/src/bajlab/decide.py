"""Equality engine: decide whether two generator pairs induce the same mean
and classify the mechanism.

Two distinct mechanisms can make B_{f,g} = B_{h,k}: the pairs are related
by an invertible linear mix of the generators, or both means coincide with
one quasiarithmetic mean whose generator is the integrated Wronskian.  The
pipeline tests grid equality first, then both mechanisms, and refuses to
upgrade sampled equality into certainty: if the means agree on the grid but
neither mechanism verifies, the verdict is Inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import (CONSTANCY_TOLERANCE, FIT_TOLERANCE, ConstantFit,
                       EquivalenceWitness, Quadratic, QuadraticFormFit,
                       check_cubic_ratio, fit_equivalence, fit_gamma,
                       fit_quadratic_form, fit_ratio_quadratic)
from .errors import BajlabError
from .families import SampledFunction, canonical_w, family_pair_from_dual_fn
from .generator import DEFAULT_SAMPLES, GeneratorPair
from .mean import bajraktarevic
from .numerics import chebyshev_nodes

EQUALITY_TOL_BASE = 1e-9  # scaled by (1 + domain width); inversion is 1e-13

NOT_EQUAL = "NotEqual"
EQUIVALENT = "EquivalentGenerators"
COMMON_QUASIARITHMETIC = "CommonQuasiarithmetic"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DecisionConfig:
    grid: int = 21
    samples: int = DEFAULT_SAMPLES
    equality_tol_base: float = EQUALITY_TOL_BASE  # scaled by (1 + width)
    fit_tolerance: float = FIT_TOLERANCE          # least-squares fits
    constancy_tolerance: float = CONSTANCY_TOLERANCE

    def __post_init__(self):
        if self.grid < 5:
            raise ValueError("grid must be at least 5")
        if self.samples < 8:
            raise ValueError("samples must be at least 8")
        if min(self.equality_tol_base, self.fit_tolerance, self.constancy_tolerance) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class EqualityVerdict:
    equal: bool
    max_deviation: float
    grid_size: int
    tolerance: float


@dataclass
class Classification:
    tag: str
    verdict: EqualityVerdict
    witness: EquivalenceWitness | None = None
    gamma: ConstantFit | None = None
    alpha: ConstantFit | None = None
    beta: ConstantFit | None = None
    quad_a: QuadraticFormFit | None = None
    quad_b: QuadraticFormFit | None = None
    poly_p: Quadratic | None = None
    poly_q: Quadratic | None = None
    delta: float | None = None
    w_table: SampledFunction | None = None
    evidence: dict = field(default_factory=dict)


def _grid_points(pair: GeneratorPair, grid: int):
    a, b = pair.domain.core()
    nodes = chebyshev_nodes(a, b, grid)
    X, Y = np.meshgrid(nodes, nodes, indexing="ij")
    return X.ravel(), Y.ravel()


def equality_tolerance(pair: GeneratorPair, base: float = EQUALITY_TOL_BASE) -> float:
    return base * (1.0 + pair.domain.width)


def means_equal_on_grid(pairA: GeneratorPair, pairB: GeneratorPair,
                        grid: int = 21,
                        tol_base: float = EQUALITY_TOL_BASE) -> EqualityVerdict:
    """Max pointwise deviation of the two means over a Chebyshev grid of the
    shared core subinterval."""
    if grid < 5:
        raise ValueError("grid must be at least 5")
    x, y = _grid_points(pairA, grid)
    ma = np.asarray(bajraktarevic(pairA, x, y))
    mb = np.asarray(bajraktarevic(pairB, x, y))
    deviation = float(np.max(np.abs(ma - mb)))
    tol = equality_tolerance(pairA, tol_base)
    return EqualityVerdict(deviation <= tol, deviation, grid, tol)


def verify_assertions(pairA: GeneratorPair, pairB: GeneratorPair,
                      config: DecisionConfig = DecisionConfig()) -> dict:
    """Per-assertion pass/fail map with residuals for the equality mechanism
    checks (keys "ii".."vii").

    Meant for pairs already known to have equal means; each entry is
    diagnostic and records whatever holds, whether or not the pairs are
    equivalent:

      ii   both Wronskian ratios W_{f',g'}/W^3 constant, and W_B/W_A constant
      iii  both quadratic forms reach 1, same Wronskian proportionality
      iv   ratio-domain quadratics P, Q positive with matching integrated
           reciprocals up to the fitted shift
      v    both pairs linearly reachable from the s/c family composed with
           the integrated Wronskian
      vi   both means equal the quasiarithmetic mean of the integrated
           Wronskian on the grid
      vii  existence form of vi (same witness generator)
    """
    evidence, _ = _assemble_evidence(pairA, pairB, config)
    return evidence


def _assemble_evidence(pairA: GeneratorPair, pairB: GeneratorPair,
                       config: DecisionConfig) -> tuple[dict, dict]:
    n = config.samples
    gamma = fit_gamma(pairA, pairB, n, config.constancy_tolerance)
    cubic_a = check_cubic_ratio(pairA, n, config.constancy_tolerance)
    cubic_b = check_cubic_ratio(pairB, n, config.constancy_tolerance)
    quad_a = fit_quadratic_form(pairA, n, config.fit_tolerance)
    quad_b = fit_quadratic_form(pairB, n, config.fit_tolerance)
    poly_p = fit_ratio_quadratic(pairA, n, config.fit_tolerance)
    poly_q = fit_ratio_quadratic(pairB, n, config.fit_tolerance)
    w = canonical_w(pairA)

    x, y = _grid_points(pairA, config.grid)
    m_w = np.asarray(w.mean(x, y))
    res_a = float(np.max(np.abs(np.asarray(bajraktarevic(pairA, x, y)) - m_w)))
    res_b = float(np.max(np.abs(np.asarray(bajraktarevic(pairB, x, y)) - m_w)))
    eq_tol = equality_tolerance(pairA, config.equality_tol_base)
    vi_passed = res_a <= eq_tol and res_b <= eq_tol

    delta, chain_residual, chain_tol, iv_chain_ok = _delta_chain(
        pairA, pairB, poly_p, poly_q, gamma, n, config.fit_tolerance)

    v_entry = _family_reconstruction(pairA, pairB, cubic_a, cubic_b, gamma, w, n,
                                     config.fit_tolerance)

    evidence = {
        "ii": {
            "passed": cubic_a.ok and cubic_b.ok and gamma.ok,
            "alpha": cubic_a,
            "beta": cubic_b,
            "gamma": gamma,
        },
        "iii": {
            "passed": quad_a.ok and quad_b.ok and gamma.ok,
            "form_a": quad_a,
            "form_b": quad_b,
            "gamma": gamma,
        },
        "iv": {
            "passed": poly_p.ok and poly_q.ok and gamma.ok and iv_chain_ok,
            "poly_p": poly_p,
            "poly_q": poly_q,
            "delta": delta,
            "chain_residual": chain_residual,
            "chain_tolerance": chain_tol,
        },
        "v": v_entry,
        "vi": {
            "passed": vi_passed,
            "residual_a": res_a,
            "residual_b": res_b,
            "tolerance": eq_tol,
        },
        "vii": {
            "passed": vi_passed,
            "residual": max(res_a, res_b),
            "note": "witnessed by the integrated-Wronskian generator",
        },
    }
    fits = {
        "gamma": gamma, "cubic_a": cubic_a, "cubic_b": cubic_b,
        "quad_a": quad_a, "quad_b": quad_b, "poly_p": poly_p, "poly_q": poly_q,
        "delta": delta, "w": w, "vi_passed": vi_passed,
    }
    return evidence, fits


def _cumulative_reciprocal(poly: Quadratic, ts: np.ndarray) -> np.ndarray:
    """Integral of 1/poly along the (monotone) node values ts, from ts' middle
    entry, by 5-point Gauss-Legendre on each segment."""
    gl_nodes = np.array([-0.9061798459386640, -0.5384693101056831, 0.0,
                         0.5384693101056831, 0.9061798459386640])
    gl_weights = np.array([0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891])
    lo = ts[:-1]
    h = ts[1:] - ts[:-1]
    pts = lo[:, None] + (gl_nodes[None, :] + 1.0) * 0.5 * h[:, None]
    seg = 0.5 * h * np.sum(gl_weights[None, :] / poly(pts), axis=1)
    out = np.concatenate([[0.0], np.cumsum(seg)])
    return out - out[(len(ts) - 1) // 2]


def _delta_chain(pairA, pairB, poly_p: Quadratic, poly_q: Quadratic,
                 gamma: ConstantFit, n: int, fit_tol: float):
    """Shift fit for (integral of 1/Q) o (h/k) = gamma (integral of 1/P) o (f/g) + delta.

    Both antiderivatives are pinned to vanish at the core midpoint, so when
    the chain holds the fitted shift is ~0.  Returns
    (delta, residual, tolerance, ok); (None, None, None, False) when the
    prerequisite fits failed.
    """
    if not (poly_p.ok and poly_q.ok and gamma.ok):
        return None, None, None, False
    a, b = pairA.domain.core()
    xs = chebyshev_nodes(a, b, n)
    tA = np.asarray(pairA.ratio_value(xs), dtype=float)
    tB = np.asarray(pairB.ratio_value(xs), dtype=float)
    FA = _cumulative_reciprocal(poly_p, tA)
    FB = _cumulative_reciprocal(poly_q, tB)
    resid = FB - gamma.value * FA
    delta = float(np.mean(resid))
    chain_residual = float(np.max(np.abs(resid - delta)))
    tol = fit_tol * (1.0 + float(np.max(np.abs(FB))))
    return delta, chain_residual, tol, chain_residual <= tol


def _family_reconstruction(pairA, pairB, cubic_a: ConstantFit, cubic_b: ConstantFit,
                           gamma: ConstantFit, w: SampledFunction, n: int,
                           fit_tol: float) -> dict:
    """Fits equivalence witnesses from each pair to the s/c family composed
    with the integrated Wronskian.

    Family parameters: the first pair's is -(its cubic Wronskian ratio); the
    second pair's Wronskian is gamma times the first's, which scales its
    cubic ratio by gamma^-2, so its parameter is -(gamma^2 * ratio).
    """
    entry = {
        "passed": False,
        "alpha_param": None,
        "beta_param": None,
        "witness_a": None,
        "witness_b": None,
        "note": None,
    }
    if not (cubic_a.ok and cubic_b.ok and gamma.ok):
        entry["note"] = "cubic Wronskian ratios or their proportionality not constant"
        return entry
    alpha_param = -cubic_a.value
    beta_param = -gamma.value ** 2 * cubic_b.value
    entry["alpha_param"] = alpha_param
    entry["beta_param"] = beta_param
    try:
        fam_a = family_pair_from_dual_fn(alpha_param, w.dual, pairA.domain,
                                         label="w", n_samples=n)
        fam_b = family_pair_from_dual_fn(beta_param, w.dual, pairA.domain,
                                         label="w", n_samples=n)
    except BajlabError as err:
        entry["note"] = f"family pair construction failed: {err}"
        return entry
    wit_a = fit_equivalence(pairA, fam_a, n, fit_tol)
    wit_b = fit_equivalence(pairB, fam_b, n, fit_tol)
    entry["witness_a"] = wit_a
    entry["witness_b"] = wit_b
    entry["passed"] = bool(wit_a.ok and wit_b.ok)
    return entry


def classify_equality(pairA: GeneratorPair, pairB: GeneratorPair,
                      config: DecisionConfig = DecisionConfig()) -> Classification:
    """Full pipeline: grid equality, then both mechanisms.

    Unequal on the grid -> NotEqual (nothing else attempted).  Otherwise an
    equivalence witness wins the tag when it exists; the quasiarithmetic
    mechanism is still probed silently so the evidence map records overlaps.
    Equal on the grid with both mechanisms failing -> Inconclusive; sampling
    never upgrades to a proof, and no mechanism is silently assumed.
    """
    verdict = means_equal_on_grid(pairA, pairB, config.grid, config.equality_tol_base)
    if not verdict.equal:
        return Classification(NOT_EQUAL, verdict)

    witness = fit_equivalence(pairA, pairB, config.samples, config.fit_tolerance)
    evidence, fits = _assemble_evidence(pairA, pairB, config)

    if witness.ok:
        tag = EQUIVALENT
    elif fits["gamma"].ok and fits["vi_passed"]:
        tag = COMMON_QUASIARITHMETIC
    else:
        tag = INCONCLUSIVE

    return Classification(
        tag=tag,
        verdict=verdict,
        witness=witness,
        gamma=fits["gamma"],
        alpha=fits["cubic_a"],
        beta=fits["cubic_b"],
        quad_a=fits["quad_a"],
        quad_b=fits["quad_b"],
        poly_p=fits["poly_p"],
        poly_q=fits["poly_q"],
        delta=fits["delta"],
        w_table=fits["w"],
        evidence=evidence,
    )
