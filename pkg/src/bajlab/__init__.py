"""Numerical laboratory for two-variable Bajraktarevic means."""

from .analysis import (ConstantFit, EquivalenceWitness, Quadratic,
                       QuadraticFormFit, check_cubic_ratio, fit_equivalence,
                       fit_gamma, fit_quadratic_form, fit_ratio_quadratic,
                       product_identity_residual, wronskian)
from .decide import (Classification, DecisionConfig, EqualityVerdict,
                     classify_equality, means_equal_on_grid, verify_assertions)
from .errors import (BajlabError, DomainError, ExprSyntaxError,
                     NearDegenerateError, QuadratureError, RangeError,
                     UnknownIdentifierError, ValidationError)
from .expr import DualValue, ExprAst, eval_dual, eval_value, parse, to_source
from .families import (SampledFunction, build_family_pair, c_alpha,
                       canonical_w, s_alpha)
from .generator import (Func1, GeneratorPair, OpenInterval, ValidationReport,
                        ratio_inverse, validate_pair)
from .mean import bajraktarevic, quasiarithmetic
from .reduction import (ReducedProblem, recover_weight, reduce_problem,
                        substitution_residual)

__all__ = [
    "BajlabError", "Classification", "ConstantFit", "DecisionConfig",
    "DomainError", "DualValue", "EqualityVerdict", "EquivalenceWitness",
    "ExprAst", "ExprSyntaxError", "Func1", "GeneratorPair",
    "NearDegenerateError", "OpenInterval", "Quadratic", "QuadraticFormFit",
    "QuadratureError", "RangeError", "ReducedProblem", "SampledFunction",
    "UnknownIdentifierError", "ValidationError", "ValidationReport",
    "bajraktarevic", "build_family_pair", "c_alpha", "canonical_w",
    "check_cubic_ratio", "classify_equality", "eval_dual", "eval_value",
    "fit_equivalence", "fit_gamma", "fit_quadratic_form",
    "fit_ratio_quadratic", "means_equal_on_grid", "parse",
    "product_identity_residual", "quasiarithmetic", "ratio_inverse",
    "recover_weight", "reduce_problem", "s_alpha", "substitution_residual",
    "to_source", "validate_pair", "verify_assertions", "wronskian",
]

__version__ = "0.1.0"
