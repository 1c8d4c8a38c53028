import numpy as np
import pytest

from bajlab import (OpenInterval, check_cubic_ratio,
                    fit_equivalence, fit_gamma, fit_quadratic_form,
                    fit_ratio_quadratic, product_identity_residual, wronskian)
from bajlab.numerics import chebyshev_nodes

from conftest import make_pair


def test_wronskian_sin_cos_is_one(sin_cos, rng):
    xs = rng.uniform(-1.2, 1.2, 20)
    assert np.max(np.abs(wronskian(sin_cos, xs) - 1.0)) <= 1e-14


def test_wronskian_order_one_linear_pair(identity_pair):
    assert wronskian(identity_pair, 0.4, order=1) == 0.0


def test_wronskian_order_one_hyperbolic(sinh_cosh, rng):
    # f''g' - f'g'' = sinh^2 - cosh^2 = -1
    xs = rng.uniform(-1.2, 1.2, 20)
    assert np.max(np.abs(wronskian(sinh_cosh, xs, order=1) + 1.0)) <= 1e-13


def test_fit_gamma_unit(sin_cos):
    base = make_pair("x", "1", -1.3, 1.3)
    fit = fit_gamma(base, sin_cos)
    assert fit.ok
    assert fit.value == pytest.approx(1.0, abs=1e-12)


def test_fit_gamma_linear_scaling():
    base = make_pair("x", "1", 0, 10)
    scaled = make_pair("3*x + 1", "1", 0, 10)
    fit = fit_gamma(base, scaled)
    assert fit.ok
    assert fit.value == pytest.approx(3.0, abs=1e-12)


def test_fit_gamma_nonconstant_ratio_fails():
    base = make_pair("x", "1", 0.5, 4)
    other = make_pair("x^2", "x", 0.5, 4)
    fit = fit_gamma(base, other)
    assert not fit.ok
    assert fit.spread > 1.0  # the ratio runs through x^2 over (0.5, 4)


def test_cubic_ratio_values(sin_cos, sinh_cosh, identity_pair):
    assert check_cubic_ratio(sin_cos).value == pytest.approx(1.0, abs=1e-10)
    assert check_cubic_ratio(sinh_cosh).value == pytest.approx(-1.0, abs=1e-10)
    fit = check_cubic_ratio(identity_pair)
    assert fit.ok and fit.value == 0.0


def test_quadratic_form_trigonometric(sin_cos):
    fit = fit_quadratic_form(sin_cos)
    assert fit.ok
    assert (fit.a, fit.b, fit.c) == pytest.approx((1.0, 0.0, 1.0), abs=1e-9)


def test_quadratic_form_hyperbolic(sinh_cosh):
    fit = fit_quadratic_form(sinh_cosh)
    assert fit.ok
    assert (fit.a, fit.b, fit.c) == pytest.approx((-1.0, 0.0, 1.0), abs=1e-9)


def test_quadratic_form_degenerate_but_valid():
    # a x^2 + b x + c = 1 forces (0, 0, 1): a vanishing leading coefficient
    # is an admissible solution, not a failure
    pair = make_pair("x", "1", 0, 1)
    fit = fit_quadratic_form(pair)
    assert fit.ok
    assert (fit.a, fit.b, fit.c) == pytest.approx((0.0, 0.0, 1.0), abs=1e-9)


def test_quadratic_form_moebius_pair_solves_exactly():
    # ((2x+3) - 2(x+2))^2 = 1, so (1, -4, 4) is an exact witness
    pair = make_pair("2*x + 3", "x + 2", 0, 10)
    fit = fit_quadratic_form(pair)
    assert fit.ok
    assert (fit.a, fit.b, fit.c) == pytest.approx((1.0, -4.0, 4.0), abs=1e-7)


def test_quadratic_form_failure():
    pair = make_pair("x^2", "x", 0.5, 4)
    fit = fit_quadratic_form(pair)
    assert not fit.ok


def test_ratio_quadratic_trigonometric(sin_cos):
    fit = fit_ratio_quadratic(sin_cos)
    assert fit.ok and fit.positive
    assert (fit.c0, fit.c1, fit.c2) == pytest.approx((1.0, 0.0, 1.0), abs=1e-6)


def test_ratio_quadratic_constant(identity_pair):
    fit = fit_ratio_quadratic(identity_pair)
    assert fit.ok
    assert (fit.c0, fit.c1, fit.c2) == pytest.approx((1.0, 0.0, 0.0), abs=1e-9)


def test_ratio_quadratic_hyperbolic(sinh_cosh):
    fit = fit_ratio_quadratic(sinh_cosh)
    assert fit.ok
    assert (fit.c0, fit.c1, fit.c2) == pytest.approx((1.0, 0.0, -1.0), abs=1e-6)


def test_fit_equivalence_moebius():
    base = make_pair("x", "1", 0, 10)
    other = make_pair("2*x + 3", "x + 2", 0, 10)
    wit = fit_equivalence(base, other)
    assert wit.ok
    assert (wit.a, wit.b, wit.c, wit.d) == pytest.approx((2.0, 3.0, 1.0, 2.0), abs=1e-9)
    assert wit.residual <= 1e-12


def test_fit_equivalence_self(pair_pool):
    for pair in pair_pool:
        wit = fit_equivalence(pair, pair)
        assert wit.ok
        assert wit.residual <= 1e-12
        norm = np.hypot(wit.a, wit.b)
        assert (wit.a / norm, wit.b / norm) == pytest.approx((1.0, 0.0), abs=1e-10)
        norm = np.hypot(wit.c, wit.d)
        assert (wit.c / norm, wit.d / norm) == pytest.approx((0.0, 1.0), abs=1e-10)


def test_fit_equivalence_failure(sin_cos, sinh_cosh):
    wit = fit_equivalence(sin_cos, sinh_cosh)
    assert not wit.ok
    assert wit.residual >= 1e-2


def test_fit_equivalence_failure_cross_checked_by_interpolation(sin_cos, sinh_cosh):
    # independent oracle: force exact agreement at two nodes, then watch the
    # claimed linear relation break at two other nodes
    a, b = sin_cos.domain.core()
    xs = chebyshev_nodes(a, b, 9)[[1, 3, 5, 7]]
    f, g = np.sin(xs), np.cos(xs)
    h = np.sinh(xs)
    coef = np.linalg.solve(np.array([[f[0], g[0]], [f[1], g[1]]]), h[:2])
    mismatch = np.abs(coef[0] * f[2:] + coef[1] * g[2:] - h[2:]) / np.max(np.abs(h))
    assert np.min(mismatch) >= 1e-2


def test_product_identity_trivial_weight():
    pair = make_pair("x", "1", 0, 1)
    assert product_identity_residual("1", pair, 7) <= 1e-14


def test_product_identity_reduced_trig_pair():
    pair = make_pair("x/sqrt(1 + x^2)", "1/sqrt(1 + x^2)", -3, 3)
    residual = product_identity_residual("1/sqrt(1 + x^2)", pair, 15)
    assert residual <= 1e-9


def test_product_identity_detects_unequal_means():
    pair = make_pair("x^2", "x", 0.5, 4)
    assert product_identity_residual("1", pair, 15) > 1e-3


def test_product_identity_grid_precondition():
    pair = make_pair("x", "1", 0, 1)
    with pytest.raises(ValueError):
        product_identity_residual("1", pair, 4)


def test_fit_homogeneity_under_generator_scaling(sin_cos, sinh_cosh):
    lam = 2.5
    scaled = make_pair(f"{lam}*sin(x)", f"{lam}*cos(x)", -1.3, 1.3)
    assert fit_gamma(scaled, sinh_cosh).ok == fit_gamma(sin_cos, sinh_cosh).ok
    assert fit_ratio_quadratic(scaled).ok == fit_ratio_quadratic(sin_cos).ok
    base_wit = fit_equivalence(sin_cos, sinh_cosh)
    scaled_wit = fit_equivalence(scaled, sinh_cosh)
    assert scaled_wit.ok == base_wit.ok
    ok_wit = fit_equivalence(scaled, sin_cos)
    assert ok_wit.ok
    assert ok_wit.det_normalized >= 1e-6


def test_gamma_consistency_with_quadratic_forms(sin_cos, sinh_cosh):
    # whenever both forms reach 1 and the Wronskian ratio is constant, the
    # proportionality holds pointwise at every node
    fit = fit_gamma(sin_cos, sinh_cosh)
    assert fit_quadratic_form(sin_cos).ok and fit_quadratic_form(sinh_cosh).ok and fit.ok
    a, b = sin_cos.domain.core()
    xs = chebyshev_nodes(a, b, 257)
    wa = np.asarray(wronskian(sin_cos, xs))
    wb = np.asarray(wronskian(sinh_cosh, xs))
    assert np.max(np.abs(wb - fit.value * wa) / np.abs(wb)) <= 1e-8


def test_family_cubic_ratio_matches_negated_parameter():
    from bajlab import build_family_pair
    domains = {"x": (-0.9, 0.9), "x + 0.2*x^3": (-0.85, 0.85), "atan(x)": (-1.0, 1.0)}
    for alpha in (-2.0, -1.0, 0.0, 0.5, 1.0):
        for w, (lo, hi) in domains.items():
            pair = build_family_pair(alpha, w, OpenInterval(lo, hi))
            fit = check_cubic_ratio(pair)
            assert fit.ok, (alpha, w)
            assert fit.value == pytest.approx(-alpha, abs=1e-7), (alpha, w)
