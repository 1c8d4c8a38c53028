import pytest

import bajlab.decide as decide_mod
from bajlab import (DecisionConfig, OpenInterval, bajraktarevic,
                    build_family_pair, classify_equality, means_equal_on_grid,
                    verify_assertions)
from bajlab.analysis import ConstantFit, EquivalenceWitness
from bajlab.expr import add, mul, num, parse
from bajlab.generator import Func1, GeneratorPair, validate_pair

from conftest import make_pair


def test_grid_equality_moebius_pair():
    a = make_pair("x", "1", 0, 10)
    b = make_pair("2*x + 3", "x + 2", 0, 10)
    verdict = means_equal_on_grid(a, b, 21)
    assert verdict.equal
    assert verdict.max_deviation <= 1e-10


def test_grid_equality_trig_hyperbolic(sin_cos, sinh_cosh):
    verdict = means_equal_on_grid(sin_cos, sinh_cosh, 21)
    assert verdict.equal
    assert verdict.max_deviation <= 1e-9


def test_grid_inequality_lehmer():
    a = make_pair("x", "1", 0.5, 4)
    b = make_pair("x^2", "x", 0.5, 4)
    verdict = means_equal_on_grid(a, b, 21)
    assert not verdict.equal
    assert verdict.max_deviation >= 0.16
    # the canonical witness point: arithmetic 1.5 vs contraharmonic 5/3
    dev = abs(float(bajraktarevic(a, 1.0, 2.0)) - float(bajraktarevic(b, 1.0, 2.0)))
    assert dev >= 0.16


def test_classify_equivalent_moebius():
    a = make_pair("x", "1", 0, 10)
    b = make_pair("2*x + 3", "x + 2", 0, 10)
    cls = classify_equality(a, b)
    assert cls.tag == "EquivalentGenerators"
    w = cls.witness
    assert w.ok
    assert (w.a, w.b, w.c, w.d) == pytest.approx((2.0, 3.0, 1.0, 2.0), abs=1e-9)
    # overlap: this pair also satisfies the quasiarithmetic mechanism, and
    # the evidence map records it even though equivalence wins the tag
    assert cls.evidence["vi"]["passed"]
    assert cls.evidence["iii"]["passed"]
    assert cls.evidence["iii"]["form_b"].ok
    assert (cls.evidence["iii"]["form_b"].a,
            cls.evidence["iii"]["form_b"].b,
            cls.evidence["iii"]["form_b"].c) == pytest.approx((1.0, -4.0, 4.0), abs=1e-7)


def test_classify_common_quasiarithmetic(sin_cos, sinh_cosh):
    cls = classify_equality(sin_cos, sinh_cosh)
    assert cls.tag == "CommonQuasiarithmetic"
    assert not cls.witness.ok
    assert cls.witness.residual >= 1e-2
    assert cls.gamma.ok and cls.gamma.value == pytest.approx(1.0, abs=1e-7)
    assert cls.alpha.value == pytest.approx(1.0, abs=1e-7)
    assert cls.beta.value == pytest.approx(-1.0, abs=1e-7)
    assert cls.w_table is not None
    for key in ("ii", "iii", "iv", "v", "vi", "vii"):
        assert cls.evidence[key]["passed"], key
    assert cls.delta == pytest.approx(0.0, abs=1e-9)


def test_classify_not_equal():
    a = make_pair("x", "1", 0.5, 4)
    b = make_pair("x^2", "x", 0.5, 4)
    cls = classify_equality(a, b)
    assert cls.tag == "NotEqual"
    assert cls.evidence == {}
    assert cls.witness is None and cls.gamma is None and cls.w_table is None


def test_classify_overlap_prefers_equivalence():
    a = make_pair("x", "1", 0, 10)
    b = make_pair("3*x + 1", "1", 0, 10)
    cls = classify_equality(a, b)
    assert cls.tag == "EquivalentGenerators"
    assert cls.evidence["vi"]["passed"]  # both are the arithmetic mean


def test_classify_symmetry_inverts_gamma(sin_cos):
    scaled = make_pair("2*sinh(x)", "2*cosh(x)", -1.3, 1.3)
    forward = classify_equality(sin_cos, scaled)
    backward = classify_equality(scaled, sin_cos)
    assert forward.tag == backward.tag == "CommonQuasiarithmetic"
    assert forward.gamma.value == pytest.approx(4.0, abs=1e-7)
    assert backward.gamma.value == pytest.approx(1.0 / 4.0, abs=1e-7)


def test_classify_soundness_on_random_mixes(sin_cos, rng):
    f_ast = parse("sin(x)")
    g_ast = parse("cos(x)")
    found = 0
    while found < 20:
        a, b, c, d = rng.uniform(-2, 2, 4)
        if abs(a * d - b * c) <= 0.1:
            continue
        mixed = GeneratorPair.from_functions(
            Func1.from_expression(add(mul(num(a), f_ast), mul(num(b), g_ast))),
            Func1.from_expression(add(mul(num(c), f_ast), mul(num(d), g_ast))),
            sin_cos.domain)
        if not validate_pair(mixed).ok:
            continue
        found += 1
        cls = classify_equality(sin_cos, mixed)
        assert cls.tag == "EquivalentGenerators"


def test_family_completeness():
    domains = {"x": (-0.82, 0.82), "x + 0.2*x^3": (-0.75, 0.75), "atan(x)": (-0.95, 0.95)}
    for w, (lo, hi) in domains.items():
        pairs = {alpha: build_family_pair(alpha, w, OpenInterval(lo, hi))
                 for alpha in (-2.0, 0.0, 1.0)}
        for alpha, beta in ((-2.0, 0.0), (0.0, 1.0), (-2.0, 1.0)):
            cls = classify_equality(pairs[alpha], pairs[beta])
            assert cls.tag == "CommonQuasiarithmetic", (alpha, beta, w)


def test_verify_assertions_identical_pairs(sin_cos):
    evidence = verify_assertions(sin_cos, sin_cos)
    for key, entry in evidence.items():
        assert entry["passed"], key
    gamma = evidence["ii"]["gamma"]
    assert gamma.value == pytest.approx(1.0, abs=1e-12)


def test_inconclusive_branch(monkeypatch, sin_cos, sinh_cosh):
    # force both mechanism probes to fail while the means agree on the grid:
    # the pipeline must refuse to pick a mechanism
    failing_witness = EquivalenceWitness(0, 0, 0, 0, 1.0, 0.0, False, 257, 1e-7)
    failing_fit = ConstantFit(1.0, 1.0, False, 257, 1e-7)
    monkeypatch.setattr(decide_mod, "fit_equivalence", lambda *a, **k: failing_witness)
    monkeypatch.setattr(decide_mod, "fit_gamma", lambda *a, **k: failing_fit)
    cls = classify_equality(sin_cos, sinh_cosh)
    assert cls.tag == "Inconclusive"
    assert cls.verdict.equal


def test_decision_config_validation():
    with pytest.raises(ValueError):
        DecisionConfig(grid=4)
    with pytest.raises(ValueError):
        DecisionConfig(samples=7)
