import math

import numpy as np
import pytest

from bajlab import (GeneratorPair, OpenInterval, RangeError, ValidationError,
                    ratio_inverse, validate_pair)

from conftest import make_pair


def test_open_interval_invariants():
    with pytest.raises(ValueError):
        OpenInterval(1.0, 1.0)
    with pytest.raises(ValueError):
        OpenInterval(2.0, 1.0)
    with pytest.raises(ValueError):
        OpenInterval(0.0, math.inf)
    core_lo, core_hi = OpenInterval(0.0, 1.0).core()
    assert core_lo == pytest.approx(1e-3)
    assert core_hi == pytest.approx(1 - 1e-3)


def test_validate_linear_pair():
    pair = GeneratorPair.from_expressions("x", "1", OpenInterval(0, 1))
    report = validate_pair(pair, 32)
    assert report.ok
    assert report.wronskian_sign == 1
    assert report.min_abs_wronskian == pytest.approx(1.0)
    assert report.samples_used == 32


def test_validate_sin_cos_unit_wronskian():
    # Pythagorean identity makes the Wronskian identically 1
    pair = GeneratorPair.from_expressions("sin(x)", "cos(x)", OpenInterval(-1.5, 1.5))
    report = validate_pair(pair, 32)
    assert report.ok
    assert report.min_abs_wronskian == pytest.approx(1.0, abs=1e-12)
    assert report.wronskian_sign == 1


def test_validate_rejects_sign_changing_wronskian():
    pair = GeneratorPair.from_expressions("x^2", "1", OpenInterval(-1, 1))
    report = validate_pair(pair, 32)
    assert not report.ok
    assert report.wronskian_sign == 0
    with pytest.raises(ValidationError):
        pair.require_valid(32)


def test_validate_rejects_nonpositive_g():
    pair = GeneratorPair.from_expressions("1", "x", OpenInterval(-1, 1))
    report = validate_pair(pair, 32)
    assert not report.ok


def test_validate_requires_enough_samples():
    pair = GeneratorPair.from_expressions("x", "1", OpenInterval(0, 1))
    with pytest.raises(ValueError):
        validate_pair(pair, 7)


def test_ratio_inverse_arctangent():
    pair = make_pair("sin(x)", "cos(x)", -1.5, 1.5)
    assert ratio_inverse(pair, 1.0) == pytest.approx(math.pi / 4, abs=1e-12)


def test_ratio_inverse_identity():
    pair = make_pair("x", "1", 0, 10)
    assert ratio_inverse(pair, 3.7) == pytest.approx(3.7, abs=1e-13)


def test_ratio_inverse_out_of_range():
    pair = make_pair("x^2", "x", 0.5, 4)
    with pytest.raises(RangeError):
        ratio_inverse(pair, 0.1)


def test_ratio_inverse_round_trip(pair_pool, rng):
    for pair in pair_pool:
        r_lo, r_hi = pair.ratio_range()
        ts = rng.uniform(r_lo, r_hi, 100)
        xs = ratio_inverse(pair, ts)
        back = np.asarray(pair.ratio_value(xs))
        assert np.max(np.abs(back - ts)) <= 1e-11


def test_ratio_inverse_monotone_in_target(pair_pool, rng):
    for pair in pair_pool:
        r_lo, r_hi = pair.ratio_range()
        ts = np.sort(rng.uniform(r_lo, r_hi, 50))
        xs = np.asarray(ratio_inverse(pair, ts))
        a, b = pair.domain.core()
        direction = np.sign(pair.ratio_value(np.array([b]))[0]
                            - pair.ratio_value(np.array([a]))[0])
        assert np.all(np.diff(direction * xs) >= 0)


def test_decreasing_ratio_supported():
    pair = make_pair("1/x", "1", 0.5, 3.0)
    x = ratio_inverse(pair, 1.0)
    assert x == pytest.approx(1.0, abs=1e-12)


def test_core_sampling_avoids_endpoint_blowup():
    # 1/(1-x) explodes at the right endpoint; the core margin keeps all
    # validation probes finite
    pair = GeneratorPair.from_expressions("1/(1 - x)", "1", OpenInterval(0, 1))
    report = validate_pair(pair)
    assert report.ok
