import math

import numpy as np
import pytest

from sflock.errors import DomainError, UnsupportedError
from sflock.params import CustomWeight, ModelParams, WeightKind
from sflock.weights import make_weight, weight_eval, weight_primitive


def params(kind=WeightKind.POWER_SINGULAR, alpha=1.0, delta=0.0, beta_cs=0.0, **kw):
    return ModelParams(
        n_agents=2, dim=1, alpha=alpha, delta=delta, beta_cs=beta_cs, weight_kind=kind, **kw
    )


class TestWeightEval:
    def test_power_identity_case(self):
        assert weight_eval(1.0, params(alpha=1.0)) == 1.0

    def test_power_forced_arithmetic(self):
        assert weight_eval(2.0, params(alpha=2.0)) == 0.25

    def test_shifted_boundary_raises(self):
        p = params(WeightKind.SHIFTED_SINGULAR, alpha=1.0, delta=0.5)
        with pytest.raises(DomainError):
            weight_eval(0.5, p)

    def test_power_zero_raises(self):
        with pytest.raises(DomainError):
            weight_eval(0.0, params(alpha=1.0))

    def test_regular_at_zero_allowed(self):
        assert weight_eval(0.0, params(WeightKind.REGULAR_CS, beta_cs=0.7)) == 1.0

    def test_regular_negative_raises(self):
        with pytest.raises(DomainError):
            weight_eval(-0.1, params(WeightKind.REGULAR_CS, beta_cs=0.7))

    def test_nonincreasing_on_domain(self):
        for p in (
            params(alpha=1.3),
            params(WeightKind.SHIFTED_SINGULAR, alpha=2.0, delta=0.2),
            params(WeightKind.REGULAR_CS, beta_cs=0.5),
        ):
            s = np.linspace(0.3, 50.0, 200)
            vals = [weight_eval(x, p) for x in s]
            assert all(b <= a for a, b in zip(vals, vals[1:]))
            assert all(v > 0 for v in vals)


class TestWeightPrimitive:
    def test_log_normalization(self):
        assert weight_primitive(1.0, params(alpha=1.0)) == 0.0

    def test_power_normalization(self):
        # s^(1-alpha) / (1-alpha) at s=2, alpha=2
        assert weight_primitive(2.0, params(alpha=2.0)) == -0.5

    def test_derivative_matches_weight(self):
        # central difference with h = 1e-6 against psi(0.1) = 10
        p = params(alpha=1.0)
        h = 1e-6
        fd = (weight_primitive(0.1 + h, p) - weight_primitive(0.1 - h, p)) / (2 * h)
        assert fd == pytest.approx(10.0, rel=1e-6)

    @pytest.mark.parametrize(
        "p",
        [
            params(alpha=2.5),
            params(WeightKind.SHIFTED_SINGULAR, alpha=1.0, delta=0.3),
            params(WeightKind.REGULAR_CS, beta_cs=1.0),
            params(WeightKind.REGULAR_CS, beta_cs=0.8),
        ],
    )
    def test_derivative_matches_weight_all_kinds(self, p):
        h = 1e-6
        for s in (0.5, 1.1, 3.7):
            fd = (weight_primitive(s + h, p) - weight_primitive(s - h, p)) / (2 * h)
            assert fd == pytest.approx(weight_eval(s, p), rel=1e-6)

    def test_monotone_increasing(self):
        for p in (params(alpha=1.0), params(alpha=2.0), params(WeightKind.REGULAR_CS, beta_cs=0.6)):
            s = np.linspace(0.2, 10.0, 50)
            vals = [weight_primitive(x, p) for x in s]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_regular_quadrature_fallback_matches_closed_form(self):
        # beta_cs = 1 has the arctangent closed form; quadrature must agree.
        closed = make_weight(params(WeightKind.REGULAR_CS, beta_cs=1.0))
        from sflock.weights import _regular_primitive

        quad = _regular_primitive(0.999999999)  # forces the quadrature branch
        for s in (0.5, 2.0, 7.0):
            assert quad(s) == pytest.approx(closed.primitive(s), rel=1e-7)

    def test_custom_without_primitive_raises(self):
        cw = CustomWeight(evaluate=lambda s: 1.0 / s)
        p = params(WeightKind.CUSTOM).__class__(
            n_agents=2, dim=1, weight_kind=WeightKind.CUSTOM, custom_weight=cw
        )
        with pytest.raises(UnsupportedError):
            weight_primitive(1.0, p)

    def test_custom_roundtrip(self):
        cw = CustomWeight(evaluate=lambda s: s**-2.0, primitive=lambda s: -1.0 / s)
        p = ModelParams(n_agents=2, dim=1, weight_kind=WeightKind.CUSTOM, custom_weight=cw)
        assert weight_eval(2.0, p) == 0.25
        assert weight_primitive(2.0, p) == -0.5
