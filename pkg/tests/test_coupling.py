import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sflock.coupling import CouplingFunction, check_axioms, coupling_eval, make_coupling
from sflock.params import CouplingKind, ModelParams


def params(gamma=1.0, kind=CouplingKind.POWER_LAW):
    return ModelParams(n_agents=2, dim=2, gamma=gamma, coupling_kind=kind)


class TestCouplingEval:
    def test_identity_at_gamma_one(self):
        assert np.array_equal(coupling_eval([1.0, 0.0], params(1.0)), [1.0, 0.0])

    def test_zero_is_exact(self):
        out = coupling_eval([0.0, 0.0, 0.0], ModelParams(n_agents=2, dim=3, gamma=0.75))
        assert np.array_equal(out, np.zeros(3))

    def test_three_four_vector(self):
        # direct evaluation cross-checked against a high-precision oracle
        import mpmath as mp

        mp.mp.dps = 50
        scale = mp.mpf(5) ** mp.mpf("-0.5")
        expected = np.array([float(3 * scale), float(4 * scale)])
        got = coupling_eval([3.0, 4.0], params(0.75))
        assert np.all(np.abs(got - expected) <= 2 * np.spacing(np.abs(expected)))

    def test_linear_kind_equals_gamma_one_power(self):
        v = np.array([0.3, -2.0])
        lin = coupling_eval(v, params(1.0, CouplingKind.LINEAR))
        pow_ = coupling_eval(v, params(1.0))
        assert np.array_equal(lin, pow_)

    @given(
        st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=4),
        st.floats(0.55, 1.5),
    )
    @settings(max_examples=200, deadline=None)
    def test_oddness_property(self, vec, gamma):
        v = np.array(vec)
        p = ModelParams(n_agents=2, dim=len(vec), gamma=gamma)
        gv = coupling_eval(v, p)
        gnv = coupling_eval(-v, p)
        scale = np.abs(gv).max()
        assert np.all(np.abs(gv + gnv) <= 1e-12 * max(scale, 1e-300))

    def test_inner_product_identity_within_ulps(self):
        # <Gamma(v), v> equals |v|^(2 gamma) for the power family.
        rng = np.random.default_rng(5)
        for gamma in (0.6, 0.9, 1.0, 1.3):
            p = ModelParams(n_agents=2, dim=3, gamma=gamma)
            for _ in range(50):
                v = rng.standard_normal(3) * 10.0 ** rng.integers(-6, 4)
                lhs = float(coupling_eval(v, p) @ v)
                rhs = float(v @ v) ** gamma
                assert abs(lhs - rhs) <= 4 * np.spacing(rhs)


class TestCheckAxioms:
    def test_power_gamma_one_passes(self):
        rep = check_axioms(make_coupling(params(1.0)), 1.0, 1.0, n_samples=2000)
        assert rep.passed and rep.a1_pass and rep.a2_pass

    def test_power_gamma_08_passes(self):
        rep = check_axioms(make_coupling(params(0.8)), 0.8, 1.0, n_samples=2000)
        assert rep.passed
        assert rep.min_coercivity_margin >= -1e-12

    def test_shifted_coupling_fails_oddness(self):
        bad = CouplingFunction(
            CouplingKind.CUSTOM, 1.0, lambda v: np.asarray(v) + 0.5
        )
        rep = check_axioms(bad, 1.0, 1.0, n_samples=200)
        assert not rep.a1_pass

    def test_weak_coupling_fails_coercivity(self):
        weak = CouplingFunction(CouplingKind.CUSTOM, 1.0, lambda v: 0.5 * np.asarray(v))
        rep = check_axioms(weak, 1.0, 1.0, n_samples=200)
        assert rep.a1_pass and not rep.a2_pass

    def test_sample_count_validation(self):
        with pytest.raises(ValueError):
            check_axioms(make_coupling(params(1.0)), 1.0, 1.0, n_samples=0)
