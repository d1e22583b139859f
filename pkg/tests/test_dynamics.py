import math

import numpy as np
import pytest

from oracles import min_pair_brute, rhs_brute
from conftest import seeded_state

from sflock.dynamics import eval_dvel, min_pair_distance, rhs
from sflock.errors import ParameterError, SingularityError
from sflock.kernels import backend
from sflock.params import CouplingKind, CustomWeight, ModelParams, WeightKind
from sflock.state import ParticleState


def power_psi(alpha):
    return lambda s: math.pow(s, -alpha)


class TestRhs:
    def test_equal_velocities_give_zero(self):
        state = seeded_state(seed=1, n=5)
        vel = np.tile([0.3, -0.7], (5, 1))
        state = ParticleState(0.0, state.positions, vel)
        p = ModelParams(n_agents=5, dim=2, alpha=1.0, gamma=0.75)
        d = rhs(state, p)
        assert np.array_equal(d.d_velocities, np.zeros((5, 2)))
        assert np.array_equal(d.d_positions, vel)

    def test_two_body_hand_value(self):
        p = ModelParams(n_agents=2, dim=1, alpha=1.0, gamma=1.0)
        s = ParticleState(0.0, [[0.0], [1.0]], [[1.0], [-1.0]])
        d = rhs(s, p)
        assert d.d_velocities[0, 0] == -1.0
        assert d.d_velocities[1, 0] == 1.0

    def test_matches_brute_force(self):
        for gamma in (0.75, 1.0, 1.25):
            for alpha in (1.0, 2.5):
                state = seeded_state(seed=11, n=7, d=3)
                p = ModelParams(n_agents=7, dim=3, alpha=alpha, gamma=gamma)
                got = eval_dvel(state.positions, state.velocities, p)
                want = rhs_brute(state.positions, state.velocities, power_psi(alpha), gamma)
                if backend() == "compiled":
                    assert np.array_equal(got, want)
                else:
                    assert np.allclose(got, want, rtol=0, atol=16 * np.spacing(np.abs(want).max()))

    def test_mirror_antisymmetry_is_exact(self):
        state = seeded_state(seed=2, n=6)
        p = ModelParams(n_agents=6, dim=2, alpha=1.5, gamma=1.25)
        fwd = eval_dvel(state.positions, state.velocities, p)
        rev = eval_dvel(-state.positions, -state.velocities, p)
        assert np.array_equal(rev, -fwd)

    def test_momentum_balance(self):
        for seed in range(5):
            state = seeded_state(seed=seed, n=9)
            p = ModelParams(n_agents=9, dim=2, alpha=1.0, gamma=0.8)
            d = eval_dvel(state.positions, state.velocities, p)
            tol = 1e-12 * 9 * np.abs(d).max()
            assert np.abs(d.sum(axis=0)).max() <= tol

    def test_energy_dissipation_sign(self):
        for seed in range(5):
            state = seeded_state(seed=seed, n=8)
            p = ModelParams(n_agents=8, dim=2, alpha=1.2, gamma=1.1)
            d = eval_dvel(state.positions, state.velocities, p)
            power = float((d * state.velocities).sum())
            assert power <= 1e-12 * 8 * np.abs(d).max() * np.abs(state.velocities).max()

    def test_translation_invariance_bitwise(self):
        # Dyadic positions plus an integer shift keep every difference exact,
        # so the derivative must not change at all.
        rng = np.random.default_rng(4)
        pos = rng.integers(0, 2**20, (6, 2)).astype(float) / 2**18
        vel = rng.integers(-(2**16), 2**16, (6, 2)).astype(float) / 2**16
        p = ModelParams(n_agents=6, dim=2, alpha=1.5, gamma=1.25)
        base = eval_dvel(pos, vel, p)
        shifted = eval_dvel(pos + np.array([37.0, -12.0]), vel, p)
        assert np.array_equal(base, shifted)

    def test_permutation_equivariance(self):
        state = seeded_state(seed=8, n=6)
        p = ModelParams(n_agents=6, dim=2, alpha=1.0, gamma=1.0)
        perm = np.array([3, 0, 5, 1, 4, 2])
        base = eval_dvel(state.positions, state.velocities, p)
        permuted = eval_dvel(state.positions[perm], state.velocities[perm], p)
        assert np.allclose(permuted, base[perm], rtol=1e-12, atol=1e-15)

    def test_singularity_error_names_pair(self):
        pos = np.array([[0.0, 0.0], [0.05, 0.0], [2.0, 2.0]])
        vel = np.zeros((3, 2))
        p = ModelParams(
            n_agents=3, dim=2, alpha=1.0, delta=0.1, weight_kind=WeightKind.SHIFTED_SINGULAR
        )
        with pytest.raises(SingularityError) as exc:
            eval_dvel(pos, vel, p)
        assert exc.value.pair == (0, 1)
        assert exc.value.distance == pytest.approx(0.05)

    def test_gamma_out_of_dynamics_range(self):
        p = ModelParams(n_agents=2, dim=1, gamma=1.7)
        s = ParticleState(0.0, [[0.0], [1.0]], [[0.0], [0.0]])
        with pytest.raises(ParameterError):
            rhs(s, p)

    def test_compensated_mode_close_to_plain(self):
        state = seeded_state(seed=13, n=10)
        p = ModelParams(n_agents=10, dim=2, alpha=1.0, gamma=1.0)
        pc = ModelParams(n_agents=10, dim=2, alpha=1.0, gamma=1.0, compensated_sum=True)
        a = eval_dvel(state.positions, state.velocities, p)
        b = eval_dvel(state.positions, state.velocities, pc)
        assert np.allclose(a, b, rtol=1e-13, atol=1e-16)

    def test_custom_callbacks_match_builtin(self):
        state = seeded_state(seed=5, n=5)
        alpha, gamma = 1.5, 1.0
        builtin = ModelParams(n_agents=5, dim=2, alpha=alpha, gamma=gamma)
        custom = ModelParams(
            n_agents=5,
            dim=2,
            alpha=alpha,
            gamma=gamma,
            weight_kind=WeightKind.CUSTOM,
            custom_weight=CustomWeight(evaluate=power_psi(alpha)),
            coupling_kind=CouplingKind.CUSTOM,
            custom_coupling=lambda v: np.asarray(v, dtype=float),
        )
        a = eval_dvel(state.positions, state.velocities, builtin)
        b = eval_dvel(state.positions, state.velocities, custom)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-15)


class TestMinPairDistance:
    def test_single_pair(self):
        s = ParticleState(0.0, [[0.0, 0.0], [3.0, 4.0]], np.zeros((2, 2)))
        assert min_pair_distance(s) == (5.0, (0, 1))

    def test_collinear_three(self):
        s = ParticleState(0.0, [[0.0], [1.0], [3.0]], np.zeros((3, 1)))
        assert min_pair_distance(s) == (1.0, (0, 1))

    def test_tie_break_lexicographic(self):
        pos = [[0.0], [1.0], [2.0]]
        s = ParticleState(0.0, pos, np.zeros((3, 1)))
        assert min_pair_distance(s) == (1.0, (0, 1))

    def test_matches_brute_force_on_random(self):
        rng = np.random.default_rng(64)
        pos = rng.uniform(0, 10, (64, 3))
        got_d, got_pair = min_pair_distance(pos)
        want_d, want_pair = min_pair_brute(pos)
        assert got_d == want_d
        assert got_pair == want_pair

    def test_needs_two_agents(self):
        with pytest.raises(ParameterError):
            min_pair_distance(np.zeros((1, 2)))
