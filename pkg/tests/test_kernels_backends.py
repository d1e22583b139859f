"""Agreement and determinism of the two kernel backends."""

import os
import subprocess
import sys

import numpy as np
import pytest

import sflock._kernels_py as pure

compiled = pytest.importorskip("sflock._kernels")

CASES = [
    (0, 1.0, 0.0, 0.0, 1.0),
    (0, 2.5, 0.0, 0.0, 0.75),
    (1, 1.5, 0.1, 0.0, 1.25),
    (2, 0.0, 0.0, 0.7, 1.0),
]


def arrays(seed, n=12, d=3):
    rng = np.random.default_rng(seed)
    return rng.uniform(0, 3, (n, d)), rng.uniform(-1, 1, (n, d))


@pytest.mark.parametrize("code,alpha,delta,bcs,gamma", CASES)
@pytest.mark.parametrize("compensated", [False, True])
def test_rhs_backends_agree(code, alpha, delta, bcs, gamma, compensated):
    pos, vel = arrays(42)
    a = compiled.rhs_dvel(pos, vel, code, alpha, delta, bcs, gamma, compensated)
    b = pure.rhs_dvel(pos, vel, code, alpha, delta, bcs, gamma, compensated)
    assert a[1:] == b[1:]
    if a[1] < 0:
        scale = np.abs(a[0]).max()
        assert np.allclose(a[0], b[0], rtol=0, atol=8 * np.spacing(scale))


def test_pair_sums_bitwise_identical():
    pos, vel = arrays(7, n=20, d=2)
    for beta, delta, logv in [(0.5, 0.0, False), (0.0, 0.05, True), (1.5, 0.0, False)]:
        assert compiled.pair_gap_pow_sum(pos, beta, delta, logv) == pure.pair_gap_pow_sum(
            pos, beta, delta, logv
        )
    for code, alpha, delta, bcs, gamma in CASES:
        assert compiled.weighted_vel_pow_sum(
            pos, vel, code, alpha, delta, bcs, 2 * gamma
        ) == pure.weighted_vel_pow_sum(pos, vel, code, alpha, delta, bcs, 2 * gamma)


def test_extrema_bitwise_identical():
    pos, vel = arrays(9, n=30, d=3)
    assert compiled.min_pair(pos) == pure.min_pair(pos)
    assert compiled.max_pair_norm(vel) == pure.max_pair_norm(vel)


def test_domain_violation_reports_first_pair():
    pos = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 0.005], [5.0, 0.005]])
    vel = np.ones((4, 2))
    for mod in (compiled, pure):
        _, i, j, dist = mod.rhs_dvel(pos, vel, 1, 1.0, 0.01, 0.0, 1.0, False)
        assert (i, j) == (0, 2)
        assert dist == pytest.approx(0.005)


def test_each_backend_is_deterministic():
    pos, vel = arrays(3, n=16, d=2)
    for mod in (compiled, pure):
        a = mod.rhs_dvel(pos, vel, 0, 1.5, 0.0, 0.0, 1.25, False)[0]
        b = mod.rhs_dvel(pos, vel, 0, 1.5, 0.0, 0.0, 1.25, False)[0]
        assert np.array_equal(a, b)


def test_env_var_forces_python_backend():
    env = dict(os.environ, SFLOCK_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import sflock.kernels as k; print(k.backend())"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_default_prefers_compiled():
    env = {k: v for k, v in os.environ.items() if k != "SFLOCK_PURE_PYTHON"}
    out = subprocess.run(
        [sys.executable, "-c", "import sflock.kernels as k; print(k.backend())"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "compiled"
