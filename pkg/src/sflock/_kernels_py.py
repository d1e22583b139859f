"""Pure-Python pairwise kernels.

Fallback for the compiled extension, selected at import time by
``sflock.kernels``. Semantics and accumulation order mirror the compiled
kernels:

* the alignment sum for agent i accumulates contributions in ascending
  partner order; pair sums accumulate in ascending (i, j) with i < j;
* pair sums and extrema match the compiled kernels bit-for-bit (their
  transcendentals go through scalar libm calls in both backends);
* the alignment sum is vectorized with numpy, whose array ``power`` kernel
  may differ from libm ``pow`` in the last ulp, so the two backends agree on
  it to a few ulps rather than exactly. Each backend on its own is bitwise
  reproducible run to run.

Domain violations (an inter-agent gap at or inside the singularity) are
reported through a status tuple rather than an exception so the compiled
kernel can share the convention; wrappers in ``sflock.dynamics`` and
``sflock.guards`` convert statuses to typed errors.
"""

from __future__ import annotations

import math

import numpy as np

WEIGHT_POWER = 0
WEIGHT_SHIFTED = 1
WEIGHT_REGULAR = 2

OK_STATUS = (-1, -1, 0.0)


def _first_bad_pair(pos, floor):
    """Lexicographically smallest (i, j), i < j, with gap <= floor."""
    n = pos.shape[0]
    for i in range(n):
        d = pos[i + 1 :] - pos[i]
        dist = np.sqrt((d * d).sum(axis=1))
        bad = np.nonzero(dist <= floor)[0]
        if bad.size:
            j = i + 1 + int(bad[0])
            return i, j, float(dist[bad[0]])
    return None


def rhs_dvel(pos, vel, weight_code, alpha, delta, beta_cs, gamma, compensated):
    """Alignment acceleration for every agent.

    Returns ``(dvel, status_i, status_j, bad_dist)``; ``status_i >= 0`` flags
    a domain violation and leaves ``dvel`` unspecified. The 1/N factor is
    applied once at the end.
    """
    n, d = pos.shape
    out = np.zeros((n, d))
    comp = np.zeros((n, d)) if compensated else None
    gm1 = gamma - 1.0
    floor = delta if weight_code == WEIGHT_SHIFTED else 0.0

    for j in range(n):
        dx = pos[j] - pos
        d2 = (dx * dx).sum(axis=1)
        dist = np.sqrt(d2)
        if weight_code != WEIGHT_REGULAR:
            mask = dist <= floor
            mask[j] = False
            if mask.any():
                bad = _first_bad_pair(pos, floor)
                return out, bad[0], bad[1], bad[2]
        with np.errstate(divide="ignore", invalid="ignore"):
            if weight_code == WEIGHT_REGULAR:
                psi = np.power(1.0 + d2, -beta_cs)
            elif weight_code == WEIGHT_POWER:
                psi = np.power(dist, -alpha)
            else:
                psi = np.power(dist - delta, -alpha)
            dv = vel[j] - vel
            n2 = (dv * dv).sum(axis=1)
            gfac = np.power(n2, gm1)
        # Zero-difference pairs contribute nothing (removable point of the
        # coupling); they are skipped outright so the compensated-sum state
        # matches the compiled kernel, which never touches them.
        valid = n2 != 0.0
        valid[j] = False
        idx = np.nonzero(valid)[0]
        if idx.size == 0:
            continue
        coeff = psi[idx] * gfac[idx]
        term = coeff[:, None] * dv[idx]
        if compensated:
            # Kahan update, element-wise.
            y = term - comp[idx]
            t = out[idx] + y
            comp[idx] = (t - out[idx]) - y
            out[idx] = t
        else:
            out[idx] += term

    out *= 1.0 / n
    return out, -1, -1, 0.0


def min_pair(pos):
    """Minimum inter-agent distance and its lexicographically first pair."""
    n = pos.shape[0]
    best = np.inf
    bi = bj = 0
    for i in range(n - 1):
        d = pos[i + 1 :] - pos[i]
        dist = np.sqrt((d * d).sum(axis=1))
        k = int(np.argmin(dist))
        if dist[k] < best:
            best = float(dist[k])
            bi, bj = i, i + 1 + k
    return best, bi, bj


def max_pair_norm(rows):
    """Maximum over pairs of |row_i - row_j|."""
    n = rows.shape[0]
    best = 0.0
    for i in range(n - 1):
        d = rows[i + 1 :] - rows[i]
        dist = np.sqrt((d * d).sum(axis=1))
        if dist.size:
            best = max(best, float(dist.max()))
    return best


def pair_gap_pow_sum(pos, beta, delta, log_variant):
    """Sum over ordered pairs i != j of (gap - delta)^-beta, or log(gap - delta).

    Accumulates the i < j terms in ascending order and doubles each, which
    matches the ordered-pair sum exactly. Returns (acc, status_i, status_j,
    bad_dist).
    """
    n = pos.shape[0]
    acc = 0.0
    for i in range(n - 1):
        d = pos[i + 1 :] - pos[i]
        dist = np.sqrt((d * d).sum(axis=1))
        bad = np.nonzero(dist <= delta)[0]
        if bad.size:
            j = i + 1 + int(bad[0])
            return 0.0, i, j, float(dist[bad[0]])
        for g in (dist - delta).tolist():
            t = math.log(g) if log_variant else math.pow(g, -beta)
            acc += 2.0 * t
    return acc, -1, -1, 0.0


def weighted_vel_pow_sum(pos, vel, weight_code, alpha, delta, beta_cs, two_gamma):
    """Sum over ordered pairs i != j of psi(|x_i - x_j|) |v_i - v_j|^(2 gamma)."""
    n = pos.shape[0]
    floor = delta if weight_code == WEIGHT_SHIFTED else 0.0
    acc = 0.0
    half_tg = two_gamma / 2.0
    for i in range(n - 1):
        dx = pos[i + 1 :] - pos[i]
        d2 = (dx * dx).sum(axis=1)
        dist = np.sqrt(d2)
        if weight_code != WEIGHT_REGULAR:
            bad = np.nonzero(dist <= floor)[0]
            if bad.size:
                j = i + 1 + int(bad[0])
                return 0.0, i, j, float(dist[bad[0]])
        dv = vel[i + 1 :] - vel[i]
        n2 = (dv * dv).sum(axis=1)
        for d2k, distk, n2k in zip(d2.tolist(), dist.tolist(), n2.tolist()):
            if weight_code == WEIGHT_REGULAR:
                psi = math.pow(1.0 + d2k, -beta_cs)
            elif weight_code == WEIGHT_POWER:
                psi = math.pow(distk, -alpha)
            else:
                psi = math.pow(distk - delta, -alpha)
            t = psi * math.pow(n2k, half_tg)
            acc += 2.0 * t
    return acc, -1, -1, 0.0
