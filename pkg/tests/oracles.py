"""Brute-force reference implementations used only by the tests.

These stay deliberately naive (explicit loops, scalar libm calls) so they are
independent of the production kernels they verify. Accumulation orders are
fixed and documented where a test compares bit-for-bit.
"""

import math

import numpy as np


def rhs_brute(pos, vel, psi, gamma):
    """Alignment acceleration by direct summation.

    Row i accumulates partners in ascending j; each term is
    (psi(dist) * |dv|^(2 (gamma - 1))) * dv_k with the same operation order
    as the production kernels, then one final 1/N scaling.
    """
    n, d = pos.shape
    out = np.zeros((n, d))
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            d2 = 0.0
            for k in range(d):
                t = pos[j, k] - pos[i, k]
                d2 += t * t
            w = psi(math.sqrt(d2))
            n2 = 0.0
            for k in range(d):
                t = vel[j, k] - vel[i, k]
                n2 += t * t
            if n2 == 0.0:
                continue
            coeff = w * math.pow(n2, gamma - 1.0)
            for k in range(d):
                out[i, k] += coeff * (vel[j, k] - vel[i, k])
    out *= 1.0 / n
    return out


def min_pair_brute(pos):
    """Exhaustive double loop; ties keep the lexicographically first pair."""
    n = pos.shape[0]
    best, bi, bj = math.inf, 0, 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            d = float(np.linalg.norm(pos[j] - pos[i]))
            if d < best:
                best, bi, bj = d, i, j
    return best, (bi, bj)


def beta_distance_brute(pos, beta, delta):
    """Ordered-pair mean of (gap - delta)^-beta (log at beta = 0).

    Accumulates i < j in ascending order, doubling each term, matching the
    production summation order exactly.
    """
    n = pos.shape[0]
    acc = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            d2 = 0.0
            for k in range(pos.shape[1]):
                t = pos[j, k] - pos[i, k]
                d2 += t * t
            g = math.sqrt(d2) - delta
            term = math.log(g) if beta == 0.0 else math.pow(g, -beta)
            acc += 2.0 * term
    return acc / (n * (n - 1))


def group_norms_brute(rows, members):
    """Ordered-pair fluctuation norm over C x C, diagonal included (zero)."""
    acc = 0.0
    for i in members:
        for j in members:
            diff = rows[i] - rows[j]
            acc += float(diff @ diff)
    return math.sqrt(acc)


def moments_fsum(vel):
    """Moments via exact compensated summation."""
    n, d = vel.shape
    m1 = np.array([math.fsum(vel[:, k]) for k in range(d)])
    m2 = math.fsum(float(v) for v in (vel * vel).ravel())
    return n, m1, m2


def deviations_two_pass(pos, vel):
    """Mean first, then deviation; the naive textbook formula."""
    n = pos.shape[0]
    xc = pos.mean(axis=0)
    vc = vel.mean(axis=0)
    sx = math.sqrt(sum(float((p - xc) @ (p - xc)) for p in pos) / n)
    sv = math.sqrt(sum(float((v - vc) @ (v - vc)) for v in vel) / n)
    return sx, sv, xc, vc
