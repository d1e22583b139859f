"""Communication-weight families and their primitives.

Primitives are normalized so values are reproducible:

* power kind:   integral of s^-alpha is ln(s) for alpha = 1, otherwise
  s^(1-alpha) / (1-alpha);
* shifted kind: same expressions in (s - delta);
* regular kind: normalized so the primitive vanishes at 0; closed forms for
  beta_cs in {0, 1}, numeric quadrature otherwise.

Only differences of the primitive enter any estimate, so the choice of
constant is a bookkeeping convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import DomainError, UnsupportedError
from .params import ModelParams, WeightKind


@dataclass(frozen=True)
class WeightFunction:
    """A weight together with its primitive and domain edge.

    ``evaluate`` and ``primitive`` accept a single scalar strictly inside the
    domain (``s > domain_min``; the regular kind also accepts ``s = 0``).
    """

    kind: WeightKind
    evaluate: Callable[[float], float]
    primitive: Callable[[float], float]
    domain_min: float
    alpha: float = 0.0
    delta: float = 0.0
    beta_cs: float = 0.0

    def check_domain(self, s: float) -> None:
        if self.kind is WeightKind.REGULAR_CS:
            if s < 0:
                raise DomainError(f"distance {s} is negative", value=s)
            return
        if not s > self.domain_min:
            raise DomainError(
                f"s={s} is at or inside the weight singularity (domain s > {self.domain_min})",
                value=s,
            )


def _regular_primitive(beta_cs: float) -> Callable[[float], float]:
    if beta_cs == 0.0:
        return lambda s: s
    if beta_cs == 1.0:
        return math.atan
    def quad_primitive(s: float) -> float:
        from scipy.integrate import quad
        val, _ = quad(lambda t: (1.0 + t * t) ** (-beta_cs), 0.0, s)
        return val
    return quad_primitive


def make_weight(params: ModelParams) -> WeightFunction:
    kind = params.weight_kind
    alpha = params.alpha
    delta = params.delta
    if kind is WeightKind.POWER_SINGULAR:
        if alpha == 1.0:
            prim = math.log
        else:
            prim = lambda s: s ** (1.0 - alpha) / (1.0 - alpha)
        return WeightFunction(kind, lambda s: s**-alpha, prim, 0.0, alpha=alpha)
    if kind is WeightKind.SHIFTED_SINGULAR:
        if alpha == 1.0:
            prim = lambda s: math.log(s - delta)
        else:
            prim = lambda s: (s - delta) ** (1.0 - alpha) / (1.0 - alpha)
        return WeightFunction(
            kind, lambda s: (s - delta) ** -alpha, prim, delta, alpha=alpha, delta=delta
        )
    if kind is WeightKind.REGULAR_CS:
        beta_cs = params.beta_cs
        return WeightFunction(
            kind,
            lambda s: (1.0 + s * s) ** (-beta_cs),
            _regular_primitive(beta_cs),
            float("-inf"),
            beta_cs=beta_cs,
        )
    cw = params.custom_weight
    if cw.primitive is None:
        def no_primitive(_s):
            raise UnsupportedError("custom weight was supplied without a primitive")
        prim = no_primitive
    else:
        prim = cw.primitive
    return WeightFunction(kind, cw.evaluate, prim, cw.domain_min)


def weight_eval(s: float, params: ModelParams) -> float:
    """Evaluate psi(s). Raises DomainError at or inside the singularity."""
    w = make_weight(params)
    w.check_domain(s)
    return float(w.evaluate(s))


def weight_primitive(s: float, params: ModelParams) -> float:
    """Evaluate the normalized primitive of psi at s."""
    w = make_weight(params)
    w.check_domain(s)
    return float(w.primitive(s))


def primitive_difference(weight: WeightFunction, lo: float, hi: float) -> float:
    """Integral of psi over [lo, hi], via the primitive."""
    weight.check_domain(lo)
    weight.check_domain(hi)
    return float(weight.primitive(hi)) - float(weight.primitive(lo))
