"""Model parameters: agent counts, weight family, and velocity-coupling family.

The interaction model is fixed by two ingredients:

* a communication weight ``psi(s)`` of the inter-agent distance, positive and
  nonincreasing, possibly singular at ``s = delta`` (or ``s = 0``);
* a velocity coupling ``Gamma(v)`` applied to velocity differences, odd and
  coercive: ``<Gamma(v), v> >= c1 * |v|^(2 gamma)``.

The power-law prototype is ``Gamma(v) = v |v|^(2 (gamma - 1))``, which reduces
to the identity for ``gamma = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .errors import ParameterError


class WeightKind(str, Enum):
    POWER_SINGULAR = "power_singular"      # psi(s) = s^-alpha, domain s > 0
    SHIFTED_SINGULAR = "shifted_singular"  # psi(s) = (s - delta)^-alpha, domain s > delta
    REGULAR_CS = "regular_cs"              # psi(s) = (1 + s^2)^-beta_cs, domain s >= 0
    CUSTOM = "custom"


class CouplingKind(str, Enum):
    POWER_LAW = "power_law"  # Gamma(v) = v |v|^(2 (gamma - 1))
    LINEAR = "linear"        # Gamma(v) = v; identical to POWER_LAW at gamma = 1
    CUSTOM = "custom"


@dataclass(frozen=True)
class CustomWeight:
    """User-supplied weight: ``evaluate(s)`` and optionally its primitive.

    ``domain_min`` is the largest s at which the weight is still undefined;
    evaluation requires ``s > domain_min``.
    """

    evaluate: Callable[[float], float]
    primitive: Optional[Callable[[float], float]] = None
    domain_min: float = 0.0


@dataclass(frozen=True)
class ModelParams:
    """Immutable description of one interaction model.

    ``gamma`` must exceed 1/2 everywhere; the dynamics routines additionally
    require ``gamma <= 3/2`` (the coercivity range), while the gap-functional
    estimates accept any ``gamma > 1/2``.
    """

    n_agents: int
    dim: int = 2
    alpha: float = 1.0
    gamma: float = 1.0
    delta: float = 0.0
    c1: float = 1.0
    weight_kind: WeightKind = WeightKind.POWER_SINGULAR
    coupling_kind: CouplingKind = CouplingKind.POWER_LAW
    beta_cs: float = 0.0
    compensated_sum: bool = False
    custom_weight: Optional[CustomWeight] = None
    custom_coupling: Optional[Callable] = None

    def __post_init__(self):
        if int(self.n_agents) != self.n_agents or self.n_agents < 2:
            raise ParameterError("n_agents must be an integer >= 2")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ParameterError("dim must be an integer >= 1")
        if not self.alpha > 0:
            raise ParameterError("alpha must be > 0")
        if not self.gamma > 0.5:
            raise ParameterError("gamma must be > 1/2")
        if self.delta < 0:
            raise ParameterError("delta must be >= 0")
        if not self.c1 > 0:
            raise ParameterError("c1 must be > 0")
        kind = WeightKind(self.weight_kind)
        object.__setattr__(self, "weight_kind", kind)
        ckind = CouplingKind(self.coupling_kind)
        object.__setattr__(self, "coupling_kind", ckind)
        if kind is WeightKind.POWER_SINGULAR and self.delta != 0.0:
            raise ParameterError("power_singular weight requires delta = 0")
        if kind is WeightKind.REGULAR_CS and self.beta_cs < 0:
            raise ParameterError("beta_cs must be >= 0")
        if kind is WeightKind.CUSTOM and self.custom_weight is None:
            raise ParameterError("custom weight kind needs custom_weight callbacks")
        if ckind is CouplingKind.LINEAR and self.gamma != 1.0:
            raise ParameterError("linear coupling is the gamma = 1 power law; set gamma = 1")
        if ckind is CouplingKind.CUSTOM and self.custom_coupling is None:
            raise ParameterError("custom coupling kind needs a custom_coupling callable")

    @property
    def dynamics_gamma_ok(self) -> bool:
        """Whether gamma lies in the coercivity range the dynamics assume."""
        return 0.5 < self.gamma <= 1.5

    def weight_domain_min(self) -> float:
        """Largest s at which the weight is undefined (-inf means total)."""
        if self.weight_kind is WeightKind.POWER_SINGULAR:
            return 0.0
        if self.weight_kind is WeightKind.SHIFTED_SINGULAR:
            return self.delta
        if self.weight_kind is WeightKind.REGULAR_CS:
            return float("-inf")
        return self.custom_weight.domain_min
