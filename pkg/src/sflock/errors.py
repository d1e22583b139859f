"""Exception types shared across the package."""


class SflockError(Exception):
    """Base class for all package errors."""


class ParameterError(SflockError):
    """A parameter is outside the range a routine supports."""


class DomainError(SflockError):
    """An evaluation point lies at or beyond a singularity.

    ``pair`` names the offending agent pair when the violation comes from a
    pairwise quantity, otherwise it is None.
    """

    def __init__(self, message, pair=None, value=None):
        super().__init__(message)
        self.pair = pair
        self.value = value


class UnsupportedError(SflockError):
    """Requested a closed form that is not configured."""


class SingularityError(SflockError):
    """A state evaluation hit an inter-agent gap at or inside the singularity."""

    def __init__(self, i, j, distance, message=None):
        if message is None:
            message = (
                f"pair ({i}, {j}) at distance {distance:.6e} is at or inside "
                "the weight singularity"
            )
        super().__init__(message)
        self.i = i
        self.j = j
        self.distance = distance

    @property
    def pair(self):
        return (self.i, self.j)


class SingularityStall(SflockError):
    """The step size hit its floor while the proximity guard still rejects.

    Signals an approach to collision beyond the resolvable scale.
    """

    def __init__(self, time, dt, gap):
        super().__init__(
            f"step size {dt:.3e} fell below the floor at t={time:.6e} "
            f"while the minimum gap is {gap:.3e}"
        )
        self.time = time
        self.dt = dt
        self.gap = gap


class IntegralUndefined(SflockError):
    """A weight-tail integral has no meaning for the given configuration."""


class InsufficientData(SflockError):
    """A trajectory-level analysis needs more samples than the record has."""


class DegenerateGroup(SflockError):
    """A collision group has zero position fluctuation."""


class HypothesisViolated(SflockError):
    """A trajectory fails the separation hypothesis a monitor relies on."""

    def __init__(self, pair, time, distance, floor):
        super().__init__(
            f"pair {pair} at t={time:.6e} has distance {distance:.6e} "
            f"below the required separation {floor:.6e}"
        )
        self.pair = pair
        self.time = time
        self.distance = distance
        self.floor = floor


class ConditionFailed(SflockError):
    """A user-supplied weight fails the growth condition it was declared to satisfy."""


class ConfigError(SflockError):
    """An experiment configuration is malformed. ``field`` names the bad key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
