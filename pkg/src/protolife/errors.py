"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or parameters."""


class PopulationUnderflow(RuntimeError):
    """A collision was requested with fewer than two molecules present."""


class DegenerateRuleset(ValueError):
    """Every rule in the ruleset is neutral, so no order parameter exists."""


class InvalidDistribution(ValueError):
    pass


class ArityError(ValueError):
    pass


class EmptyPopulation(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class NonFiniteState(FloatingPointError):
    pass


class MalformedLog(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownSpecies(KeyError):
    pass


class MissingInstanceIds(ValueError):
    pass
