"""Exception hierarchy.

Two families matter at the CLI boundary: input problems (bad config, bad
CSV, missing report text) and estimator-undefined conditions, where the data
are well formed but the requested quantity does not exist on them.
"""


class MittError(Exception):
    """Base class for every error raised by this package."""


class InputError(MittError):
    """Invalid user input: configuration, files or report fields."""


class ConfigurationError(InputError, ValueError):
    pass


class ParseError(InputError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class MissingJustificationError(InputError, ValueError):
    pass


class CounterfactualUnavailableError(InputError, TypeError):
    pass


class EstimatorUndefinedError(MittError, ArithmeticError):
    """The requested estimate or estimand does not exist for these inputs."""


class NoInitiatorsError(EstimatorUndefinedError):
    def __init__(self, arm):
        self.arm = arm
        super().__init__(f"no participants initiated treatment in the {arm.label} arm; "
                         "the modified intention-to-treat estimate is undefined")


class EmptyArmError(EstimatorUndefinedError):
    def __init__(self, arm):
        self.arm = arm
        super().__init__(f"the {arm.label} arm has no records")


class UndefinedEstimandError(EstimatorUndefinedError):
    pass


class UndefinedLimitError(EstimatorUndefinedError):
    def __init__(self, arm):
        self.arm = arm
        super().__init__(f"the {arm.label} analysis population has zero probability mass")


class AllUndefinedError(EstimatorUndefinedError):
    pass
