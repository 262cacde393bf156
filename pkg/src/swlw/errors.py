"""Exception hierarchy. CLI exit codes hang off these classes."""


class SimulationError(RuntimeError):
    exit_code = 1


class ConfigError(ValueError):
    exit_code = 2

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InvariantViolated(SimulationError):
    """Density, Jacobian or solenoidality constraint broken after a step."""

    exit_code = 3


class PicardDiverged(SimulationError):
    """The per-step fixed-point iteration stopped contracting."""

    exit_code = 4


class CFLViolation(SimulationError):
    exit_code = 4


class InnerSolveDiverged(SimulationError):
    exit_code = 4
