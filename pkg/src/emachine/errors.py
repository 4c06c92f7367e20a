"""Exception types shared across the simulation stack."""


class EmachineError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(EmachineError):
    """Invalid parameters, alphabets, layouts or config files."""


class DimensionMismatchError(ConfigurationError):
    """Vectors of unequal length where equal length is required."""


class RejectionError(EmachineError):
    """An input symbol outside the machine's declared alphabet."""


class NumericalDivergenceError(EmachineError):
    """Integration produced non-finite state."""


class SingularParameterError(EmachineError):
    """A parameter combination makes a closed-form expression singular."""


class NonConvergenceError(EmachineError):
    """Competitive dynamics failed to settle within the time budget."""


class ResetFailureError(EmachineError):
    """Activity survived the inhibition half-cycle (inhibition too weak)."""


class NoSelectionError(EmachineError):
    """Winner selection requested on an empty score array."""


class MemoryFullError(EmachineError):
    """Association table capacity exhausted."""


class CoverageError(EmachineError):
    """A program does not contain every required association."""

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"program is missing {len(self.missing)} pair(s): "
                         f"{self.missing[:8]}{'...' if len(self.missing) > 8 else ''}")


class StuckError(EmachineError):
    """The motor field returned no command for the current situation."""

    def __init__(self, cycle, x):
        self.cycle = cycle
        self.x = x
        super().__init__(f"no association for situation at cycle {cycle}: {x}")


class ImageryGapError(EmachineError):
    """The imagery field cannot account for a situation or its outcome."""

    def __init__(self, cycle, x, detail=""):
        self.cycle = cycle
        self.x = x
        super().__init__(f"imagery gap at cycle {cycle}{': ' + detail if detail else ''}")


class TeacherFault(EmachineError):
    """The teacher controller observed a symbol it cannot handle."""


class StepSizeError(EmachineError):
    """Time step too large for the requested rates, or produced negative probability."""
