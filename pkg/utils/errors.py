class UsageError(ValueError):
    """Bad arguments, mismatched dimensions or malformed input files"""


class RefusalError(UsageError):
    """Raised when a request would trigger runaway work (e.g. enumerating 2^25 states)"""


class InfeasibleInstanceError(UsageError):
    """Raised when installed compressor capacity cannot cover demand at some interval"""

    def __init__(self, intervals):
        self.intervals = list(intervals)
        super().__init__(f"Capacity below demand at intervals {self.intervals}")


class InstabilityError(ArithmeticError):
    """Raised when an oscillator leaves the blow-up bound during integration"""

    def __init__(self, index: int, step: int, value: float):
        self.index = index
        self.step = step
        self.value = value
        super().__init__(
            f"Oscillator {index} reached |x|={abs(value):.3g} at step {step}; "
            f"dt is too large for this problem's coupling scale"
        )
