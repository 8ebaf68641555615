class FastSramError(Exception):
    pass


class CorruptedRowError(FastSramError):
    """A row holding unresolved dynamic charge was read or operated on."""

    def __init__(self, row, detail: str = "corrupted"):
        super().__init__(f"row {row}: {detail}")
        self.row = row


class RoutingError(FastSramError, ValueError):
    pass


class OperandError(FastSramError, ValueError):
    pass


class TraceError(FastSramError):
    """A malformed or unexecutable trace command. ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class CalibrationInfeasible(FastSramError):
    def __init__(self, result, failures):
        self.result = result
        self.failures = failures
        super().__init__("calibration infeasible: " + "; ".join(failures))


class ModelDivergence(FastSramError):
    pass
