"""Exception hierarchy; the CLI maps these onto exit codes."""


class PanelRootError(Exception):
    pass


class ValidationError(PanelRootError, ValueError):
    """Bad input: wrong shapes, out-of-range parameters, malformed files."""


class DegenerateRowError(ValidationError):
    """A series is constant over time, so its correlation is undefined."""

    def __init__(self, rows):
        self.rows = list(rows)
        super().__init__(f"constant (zero-variance) rows after demeaning: {self.rows[:10]}")


class NumericalError(PanelRootError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(f"{message} (achieved residual {residual:.3e})")
