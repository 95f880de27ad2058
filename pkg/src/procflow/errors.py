"""Exception hierarchy shared by every procflow module."""


class ProcflowError(Exception):
    """Base class for all library errors."""


class TheoryError(ProcflowError):
    """Malformed theory, or an operation across two different theories."""


class UnknownGeneratorError(TheoryError):
    pass


class TypeMismatchError(ProcflowError):
    """Two boundaries that must agree do not.

    ``index`` is the first offending boundary position, when there is one.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class InvalidDiagramError(ProcflowError):
    """A port-graph invariant (port totality, wire typing) is broken."""


class NotACircuitError(ProcflowError):
    def __init__(self, message: str, cycles=(), bent_wires=(), loops=()):
        super().__init__(message)
        self.cycles = list(cycles)
        self.bent_wires = list(bent_wires)
        self.loops = list(loops)


class ModelError(ProcflowError):
    """A model does not fit the theory or diagram it is used with."""


class ArityError(ProcflowError):
    pass


class NotCompletelyPositiveError(ProcflowError):
    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NonCausalError(ProcflowError):
    pass


class ParseError(ProcflowError):
    """Malformed input file; ``line``/``column`` are set for JSON syntax errors, ``path`` for schema errors."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 path: str | None = None):
        where = f" at line {line}, column {column}" if line is not None else ""
        where += f" (at {path})" if path else ""
        super().__init__(message + where)
        self.line = line
        self.column = column
        self.path = path
