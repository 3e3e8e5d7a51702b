"""Exception hierarchy shared by the library and the command line front end."""


class CnrnnError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 2


class PgmError(CnrnnError, ValueError):
    """Malformed or unsupported PGM input."""

    def __init__(self, message, offset=None, path=None):
        self.offset = offset
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if offset is not None:
            where.append(f"byte offset {offset}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class UnsupportedPgmError(PgmError):
    pass


class DatasetError(CnrnnError, ValueError):
    """Dataset layout or class composition not usable for evaluation."""


class NumericalError(CnrnnError, ArithmeticError):
    exit_code = 3


class SingularMatrixError(NumericalError):
    """A linear system could not be solved because its matrix is singular."""

    def __init__(self, message, condition=None):
        self.condition = condition
        if condition is not None:
            message = f"{message} (condition estimate {condition:.3e})"
        super().__init__(message)
