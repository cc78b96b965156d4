from typing import Optional

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VIOLATION = 3


class HeatlabError(Exception):
    """Base error; carries the exit code the CLI should terminate with."""

    exit_code: int = EXIT_VALIDATION

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class InvalidInputError(HeatlabError, ValueError):
    pass


class OrderCapExceeded(InvalidInputError):
    def __init__(self, order: int, cap: int, what: str = "derivative order"):
        super().__init__(f"{what} {order} exceeds the configured cap {cap}")
        self.order = order
        self.cap = cap


class CertificateValidationError(InvalidInputError):
    def __init__(self, detail: str, term: Optional[str] = None):
        super().__init__(detail if term is None else f"{detail}: {term}")
        self.term = term


class SupportError(InvalidInputError):
    """The grid is too narrow for the requested operation."""

    def __init__(self, detail: str, hint: str):
        super().__init__(f"{detail} ({hint})")
        self.hint = hint
