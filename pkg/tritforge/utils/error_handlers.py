import logging
from typing import Optional

logger = logging.getLogger(__name__)


# Custom exception classes
class TritforgeError(Exception):
    def __init__(self, message: str = "Simulation error"):
        self.message = message
        super().__init__(self.message)

class InvalidLevelError(TritforgeError):
    def __init__(self, site: int, level: int, dim: int):
        self.site = site
        self.level = level
        super().__init__(f"Level {level} out of range for site {site} of dimension {dim}")

class EmbeddingError(TritforgeError):
    def __init__(self, message: str = "Gate does not fit the requested sites"):
        super().__init__(message)

class InvalidCircuitError(TritforgeError):
    def __init__(self, message: str = "Invalid circuit"):
        super().__init__(message)

class InvalidSubspaceError(TritforgeError):
    def __init__(self, i: int, j: int):
        self.levels = (i, j)
        super().__init__(f"Invalid qutrit subspace ({i}, {j}): levels must be distinct and in {{0, 1, 2}}")

class NormalizationError(TritforgeError):
    def __init__(self, norm: float):
        self.norm = norm
        super().__init__(f"State is not normalized (norm {norm:.12g})")

class NotUnitaryError(TritforgeError):
    def __init__(self, deviation: float):
        self.deviation = deviation
        super().__init__(f"Matrix is not unitary (max |U†U - I| = {deviation:.3e})")

class InvalidDensityError(TritforgeError):
    def __init__(self, message: str = "Invalid density operator"):
        super().__init__(message)

class GateConstructionError(TritforgeError):
    def __init__(self, message: str = "Gate construction failed"):
        super().__init__(message)

class CatalogError(TritforgeError):
    def __init__(self, message: str = "Unknown catalog entry"):
        super().__init__(message)

class ConstructionIntegrityError(TritforgeError):
    def __init__(self, entry_id: str, detail: str):
        self.entry_id = entry_id
        super().__init__(f"Catalog entry {entry_id} failed its construction check: {detail}")

class WrongCheckerError(TritforgeError):
    def __init__(self, message: str = "Checker does not apply to this entry"):
        super().__init__(message)

class TauNotApplicableError(TritforgeError):
    def __init__(self, entry_id: str):
        self.entry_id = entry_id
        super().__init__(f"tau metric is not applicable to {entry_id} (not qutrit-based)")

class InvalidBudgetError(TritforgeError):
    def __init__(self, message: str = "Invalid timing budget"):
        super().__init__(message)

class CircuitFormatError(TritforgeError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")

class ConfigurationError(TritforgeError):
    def __init__(self, message: str = "Invalid configuration"):
        super().__init__(message)


class ExportError(TritforgeError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"Cannot write {path}: {reason}")


# Process exit codes
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INTEGRITY = 3
EXIT_IO = 4

_EXIT_CODES = {
    CatalogError: EXIT_USAGE,
    ConfigurationError: EXIT_USAGE,
    TauNotApplicableError: EXIT_USAGE,
    InvalidBudgetError: EXIT_USAGE,
    CircuitFormatError: EXIT_USAGE,
    ConstructionIntegrityError: EXIT_INTEGRITY,
    ExportError: EXIT_IO,
}


def exit_code_for(exc: BaseException) -> int:
    """Map an exception onto the CLI exit status."""
    for exc_type, code in _EXIT_CODES.items():
        if isinstance(exc, exc_type):
            return code
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_CHECK_FAILED


# Utility function to validate and format responses
def create_error_response(exit_code: int, message: str, details: Optional[dict] = None):
    response = {
        "error": message,
        "status": "error",
        "exit_code": exit_code
    }
    if details:
        response["details"] = details
    return response


def handle_command_error(e: Exception) -> dict:
    """Log a command failure and build its error record."""
    code = exit_code_for(e)
    message = getattr(e, "message", str(e))
    if code == EXIT_CHECK_FAILED and not isinstance(e, TritforgeError):
        logger.error(f"Unhandled exception: {message}", exc_info=True)
    else:
        logger.error(f"{type(e).__name__}: {message}")
    return create_error_response(code, message, {"type": type(e).__name__})
