"""Custom exceptions for nvpump."""

from enum import Enum


class ErrorCode(Enum):
    """Structured error codes for nvpump."""

    # General errors (1xx)
    UNKNOWN = 100
    INTERNAL_ERROR = 101
    CONFIGURATION_ERROR = 102

    # Spin domain errors (2xx)
    DOMAIN_ERROR = 200
    INVALID_TRANSITION = 201
    INVALID_STATE = 202

    # Protocol errors (3xx)
    BUILD_FAILED = 300
    FREQUENCY_COLLISION = 301
    EMPTY_PROGRAM = 302

    # Readout errors (4xx)
    ESTIMATION_FAILED = 400
    LINES_UNRESOLVED = 401
    ALIASING = 402

    # Validation errors (5xx)
    VALIDATION_FAILED = 500
    INVALID_CONFIG = 501
    PARSE_ERROR = 502
    SEMANTIC_ERROR = 503
    EMPTY_SWEEP_AXIS = 504
    UNDEFINED_LIMIT = 505

    # Output errors (6xx)
    OUTPUT_FAILED = 600
    FILE_NOT_FOUND = 601


class NVPumpError(Exception):
    """Base exception for all nvpump errors."""

    # User-facing remediation hints mapped by error code
    USER_MESSAGES: dict[ErrorCode, str] = {
        ErrorCode.DOMAIN_ERROR: "Quantum numbers m_S and m_I must each be -1, 0 or +1.",
        ErrorCode.INVALID_TRANSITION: (
            "mw transitions change m_S by one and keep m_I; "
            "rf transitions change m_I by one and keep m_S."
        ),
        ErrorCode.INVALID_STATE: (
            "The density matrix must be a Hermitian, unit-trace, positive 9x9 matrix."
        ),
        ErrorCode.FREQUENCY_COLLISION: (
            "Two addressed transitions coincide in frequency. "
            "Apply a magnetic field along the NV axis to lift the degeneracy."
        ),
        ErrorCode.EMPTY_PROGRAM: "A program needs at least one instruction and repeat >= 1.",
        ErrorCode.LINES_UNRESOLVED: (
            "Spectral lines overlap. Reduce the linewidth or widen the line spacing."
        ),
        ErrorCode.ALIASING: (
            "The Ramsey tones exceed the Nyquist frequency. Reduce the dwell time."
        ),
        ErrorCode.PARSE_ERROR: "Check the program syntax near the reported line and column.",
        ErrorCode.SEMANTIC_ERROR: "The statement is well formed but physically invalid.",
        ErrorCode.INVALID_CONFIG: "Fix the configuration file and run again.",
        ErrorCode.EMPTY_SWEEP_AXIS: "Every sweep axis needs at least one value.",
        ErrorCode.UNDEFINED_LIMIT: (
            "With p_a = p_b = 0 nothing moves; give either one a value above 0."
        ),
        ErrorCode.FILE_NOT_FOUND: "Check that the referenced file exists.",
        ErrorCode.OUTPUT_FAILED: "Check that the output directory is writable.",
    }

    def __init__(self, message: str, code: ErrorCode = ErrorCode.UNKNOWN):
        """Initialize NVPumpError.

        Args:
            message: Error message.
            code: Structured error code.
        """
        self.code = code
        self.message = message
        super().__init__(message)

    @property
    def is_validation(self) -> bool:
        """Whether the error stems from invalid input rather than a runtime failure."""
        return 500 <= self.code.value < 600 or self.code == ErrorCode.CONFIGURATION_ERROR

    def get_user_message(self) -> str:
        """Get user-friendly error message.

        Returns:
            Human-readable error message with remediation hints.
        """
        hint = self.USER_MESSAGES.get(self.code)
        if hint:
            return f"{self.message}\n\nHint: {hint}"
        return self.message

    def to_dict(self) -> dict[str, object]:
        """Convert error to dictionary for structured logging.

        Returns:
            Dictionary with error details.
        """
        return {
            "error": self.message,
            "code": self.code.value,
            "code_name": self.code.name,
        }


class SpinDomainError(NVPumpError):
    """Raised for out-of-range quantum numbers or malformed transitions."""

    def __init__(self, message: str, code: ErrorCode = ErrorCode.DOMAIN_ERROR):
        """Initialize SpinDomainError.

        Args:
            message: Error message.
            code: Specific domain error code.
        """
        super().__init__(message, code)

    @property
    def is_validation(self) -> bool:
        """Quantum numbers always come from user input."""
        return True


class StateValidationError(NVPumpError):
    """Raised when a density matrix or population vector is not physical."""

    def __init__(self, message: str, code: ErrorCode = ErrorCode.INVALID_STATE):
        """Initialize StateValidationError.

        Args:
            message: Error message.
            code: Specific error code.
        """
        super().__init__(message, code)

    @property
    def is_validation(self) -> bool:
        """User-supplied populations failing normalization are input errors."""
        return True


class ProgramBuildError(NVPumpError):
    """Raised when a protocol program cannot be constructed."""

    def __init__(self, message: str, code: ErrorCode = ErrorCode.BUILD_FAILED):
        """Initialize ProgramBuildError.

        Args:
            message: Error message.
            code: Specific build error code.
        """
        super().__init__(message, code)

    @property
    def is_validation(self) -> bool:
        """Programs are built from user input before anything runs."""
        return True


class ReadoutError(NVPumpError):
    """Raised when a spectrum cannot be synthesized or interpreted."""

    def __init__(
        self,
        message: str,
        code: ErrorCode = ErrorCode.ESTIMATION_FAILED,
        diagnostic: dict[str, object] | None = None,
    ):
        """Initialize ReadoutError.

        Args:
            message: Error message.
            code: Specific readout error code.
            diagnostic: Optional numbers explaining the failure.
        """
        self.diagnostic = diagnostic or {}
        super().__init__(message, code)

    def to_dict(self) -> dict[str, object]:
        """Convert error to dictionary, including the diagnostic."""
        base_dict = super().to_dict()
        base_dict["diagnostic"] = self.diagnostic
        return base_dict


class SeqSyntaxError(NVPumpError):
    """Raised when program text does not match the grammar."""

    def __init__(
        self,
        message: str,
        line: int,
        column: int,
        source_line: str = "",
        code: ErrorCode = ErrorCode.PARSE_ERROR,
    ):
        """Initialize SeqSyntaxError.

        Args:
            message: Error message.
            line: 1-based line of the offending token.
            column: 1-based column of the offending token.
            source_line: Text of the offending line.
            code: Specific error code.
        """
        self.line = line
        self.column = column
        self.source_line = source_line
        super().__init__(f"line {line}, column {column}: {message}", code)

    def get_user_message(self) -> str:
        """Get the error message with a caret under the offending column."""
        message = super().get_user_message()
        if not self.source_line:
            return message
        caret = " " * max(self.column - 1, 0) + "^"
        return f"{message}\n\n    {self.source_line}\n    {caret}"

    def to_dict(self) -> dict[str, object]:
        """Convert error to dictionary, including the source location."""
        base_dict = super().to_dict()
        base_dict.update({"line": self.line, "column": self.column})
        return base_dict


class SeqSemanticError(SeqSyntaxError):
    """Raised when a well-formed statement violates a physical rule."""

    def __init__(self, message: str, line: int, column: int, source_line: str = ""):
        """Initialize SeqSemanticError.

        Args:
            message: Error message.
            line: 1-based line of the statement.
            column: 1-based column of the statement.
            source_line: Text of the offending line.
        """
        super().__init__(message, line, column, source_line, ErrorCode.SEMANTIC_ERROR)


class ConfigurationError(NVPumpError):
    """Raised when an experiment configuration is invalid."""

    def __init__(self, message: str, code: ErrorCode = ErrorCode.INVALID_CONFIG):
        """Initialize ConfigurationError.

        Args:
            message: Error message.
            code: Specific configuration error code.
        """
        super().__init__(message, code)

    @property
    def is_validation(self) -> bool:
        """Configuration problems are always validation errors."""
        return True


class OutputError(NVPumpError):
    """Raised when result files cannot be written or read."""

    def __init__(self, path: str, reason: str, code: ErrorCode = ErrorCode.OUTPUT_FAILED):
        """Initialize OutputError.

        Args:
            path: File the operation failed on.
            reason: Underlying failure.
            code: Specific output error code.
        """
        self.path = path
        super().__init__(f"{path}: {reason}", code)

    def to_dict(self) -> dict[str, object]:
        """Convert error to dictionary, including the path."""
        base_dict = super().to_dict()
        base_dict["path"] = self.path
        return base_dict
