"""
User-friendly error handling for the twig query engine.

Provides:
- Custom exception classes with helpful messages
- Error formatting for CLI display
- Recovery suggestions
"""
from __future__ import annotations

import logging
from enum import Enum
from typing import Any


class ErrorSeverity(str, Enum):
    """Severity levels for errors."""
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


class TPQError(Exception):
    """Base exception for engine errors."""

    def __init__(
        self,
        message: str,
        user_message: str | None = None,
        suggestion: str | None = None,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        details: dict[str, Any] | None = None,
    ):
        super().__init__(message)
        self.message = message
        self.user_message = user_message or message
        self.suggestion = suggestion
        self.severity = severity
        self.details = details or {}

    def to_dict(self) -> dict:
        """Convert to dictionary for machine-readable reports."""
        return {
            "error": self.message,
            "user_message": self.user_message,
            "suggestion": self.suggestion,
            "severity": self.severity.value,
            "details": self.details,
        }

    def format_for_ui(self) -> str:
        """Format error for display on the terminal."""
        parts = [f"❌ {self.user_message}"]
        if self.suggestion:
            parts.append(f"💡 {self.suggestion}")
        return "\n".join(parts)


class ConfigurationError(TPQError):
    """Error in configuration or command-line arguments."""
    pass


class QuerySyntaxError(TPQError):
    """Twig pattern text does not follow the grammar."""

    def __init__(self, message: str, position: int = -1, **kwargs: Any):
        super().__init__(message, **kwargs)
        self.position = position


class DocumentError(TPQError):
    """XML input could not be labelled."""
    pass


class IndexFormatError(TPQError):
    """Index file is missing, corrupted or truncated."""
    pass


class PlanError(TPQError):
    """Invalid operator parameters."""
    pass


class ContractViolation(TPQError):
    """An operator stream broke its declared ordering."""
    pass


# ============================================================================
# Common Error Factories
# ============================================================================

def query_syntax_error(text: str, position: int, expected: str) -> QuerySyntaxError:
    """Create error for a pattern that fails to parse."""
    shown = text[position:position + 12] or "end of input"
    return QuerySyntaxError(
        message=f"Syntax error at position {position}: expected {expected}, found {shown!r}",
        position=position,
        user_message=f"Cannot parse pattern at position {position}",
        suggestion="Patterns look like //r/$a[./b//$c]//$d; mark output nodes with $",
        details={"pattern": text, "position": position, "expected": expected},
    )


def no_output_node(text: str) -> QuerySyntaxError:
    """Create error for a pattern without any $-marked node."""
    return QuerySyntaxError(
        message=f"No output node marked in {text!r}",
        position=0,
        user_message="Pattern has no output node",
        suggestion="Prefix at least one tag with $, e.g. //$a//b",
        details={"pattern": text},
    )


def output_lca_not_output(text: str, tag: str) -> QuerySyntaxError:
    """Create error for output nodes whose common ancestor is not returned."""
    return QuerySyntaxError(
        message=f"Lowest common ancestor {tag!r} of two output nodes is not an output node",
        position=0,
        user_message=f"Node {tag} joins two output branches and must be marked with $",
        suggestion=f"Mark {tag} as output or move one output node into its branch",
        details={"pattern": text, "tag": tag},
    )


def malformed_document(source: str, reason: str) -> DocumentError:
    """Create error for XML that lxml rejects."""
    return DocumentError(
        message=f"Malformed XML in {source}: {reason}",
        user_message=f"Could not parse XML: {source}",
        suggestion="Check that the file is well-formed UTF-8 XML",
        details={"source": source, "reason": reason},
    )


def empty_document(source: str) -> DocumentError:
    """Create error for an empty XML input."""
    return DocumentError(
        message=f"Empty document: {source}",
        user_message="The XML document is empty",
        suggestion="Provide a document with at least one element",
        severity=ErrorSeverity.WARNING,
        details={"source": source},
    )


def entity_rejected(source: str, name: str) -> DocumentError:
    """Create error for entity references other than the predefined five."""
    return DocumentError(
        message=f"Entity reference &{name}; is not supported in {source}",
        user_message=f"Unsupported entity &{name};",
        suggestion="Only the five predefined XML entities are accepted",
        details={"source": source, "entity": name},
    )


def index_not_found(path: str) -> IndexFormatError:
    """Create error for a missing index file."""
    return IndexFormatError(
        message=f"Index not found: {path}",
        user_message="Index file not found",
        suggestion="Build one with: python scripts/tpq.py index <doc.xml> -o <file.idx>",
        details={"path": path},
    )


def bad_index_magic(path: str) -> IndexFormatError:
    """Create error for a file that is not an index."""
    return IndexFormatError(
        message=f"Bad magic bytes in {path}",
        user_message=f"{path} is not a twig index file",
        suggestion="Rebuild the index with the index command",
        details={"path": path},
    )


def truncated_index(path: str, section: str) -> IndexFormatError:
    """Create error for an index that ends early."""
    return IndexFormatError(
        message=f"Index {path} truncated while reading {section}",
        user_message="Index file is truncated",
        suggestion="Rebuild the index with the index command",
        details={"path": path, "section": section},
    )


def inconsistent_index(path: str, reason: str) -> IndexFormatError:
    """Create error for an index whose contents disagree with its header."""
    return IndexFormatError(
        message=f"Index {path} is inconsistent: {reason}",
        user_message="Index file is corrupted",
        suggestion="Rebuild the index with the index command",
        details={"path": path, "reason": reason},
    )


def unsorted_stream(operator: str, previous: Any, current: Any) -> ContractViolation:
    """Create error for an operator output that went backwards."""
    return ContractViolation(
        message=f"{operator} emitted {current} after {previous}",
        user_message=f"Ordering contract broken by {operator}",
        suggestion="Report the pattern and document; disable TPQ_DEBUG_ASSERTS to skip the check",
        severity=ErrorSeverity.CRITICAL,
        details={"operator": operator},
    )


def invalid_join_spec(reason: str) -> PlanError:
    """Create error for inconsistent join parameters."""
    return PlanError(
        message=f"Invalid join spec: {reason}",
        user_message="Invalid join parameters",
        details={"reason": reason},
    )


def invalid_generator_size(n: int) -> ConfigurationError:
    """Create error for a generator parameter out of range."""
    return ConfigurationError(
        message=f"Generator size must be >= 1, got {n}",
        user_message=f"Invalid document size: {n}",
        suggestion="Use --n with a positive integer",
        details={"n": n},
    )


def unknown_shape(shape: str, valid: list[str]) -> ConfigurationError:
    """Create error for an unknown generator shape."""
    return ConfigurationError(
        message=f"Unknown document shape: {shape}",
        user_message=f"Unknown shape {shape!r}",
        suggestion=f"Choose one of: {', '.join(valid)}",
        details={"shape": shape},
    )


def unknown_engine(name: str, valid: list[str]) -> ConfigurationError:
    """Create error for an unknown engine name."""
    return ConfigurationError(
        message=f"Unknown engine: {name}",
        user_message=f"Unknown engine {name!r}",
        suggestion=f"Choose one of: {', '.join(valid)}",
        details={"engine": name},
    )


# ============================================================================
# Error Formatting
# ============================================================================

def format_exception_for_user(exc: Exception) -> str:
    """
    Format any exception into a user-friendly message.

    Handles both TPQError and standard exceptions.
    """
    if isinstance(exc, TPQError):
        return exc.format_for_ui()

    exc_type = type(exc).__name__
    exc_msg = str(exc)

    friendly_messages = {
        "FileNotFoundError": ("File not found", "Check if the file exists"),
        "PermissionError": ("Permission denied", "Check file permissions"),
        "IsADirectoryError": ("Expected a file, got a directory", "Check the path"),
        "UnicodeDecodeError": ("Input is not valid UTF-8", "Re-encode the file as UTF-8"),
        "ValueError": ("Invalid value", "Check your input"),
    }

    if exc_type in friendly_messages:
        user_msg, suggestion = friendly_messages[exc_type]
        return f"❌ {user_msg}: {exc_msg}\n💡 {suggestion}"

    return f"❌ {exc_type}: {exc_msg}"


def log_error_with_context(
    error: Exception,
    context: str,
    logger: logging.Logger | None = None,
) -> None:
    """
    Log an error with additional context.

    Args:
        error: The exception that occurred
        context: Description of what was happening
        logger: Optional logger instance
    """
    log = logger or logging.getLogger("tpq")

    if isinstance(error, TPQError):
        log.error(
            "%s: %s (severity=%s)",
            context,
            error.message,
            error.severity.value,
            extra={"details": error.details},
        )
    else:
        log.error("%s: %s", context, str(error), exc_info=True)
