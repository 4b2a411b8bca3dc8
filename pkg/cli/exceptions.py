from contextlib import contextmanager
from typing import Optional
import logging

from django.core.management.base import CommandError

from certificates.exceptions import CertificateError
from games.exceptions import EnumerationCapExceeded
from Engines.limit_engine.exceptions import ExactModeCapExceeded

logger = logging.getLogger(__name__)

EXIT_REJECTED = 1
EXIT_INVALID = 2
EXIT_CAP = 3


class GameDocumentError(ValueError):
    """A game or certificate document that cannot be read, with the line and column of syntax errors."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.line = line
        self.column = column


@contextmanager
def exit_codes():
    """Translate solver errors into CommandError with the documented return codes."""
    try:
        yield
    except (EnumerationCapExceeded, ExactModeCapExceeded) as exc:
        logger.error(f"Size cap exceeded: {exc}")
        raise CommandError(str(exc), returncode=EXIT_CAP) from exc
    except (CertificateError, ValueError) as exc:
        logger.error(f"Invalid input: {exc}")
        raise CommandError(str(exc), returncode=EXIT_INVALID) from exc
