"""Centralized error handling: exceptions to exit codes."""
import functools
import logging
import sys
from typing import Callable

import click
from pydantic import ValidationError

from ..domain.errors import InvariantViolation, SpectralError, StirapError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INVARIANT_VIOLATION = 2
MAX_EXIT_CODE = 125


def exit_code_for(error: BaseException) -> int:
    """1 for bad input (parse, validation, ranges, outputs), 2 for violated invariants."""
    if isinstance(error, (InvariantViolation, SpectralError)):
        return EXIT_INVARIANT_VIOLATION
    return EXIT_INPUT_ERROR


def handle_errors(command: Callable) -> Callable:
    """Wrap a click command: report errors on stderr and exit with the mapped code."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (click.exceptions.Exit, click.ClickException):
            raise
        except StirapError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(exit_code_for(e))
        except ValidationError as e:
            click.echo(f"Error: invalid run configuration\n{e}", err=True)
            sys.exit(EXIT_INPUT_ERROR)
        except OSError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_INPUT_ERROR)
        except Exception as e:
            logger.exception(f"Unexpected failure: {e}")
            click.echo(f"Unexpected error: {e}", err=True)
            sys.exit(EXIT_INPUT_ERROR)
    return wrapper
