from __future__ import annotations

from typing import TYPE_CHECKING

from identifiability.exceptions import ModelValidationError, PreconditionError

if TYPE_CHECKING:
    from sentry_sdk._types import Event, Hint


def before_send(event: Event, hint: Hint) -> Event | None:
    """Bad model files and inapplicable analyses are the user's, not ours."""
    if "exc_info" in hint:
        _, error, _ = hint["exc_info"]
        if isinstance(error, ModelValidationError | PreconditionError):
            return None
    return event
