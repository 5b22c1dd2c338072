"""ISO-8601 timestamps at second precision, normalized to UTC."""

from __future__ import annotations

import re
from datetime import datetime, timezone

_TS_RE = re.compile(
    r"(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(Z|[+-]\d{2}:\d{2})"
)


class MalformedTimestamp(ValueError):
    pass


def parse_timestamp(text: str) -> datetime:
    """Parse ``text`` into an aware UTC datetime.

    An explicit offset is required and fractional seconds are rejected, so
    two timestamps compare equal only if they denote the same second.
    """
    m = _TS_RE.fullmatch(text.strip())
    if m is None:
        raise MalformedTimestamp(f"not an ISO-8601 second-precision timestamp: {text!r}")
    try:
        value = datetime.fromisoformat(m.group(0).replace("Z", "+00:00"))
    except ValueError as exc:
        raise MalformedTimestamp(f"{text!r}: {exc}") from None
    return value.astimezone(timezone.utc)


def format_timestamp(value: datetime) -> str:
    return value.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
