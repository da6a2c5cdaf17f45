"""Global enumeration cap, overridable via the BOTTOMFORGE_CAP env var."""

import os

DEFAULT_CAP = 2_000_000

_override: int | None = None


def get_cap() -> int:
    if _override is not None:
        return _override
    env = os.environ.get("BOTTOMFORGE_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_CAP


def set_cap(value: int | None) -> None:
    global _override
    _override = value
