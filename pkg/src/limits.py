"""Cap-style knobs: positive int = cap; 0 or negative = no cap."""
import os

from src.errors import DepthCapExceededError


def env_cap(name: str, default: str) -> int | None:
    try:
        v = int(os.getenv(name, default).strip() or default)
    except ValueError:
        v = int(default)
    return None if v <= 0 else v


def env_flag(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


def check_cap(value: int, cap: int | None, what: str) -> None:
    if cap is not None and value > cap:
        raise DepthCapExceededError(f"{what} {value} exceeds cap {cap}")
