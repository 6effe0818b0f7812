from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .stable import DEFAULT_CAP


@dataclass
class SessionConfig:
    """Engine switches shared by the CLI, the REPL and library callers.

    legacy_coarse: register every definition for contradiction checking.
    auto: let ``run`` skip the global check when the relevant program is
        definite or stratified.
    oracle: compute stable models by plain 2^N enumeration.
    cap: largest number of atoms enumerated at once.
    steps: budget of search steps for definite resolution (None = unbounded).
    mode: force every run form to ``"run"`` or ``"run-partial"``.
    """

    legacy_coarse: bool = False
    auto: bool = False
    oracle: bool = False
    cap: int = DEFAULT_CAP
    steps: Optional[int] = None
    occurs_check: bool = False
    mode: Optional[str] = None
    show_models: bool = False

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("cap must be at least 1")
        if self.mode not in (None, "run", "run-partial"):
            raise ValueError(f"unknown mode {self.mode!r}")
