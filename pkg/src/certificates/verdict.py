from dataclasses import dataclass, field
from typing import Any, Dict


@dataclass(frozen=True)
class Verdict:
    """Outcome of checking a certificate; truthy iff accepted."""

    accepted: bool
    reason: str = ""
    details: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.accepted

    @classmethod
    def accept(cls, **details) -> "Verdict":
        return cls(True, "", details)

    @classmethod
    def reject(cls, reason: str, **details) -> "Verdict":
        return cls(False, reason, details)

    def summary(self) -> str:
        if self.accepted:
            return "accepted"
        return f"rejected: {self.reason}"
