from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    """A parser/checker finding. ``span`` is a half-open byte range into the source."""

    severity: str  # "error" | "warning"
    code: str
    message: str
    span: tuple[int, int] = (0, 0)
    subject: str | None = None  # property name the finding belongs to, when known

    def __post_init__(self):
        if self.severity not in ("error", "warning"):
            raise ValueError(f"bad severity {self.severity!r}")
        if self.severity == "error" and self.span[1] <= self.span[0]:
            raise ValueError("error diagnostics need a nonempty span")

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        where = f"{self.span[0]}-{self.span[1]}"
        subject = f" ({self.subject})" if self.subject else ""
        return f"{self.severity}[{self.code}] {where}{subject}: {self.message}"

    def to_dict(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
            "span": list(self.span),
            "subject": self.subject,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Diagnostic":
        return cls(data["severity"], data["code"], data["message"], tuple(data["span"]), data.get("subject"))


def has_errors(diags) -> bool:
    return any(d.is_error for d in diags)
