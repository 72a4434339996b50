from __future__ import annotations

from typing import Any, Optional


class DomainError(Exception):
    """A domain rule was violated; the CLI reports it with exit code 1."""

    def __init__(self, code: str, detail: str, witness: Optional[Any] = None) -> None:
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail
        self.witness = witness

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"error": self.code, "detail": self.detail}
        if self.witness is not None:
            payload["witness"] = self.witness
        return payload
