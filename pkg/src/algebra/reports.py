"""Pydantic report models returned by every checker."""

from typing import Any, Optional

from pydantic import BaseModel, Field


class Failure(BaseModel):
    """One located violation."""

    label: str
    k: Optional[int] = None
    beta: Optional[list[int]] = None
    detail: str = ""


class VerificationReport(BaseModel):
    """Outcome of a check, with located failures and truncation metadata."""

    name: str
    passed: bool = True
    checked: int = 0
    skipped: int = 0
    failures: list[Failure] = Field(default_factory=list)
    metadata: dict[str, Any] = Field(default_factory=dict)
    children: list["VerificationReport"] = Field(default_factory=list)

    def fail(self, label: str, detail: str = "", k: Optional[int] = None, beta=None) -> "VerificationReport":
        self.passed = False
        self.failures.append(Failure(label=label, k=k, beta=list(beta) if beta is not None else None, detail=detail))
        return self

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        """Adds a sub-report; the parent fails when the child does."""
        self.children.append(other)
        self.checked += other.checked
        self.skipped += other.skipped
        if not other.passed:
            self.passed = False
            self.failures.extend(other.failures)
        return self

    @property
    def first_failure(self) -> Optional[Failure]:
        return self.failures[0] if self.failures else None

    def labels(self) -> list[str]:
        return [f.label for f in self.failures]

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{self.name}: {status} ({self.checked} checked, {self.skipped} skipped)"
        if self.failures:
            f = self.failures[0]
            where = f" at k={f.k}, beta={f.beta}" if f.k is not None else ""
            text += f"; first failure {f.label}{where}: {f.detail}"
        return text


VerificationReport.model_rebuild()
