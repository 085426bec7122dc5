"""Margin reports: the outcome of one inequality check on one instance."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import hermitize, min_eigenvalue, scale_of

DEFAULT_TOLERANCE = 1e-9


def margin(op) -> tuple[float, float]:
    """Normalized minimum eigenvalue of a claimed-positive operator.

    Returns ``(lambda_min / max(1, ||op||_F), ||op||_F)``.
    """
    a = hermitize(op)
    return min_eigenvalue(a) / scale_of(a), float(np.linalg.norm(a))


@dataclass(frozen=True)
class MarginReport:
    check_id: str
    instance_seed: int
    margins: tuple[tuple[str, float], ...]
    passed: bool
    tolerance: float
    scale: float
    instance_index: int = -1
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(
        cls,
        check_id: str,
        margins: list[tuple[str, float, float]],
        *,
        seed: int = 0,
        tolerance: float = DEFAULT_TOLERANCE,
        instance_index: int = -1,
    ) -> MarginReport:
        """Assemble a report from ``(label, normalized value, operator norm)`` triples."""
        values = tuple((label, float(v)) for label, v, _ in margins)
        scale = max((float(s) for _, _, s in margins), default=0.0)
        passed = all(v >= -tolerance for _, v in values)
        return cls(check_id, int(seed), values, passed, float(tolerance), scale, instance_index)

    @property
    def min_margin(self) -> float:
        return min(v for _, v in self.margins)

    @property
    def boundary(self) -> bool:
        """Passed, but some margin lies within the tolerance band around zero."""
        return self.passed and any(abs(v) <= self.tolerance for _, v in self.margins)

    @property
    def status(self) -> str:
        if not self.passed:
            return "FAIL"
        return "pass (boundary)" if self.boundary else "pass"

    def value(self, label: str) -> float:
        for name, v in self.margins:
            if name == label:
                return v
        raise KeyError(label)

    def to_json(self) -> dict:
        return {
            "check_id": self.check_id,
            "seed": self.instance_seed,
            "instance_index": self.instance_index,
            "margins": [{"label": k, "value": v} for k, v in self.margins],
            "passed": self.passed,
            "tolerance": self.tolerance,
            "scale": self.scale,
        }

    @classmethod
    def from_json(cls, obj: dict) -> MarginReport:
        return cls(
            check_id=obj["check_id"],
            instance_seed=int(obj["seed"]),
            margins=tuple((m["label"], float(m["value"])) for m in obj["margins"]),
            passed=bool(obj["passed"]),
            tolerance=float(obj["tolerance"]),
            scale=float(obj.get("scale", 0.0)),
            instance_index=int(obj.get("instance_index", -1)),
        )
