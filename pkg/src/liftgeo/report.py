"""Check reports and residual bookkeeping."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

PASS, FAIL, FLAGGED = "pass", "fail", "flagged"


@dataclass
class CheckReport:
    name: str
    verdict: str
    max_residual: float
    tolerance: float
    sample_count: int
    seed: int | None = None
    details: list[dict[str, Any]] = field(default_factory=list)
    interpretation_flags: list[str] = field(default_factory=list)
    parameters: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.name,
            "verdict": self.verdict,
            "max_residual": _clean(self.max_residual),
            "tolerance": self.tolerance,
            "seed": self.seed,
            "samples": self.sample_count,
            "worst_cases": [_clean(d) for d in self.details],
            "interpretation_flags": list(self.interpretation_flags),
            "parameters": _clean(self.parameters),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def summary(self) -> str:
        return (
            f"{self.name}: {self.verdict.upper()} "
            f"(max residual {self.max_residual:.3e}, tol {self.tolerance:.1e}, {self.sample_count} samples)"
        )


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


class ResidualTracker:
    """Running max of residuals, keeping the ``keep`` worst locations."""

    def __init__(self, keep: int = 5):
        self.keep = keep
        self.max = 0.0
        self.count = 0
        self.worst: list[dict[str, Any]] = []

    def add(self, residual: float, point: Sequence[float] | None = None, indices=None, **extra) -> None:
        residual = float(residual)
        if not math.isfinite(residual):
            residual = math.inf
        self.max = max(self.max, residual)
        entry = {"point": [float(v) for v in point] if point is not None else None,
                 "indices": _clean(indices),
                 "residual": residual}
        entry.update(extra)
        self.worst.append(entry)
        self.worst.sort(key=lambda d: -d["residual"])
        del self.worst[self.keep:]

    def add_array(self, residuals: np.ndarray, point: Sequence[float] | None = None, label: str | None = None) -> None:
        """Record the largest entry of an array of residuals, with its index tuple."""
        residuals = np.abs(np.asarray(residuals, dtype=float))
        self.count += 1
        if residuals.size == 0:
            return
        flat = int(np.nanargmax(np.where(np.isfinite(residuals), residuals, np.inf)))
        idx = np.unravel_index(flat, residuals.shape)
        extra = {"block": label} if label else {}
        self.add(residuals[idx], point, [int(i) for i in idx], **extra)

    def report(self, name: str, tol: float, samples: int, seed: int | None = None,
               flagged: bool = False, flags: Sequence[str] = (), **parameters) -> CheckReport:
        if flagged:
            verdict = FLAGGED
        else:
            verdict = PASS if self.max <= tol else FAIL
        return CheckReport(name, verdict, self.max, tol, samples, seed, list(self.worst),
                           list(flags), dict(parameters))
