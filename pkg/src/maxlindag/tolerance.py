"""Shared numerical tolerances and comparison helpers.

Max-times path products compound rounding, so every equality-based
classification works at a relative tolerance and reports its worst-case
residual next to the boolean verdict.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative tolerance for equality-based classification (max-weighted paths,
# matrix recomposition, recursion feasibility).
DEFAULT_TOL = 1e-9

# Absolute tolerance separating "exactly zero" from "positive" tail
# dependence entries in the clique machinery.
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class Verdict:
    """Boolean classification plus the worst residual that produced it.

    ``residual`` is the largest relative deviation seen among the equality
    checks; ``float("inf")`` marks a structural failure where no residual is
    meaningful.  ``reason`` is a short machine-readable tag, ``None`` when
    the verdict is positive.
    """

    ok: bool
    residual: float
    reason: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "ok", bool(self.ok))
        object.__setattr__(self, "residual", float(self.residual))

    def __bool__(self) -> bool:
        return self.ok


def rel_residual(a: float, b: float) -> float:
    """Relative deviation |a-b| / max(|a|,|b|); zero when both are zero."""
    if a == b:
        return 0.0
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale


def max_rel_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Largest entrywise relative deviation between two arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = np.abs(a - b)
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(diff == 0.0, 0.0, diff / np.where(scale == 0.0, 1.0, scale))
    return float(ratio.max()) if ratio.size else 0.0
