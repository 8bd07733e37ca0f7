# magblock/core/curves.py

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple


@dataclass(frozen=True)
class CurvePoint:
    x: float
    g2: float
    extra: Tuple[float, ...] = ()

    @property
    def is_gap(self) -> bool:
        return math.isnan(self.g2)


@dataclass(frozen=True)
class CorrelationCurve:
    """
    A g2 sweep: ordered (x, g2, extra...) points plus the parameters it was
    computed with. Points whose evaluation failed are kept as NaN gaps.
    """
    sweep_name: str
    points: Tuple[CurvePoint, ...]
    params: Dict[str, float] = field(default_factory=dict)
    extra_columns: Tuple[str, ...] = ()
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        xs = [p.x for p in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError(f"Curve '{self.sweep_name}' must have strictly increasing x.")
        for p in self.points:
            if not p.is_gap and p.g2 < 0:
                raise ValueError(f"Curve '{self.sweep_name}' has negative g2 {p.g2} at x = {p.x}.")
            if len(p.extra) != len(self.extra_columns):
                raise ValueError(f"Point at x = {p.x} has {len(p.extra)} extra values, "
                                 f"expected {len(self.extra_columns)}.")

    @classmethod
    def from_values(cls, sweep_name: str, xs: Sequence[float], g2s: Sequence[float],
                    params: Optional[Dict[str, float]] = None,
                    extra: Optional[Dict[str, Sequence[float]]] = None,
                    metadata: Optional[Dict[str, str]] = None) -> "CorrelationCurve":
        extra = extra or {}
        columns = tuple(extra)
        points = tuple(
            CurvePoint(float(x), float(g), tuple(float(extra[c][k]) for c in columns))
            for k, (x, g) in enumerate(zip(xs, g2s))
        )
        return cls(sweep_name, points, dict(params or {}), columns, dict(metadata or {}))

    @property
    def xs(self) -> List[float]:
        return [p.x for p in self.points]

    @property
    def g2s(self) -> List[float]:
        return [p.g2 for p in self.points]

    @property
    def gaps(self) -> int:
        return sum(p.is_gap for p in self.points)

    def valid_points(self) -> List[CurvePoint]:
        return [p for p in self.points if not p.is_gap]

    def argmin(self) -> CurvePoint:
        """Lowest point; ties go to the smallest |x|."""
        valid = self.valid_points()
        if not valid:
            raise ValueError(f"Curve '{self.sweep_name}' has no valid points.")
        return min(valid, key=lambda p: (p.g2, abs(p.x)))
