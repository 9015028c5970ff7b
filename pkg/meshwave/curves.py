from __future__ import annotations

import bisect

import chz
import numpy as np

from meshwave.errors import OutOfRange

_TOLERANCE = 1e-12


class PiecewiseLinear:
    """Mixin for chz curves through (x, y) anchors, linear between neighbouring anchors.

    Subclasses declare the ``anchors`` field. Lookups are only defined on [first anchor, last
    anchor]; there is no extrapolation.
    """

    anchors: tuple[tuple[float, float], ...]

    @chz.validate
    def _strictly_increasing(self) -> None:
        if not self.anchors:
            raise ValueError("curve needs at least one anchor")
        xs = [x for x, _ in self.anchors]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError(f"curve anchors must be strictly increasing in x, got {xs}")

    @property
    def xs(self) -> np.ndarray:
        return np.array([x for x, _ in self.anchors], dtype=float)

    @property
    def ys(self) -> np.ndarray:
        return np.array([y for _, y in self.anchors], dtype=float)

    @property
    def domain(self) -> tuple[float, float]:
        return self.anchors[0][0], self.anchors[-1][0]

    def __call__(self, x: float) -> float:
        lo, hi = self.domain
        if not lo - _TOLERANCE <= x <= hi + _TOLERANCE:
            raise OutOfRange(f"{x} is outside the curve domain [{lo}, {hi}]")
        return float(np.interp(x, self.xs, self.ys))

    def slopes(self) -> list[float]:
        return [
            (y1 - y0) / (x1 - x0)
            for (x0, y0), (x1, y1) in zip(self.anchors, self.anchors[1:])
        ]

    def forward_slope(self, x: float) -> float:
        """Slope of the segment that starts at or before x; the last segment past the end."""
        slopes = self.slopes()
        if not slopes:
            return 0.0
        # nudge so that a point sitting on an anchor (up to float noise) picks the next segment
        i = bisect.bisect_right([a for a, _ in self.anchors], x + _TOLERANCE) - 1
        return slopes[min(max(i, 0), len(slopes) - 1)]

    def is_monotone(self) -> bool:
        return all(s >= -_TOLERANCE for s in self.slopes())

    def is_concave(self, start: int = 0) -> bool:
        """Successive segment slopes never increase, ignoring the first ``start`` segments."""
        slopes = self.slopes()[start:]
        return all(b <= a + _TOLERANCE for a, b in zip(slopes, slopes[1:]))


@chz.chz
class Curve(PiecewiseLinear):
    anchors: tuple[tuple[float, float], ...]
