"""Generalized strips, piecewise-linear curves and clipping rectangles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from shapely.geometry import LineString, Polygon, box

from .errors import BadPinch, CurvesCross, GeometryError

PINCH_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """A continuous piecewise-linear function given by its breakpoints."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float).ravel()
        ys = np.array(self.ys, dtype=float).ravel()
        if xs.size == 0 or xs.size != ys.size:
            raise ValueError("breakpoint arrays must be non-empty and of equal length")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("breakpoint x-values must be strictly increasing")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]]) -> "PiecewiseLinear":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return cls(pts[:, 0], pts[:, 1])

    @classmethod
    def constant(cls, value: float, lo: float, hi: float) -> "PiecewiseLinear":
        return cls([lo, hi], [value, value])

    @property
    def lo(self) -> float:
        return float(self.xs[0])

    @property
    def hi(self) -> float:
        return float(self.xs[-1])

    def covers(self, lo: float, hi: float, tol: float = 1e-12) -> bool:
        return self.lo <= lo + tol and self.hi >= hi - tol

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)

    def extrema(self, lo: float, hi: float) -> tuple[float, float]:
        """Exact (min, max) over [lo, hi] by scanning the breakpoints."""
        inner = self.xs[(self.xs > lo) & (self.xs < hi)]
        vals = self(np.concatenate(([lo, hi], inner)))
        return float(vals.min()), float(vals.max())

    def points(self) -> list[list[float]]:
        return [[float(x), float(y)] for x, y in zip(self.xs, self.ys)]


@dataclass(frozen=True, eq=False)
class PlanarDomain:
    """Omega = {(x, y) : b_minus(x) < y < b_plus(x), x in x_range}."""

    b_minus: PiecewiseLinear
    b_plus: PiecewiseLinear
    x_range: tuple[float, float]
    pinched_left: bool = False

    @property
    def x_lo(self) -> float:
        return self.x_range[0]

    @property
    def x_hi(self) -> float:
        return self.x_range[1]

    def breakpoints(self) -> np.ndarray:
        lo, hi = self.x_range
        xs = np.concatenate((self.b_minus.xs, self.b_plus.xs, [lo, hi]))
        return np.unique(xs[(xs >= lo) & (xs <= hi)])

    def width(self, x):
        return self.b_plus(x) - self.b_minus(x)

    def polygon(self) -> Polygon:
        xs = self.breakpoints()
        lower = np.column_stack((xs, self.b_minus(xs)))
        upper = np.column_stack((xs, self.b_plus(xs)))[::-1]
        if self.pinched_left:
            upper = upper[:-1]
        return Polygon(np.vstack((lower, upper)))

    def to_dict(self) -> dict:
        return {
            "b_minus": self.b_minus.points(),
            "b_plus": self.b_plus.points(),
            "x_range": [float(self.x_lo), float(self.x_hi)],
            "pinched_left": bool(self.pinched_left),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlanarDomain":
        b_minus = PiecewiseLinear.from_points(d["b_minus"])
        b_plus = PiecewiseLinear.from_points(d["b_plus"])
        if "x_range" in d:
            x_range = tuple(float(v) for v in d["x_range"])
        else:
            x_range = (max(b_minus.lo, b_plus.lo), min(b_minus.hi, b_plus.hi))
        return build_generalized_strip(
            b_minus, b_plus, x_range, bool(d.get("pinched_left", False))
        )


def build_generalized_strip(
    b_minus: PiecewiseLinear,
    b_plus: PiecewiseLinear,
    x_range: tuple[float, float],
    pinched_left: bool = False,
) -> PlanarDomain:
    """Validate the two boundary curves and return the strip between them.

    The gap b_plus - b_minus is piecewise linear with breakpoints in the
    union of both breakpoint sets, so positivity at those points (and at
    the right end) decides positivity on the whole open interval.
    """
    lo, hi = float(x_range[0]), float(x_range[1])
    if not hi > lo:
        raise GeometryError(f"empty x-range [{lo}, {hi}]")
    for name, curve in (("b_minus", b_minus), ("b_plus", b_plus)):
        if not curve.covers(lo, hi):
            raise GeometryError(f"{name} is not defined on [{lo}, {hi}]")
    domain = PlanarDomain(b_minus, b_plus, (lo, hi), bool(pinched_left))
    xs = domain.breakpoints()
    gap = domain.width(xs)
    if pinched_left:
        if abs(gap[0]) > PINCH_TOL:
            raise BadPinch(f"b_minus({lo}) != b_plus({lo}) for a pinched domain")
        interior = gap[1:]
    else:
        interior = gap
    if np.any(interior <= 0):
        bad = xs[1:][interior <= 0] if pinched_left else xs[interior <= 0]
        raise CurvesCross(f"b_minus >= b_plus at x = {bad[0]:.17g}")
    return domain


@dataclass(frozen=True)
class Rectangle:
    """R_{a,b} = [cx - a, cx + a] x [cy - b, cy + b]."""

    a: float
    b: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("rectangle half-sizes must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def x_min(self) -> float:
        return self.center[0] - self.a

    @property
    def x_max(self) -> float:
        return self.center[0] + self.a

    @property
    def y_min(self) -> float:
        return self.center[1] - self.b

    @property
    def y_max(self) -> float:
        return self.center[1] + self.b

    @property
    def diameter(self) -> float:
        return 2.0 * float(np.hypot(self.a, self.b))

    @property
    def eps(self) -> float:
        """Incidence tolerance used for every membership test."""
        return 1e-9 * self.diameter

    def polygon(self) -> Polygon:
        return box(self.x_min, self.y_min, self.x_max, self.y_max)

    def edge(self, name: str) -> LineString:
        x0, x1, y0, y1 = self.x_min, self.x_max, self.y_min, self.y_max
        return {
            "left": LineString([(x0, y0), (x0, y1)]),
            "right": LineString([(x1, y0), (x1, y1)]),
            "bottom": LineString([(x0, y0), (x1, y0)]),
            "top": LineString([(x0, y1), (x1, y1)]),
        }[name]

    def with_half_width(self, a: float) -> "Rectangle":
        return Rectangle(a, self.b, self.center)
