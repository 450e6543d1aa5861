"""Least-squares fits used for the correlation hypotheses."""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple


class LinearFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


class ExponentialFit(NamedTuple):
    amplitude: float
    rate: float
    r_squared: float


def linear_regression(points: Iterable[tuple[float, float]]) -> LinearFit:
    """Ordinary least squares for ``y = slope * x + intercept``.

    ``r_squared = 1 - SS_res / SS_tot``, taken as 0 when y is constant.
    """
    pts = [(float(x), float(y)) for x, y in points]
    n = len(pts)
    if n < 2:
        raise ValueError("linear regression needs at least two points")
    mx = math.fsum(x for x, _ in pts) / n
    my = math.fsum(y for _, y in pts) / n
    sxx = math.fsum((x - mx) ** 2 for x, _ in pts)
    if sxx == 0:
        raise ValueError("linear regression needs at least two distinct x values")
    sxy = math.fsum((x - mx) * (y - my) for x, y in pts)
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_tot = math.fsum((y - my) ** 2 for _, y in pts)
    if ss_tot == 0:
        return LinearFit(slope, intercept, 0.0)
    ss_res = math.fsum((y - (slope * x + intercept)) ** 2 for x, y in pts)
    return LinearFit(slope, intercept, 1.0 - ss_res / ss_tot)


def exponential_fit(points: Iterable[tuple[float, float]]) -> ExponentialFit:
    """Fit ``y = amplitude * exp(rate * x)`` by least squares on ``ln y``.

    The reported R² is that of the log-space line.
    """
    pts = list(points)
    if any(y <= 0 for _, y in pts):
        raise ValueError("exponential fit needs strictly positive y values")
    fit = linear_regression((x, math.log(y)) for x, y in pts)
    return ExponentialFit(math.exp(fit.intercept), fit.slope, fit.r_squared)
