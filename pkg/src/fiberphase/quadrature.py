"""Composite Simpson quadrature on sampled grids, uniform or not.

`integrate` consumes samples in panes of two consecutive intervals and
is exact for quadratics; when the interval count is odd the final
interval is integrated with the quadratic through the last three
samples.  `cumulative_dense` produces a running integral at every
sample from per-interval quadratic pieces; both rules are fourth-order
under grid refinement.
"""

from __future__ import annotations

import numpy as np


def _pane(y0: float, y1: float, y2: float, h1: float, h2: float) -> float:
    # Exact for quadratics on the nonuniform pane (t0, t0+h1, t0+h1+h2).
    return (h1 + h2) / 6.0 * (
        (2.0 - h2 / h1) * y0 + ((h1 + h2) ** 2 / (h1 * h2)) * y1 + (2.0 - h1 / h2) * y2
    )


def _trailing(y0: float, y1: float, y2: float, h1: float, h2: float) -> float:
    # Quadratic through three samples, integrated over the last interval.
    return (
        -y0 * h2**3 / (6.0 * h1 * (h1 + h2))
        + y1 * (h2**2 + 3.0 * h1 * h2) / (6.0 * h1)
        + y2 * (2.0 * h2**2 + 3.0 * h1 * h2) / (6.0 * (h1 + h2))
    )


def _leading(y0: float, y1: float, y2: float, h1: float, h2: float) -> float:
    # Quadratic through three samples, integrated over the first interval.
    return (
        y0 * (2.0 * h1**2 + 3.0 * h1 * h2) / (6.0 * (h1 + h2))
        + y1 * (h1**2 + 3.0 * h1 * h2) / (6.0 * h2)
        - y2 * h1**3 / (6.0 * h2 * (h1 + h2))
    )


def _validate(y: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.shape != x.shape or y.ndim != 1:
        raise ValueError("y and x must be 1-D arrays of equal length")
    if np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing")
    return y, x


def integrate(y: np.ndarray, x: np.ndarray) -> float:
    """Composite Simpson integral of sampled y(x) over the whole grid."""
    y, x = _validate(y, x)
    n = len(x)
    if n < 2:
        raise ValueError("need at least two samples")
    if n == 2:
        return float(0.5 * (y[0] + y[1]) * (x[1] - x[0]))
    total = 0.0
    i = 0
    while i + 2 < n:
        total += _pane(y[i], y[i + 1], y[i + 2], x[i + 1] - x[i], x[i + 2] - x[i + 1])
        i += 2
    if i + 2 == n:  # one interval left over
        total += _trailing(y[n - 3], y[n - 2], y[n - 1], x[n - 2] - x[n - 3], x[n - 1] - x[n - 2])
    return float(total)


def cumulative_dense(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Running integral of sampled y(x), one value per sample.

    Interval i is integrated with the quadratic through samples
    (i-1, i, i+1), except the first interval which uses (0, 1, 2).
    """
    y, x = _validate(y, x)
    n = len(x)
    if n < 3:
        raise ValueError("need at least three samples")
    h = np.diff(x)
    pieces = np.empty(n - 1)
    pieces[0] = _leading(y[0], y[1], y[2], h[0], h[1])
    for i in range(1, n - 1):
        pieces[i] = _trailing(y[i - 1], y[i], y[i + 1], h[i - 1], h[i])
    out = np.empty(n)
    out[0] = 0.0
    np.cumsum(pieces, out=out[1:])
    return out
