"""Classical fourth-order Runge-Kutta stepping on uniform grids."""

import numpy as np


def rk4(rhs, y0, times):
    """Integrate ``y' = rhs(t, y)`` along ``times`` (may be decreasing).

    Returns an array of shape ``(len(times),) + y0.shape`` whose first row is
    ``y0``.
    """
    times = np.asarray(times, dtype=float)
    y = np.array(y0, dtype=float)
    out = np.empty((times.size,) + y.shape)
    out[0] = y
    for k in range(times.size - 1):
        t, h = times[k], times[k + 1] - times[k]
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = y
    return out


def backward_linear(op, terminal, T, M):
    """Solve ``y'(t) = -op(y(t))`` on ``[0, T]`` from ``y(T) = terminal``.

    ``op`` is a linear, time-independent map. Integration runs in reversed
    time ``s = T - t`` with ``M`` uniform RK4 steps; the result is indexed by
    increasing ``t`` (row 0 is ``t = 0``).
    """
    s = np.linspace(0.0, T, M + 1)
    path = rk4(lambda _s, y: op(y), terminal, s)
    return path[::-1].copy()


def time_grid(T, M):
    return np.linspace(0.0, T, M + 1)


def trapezoid(values, times, axis=0):
    return np.trapezoid(values, times, axis=axis)


def simpson(values, times, axis=0):
    """Composite Simpson rule on a uniform grid with an even number of steps."""
    values = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = values.shape[0] - 1
    if n % 2:
        raise ValueError("simpson needs an even number of steps, got %d" % n)
    h = (times[-1] - times[0]) / n
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (h / 3.0) * np.tensordot(w, values, axes=(0, 0))
