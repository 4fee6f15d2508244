"""Classical fixed-step RK4 for linear ODEs v' = (A0 + eps(t) A1) v.

The field is held at its sampled values: eps at the step start for the first
stage, the half-grid value for both mid stages, and the step-end value for
the last stage.  A0/A1 may be dense arrays or scipy sparse matrices.
"""

from __future__ import annotations

import numpy as np


def step_bilinear(a0, a1, v, e0: float, eh: float, e1: float, dt: float):
    """One RK4 step of v' = (A0 + eps A1) v with staged field samples."""
    k1 = a0 @ v + e0 * (a1 @ v)
    w = v + (0.5 * dt) * k1
    k2 = a0 @ w + eh * (a1 @ w)
    w = v + (0.5 * dt) * k2
    k3 = a0 @ w + eh * (a1 @ w)
    w = v + dt * k3
    k4 = a0 @ w + e1 * (a1 @ w)
    return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagate_bilinear(a0, a1, values, half_values, v0, dt: float) -> list:
    """All grid-point states of v' = (A0 + eps(t) A1) v, v(0) = v0."""
    out = [np.asarray(v0)]
    v = out[0]
    n = len(half_values)
    for i in range(n):
        v = step_bilinear(a0, a1, v, values[i], half_values[i], values[i + 1], dt)
        out.append(v)
    return out


def step_timed(apply_fn, t: float, v, dt: float):
    """One RK4 step of v' = f(t, v) for a continuous-time generator."""
    k1 = apply_fn(t, v)
    k2 = apply_fn(t + 0.5 * dt, v + (0.5 * dt) * k1)
    k3 = apply_fn(t + 0.5 * dt, v + (0.5 * dt) * k2)
    k4 = apply_fn(t + dt, v + dt * k3)
    return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagate_timed(apply_fn, times, v0) -> list:
    out = [np.asarray(v0)]
    v = out[0]
    for i in range(len(times) - 1):
        v = step_timed(apply_fn, times[i], v, times[i + 1] - times[i])
        out.append(v)
    return out
