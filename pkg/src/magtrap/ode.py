"""Deterministic ODE integrators.

Fixed-step classical RK4 produces the recorded trajectories (bit-identical
output across runs and platforms is part of the file-format contract), and
an adaptive Dormand-Prince 5(4) pair handles stiff-tolerance jobs such as
monodromy matrices.  Both accept an optional ``postprocess(y) -> y`` hook
applied after every accepted step; the rigid-body routes use it to
renormalize quaternions.

scipy's solvers are deliberately not used here; the test suite integrates
the same problems with scipy as an independent oracle.
"""

from __future__ import annotations

import numpy as np


def rk4_step(f, t, y, dt):
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_fixed(f, t0, y0, dt, nsteps, record_every=1, postprocess=None):
    """RK4 with ``nsteps`` equal steps from ``t0``.

    Returns ``(ts, ys)`` where row k of ``ys`` is the state after
    ``k * record_every`` steps (row 0 is the initial state).
    """
    y = np.array(y0, dtype=float)
    nrec = nsteps // record_every
    ts = np.empty(nrec + 1)
    ys = np.empty((nrec + 1,) + y.shape)
    ts[0], ys[0] = t0, y
    t = t0
    idx = 1
    for k in range(1, nsteps + 1):
        # recompute t from the step index: repeated addition drifts
        y = rk4_step(f, t, y, dt)
        if postprocess is not None:
            y = postprocess(y)
        t = t0 + k * dt
        if k % record_every == 0:
            ts[idx], ys[idx] = t, y
            idx += 1
    return ts[:idx], ys[:idx]


# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def integrate_adaptive(f, t0, y0, t1, atol=1e-12, rtol=1e-10, h0=None, max_step=np.inf, postprocess=None):
    """Dormand-Prince 5(4) from ``t0`` to ``t1``; returns the final state.

    Error per step is kept under ``atol + rtol * |y|`` (RMS over
    components).  Step-size changes are clamped to [0.2, 5.0] with a 0.9
    safety factor.
    """
    y = np.array(y0, dtype=float)
    t = t0
    span = t1 - t0
    if span == 0.0:
        return y
    h = h0 if h0 is not None else span / 100.0
    h = min(h, max_step, span)
    nfail = 0
    while t < t1:
        h = min(h, t1 - t)
        k = np.empty((7,) + y.shape)
        k[0] = f(t, y)
        for i in range(1, 7):
            k[i] = f(t + _DP_C[i] * h, y + h * (_DP_A[i] @ k[: len(_DP_A[i])].reshape(len(_DP_A[i]), -1)).reshape(y.shape))
        y5 = y + h * (_DP_B5 @ k.reshape(7, -1)).reshape(y.shape)
        y4 = y + h * (_DP_B4 @ k.reshape(7, -1)).reshape(y.shape)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = np.sqrt(np.mean(((y5 - y4) / scale) ** 2))
        if err <= 1.0:
            t = t + h
            y = y5
            if postprocess is not None:
                y = postprocess(y)
            nfail = 0
        else:
            nfail += 1
            if nfail > 64:
                raise RuntimeError("adaptive integrator stalled: step rejected 64 times")
        factor = 0.9 * (1.0 / max(err, 1e-300)) ** 0.2
        h = h * min(5.0, max(0.2, factor))
        h = min(h, max_step)
        if t + h == t:
            raise RuntimeError("adaptive integrator step underflow")
    return y
