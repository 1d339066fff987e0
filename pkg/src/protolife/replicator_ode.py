"""Replicator dynamics with linear fitness f(x) = W x, integrated by fixed-step RK4."""
from __future__ import annotations

import numpy as np

from .errors import ConfigError, DimensionMismatch, NonFiniteState


def _as_inputs(x, W):
    x = np.asarray(x, dtype=float)
    W = np.asarray(W, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DimensionMismatch("x must be a nonempty vector")
    if W.shape != (x.size, x.size):
        raise DimensionMismatch(f"W has shape {W.shape}, expected {(x.size, x.size)}")
    return x, W


def check_simplex(x, tol=1e-9) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or abs(x.sum() - 1.0) > tol:
        raise ConfigError("frequency vector must be non-negative and sum to 1")
    return x


def constant_fitness(f) -> np.ndarray:
    """W whose every column is ``f``, so that (W x)_i = f_i on the simplex."""
    f = np.asarray(f, dtype=float)
    return np.tile(f[:, None], (1, f.size))


def replicator_rhs(x, W) -> np.ndarray:
    """dx_i = x_i (f_i - mean fitness)."""
    x, W = _as_inputs(x, W)
    f = W @ x
    return x * (f - x @ f)


def integrate(x0, W, t_end: float, dt: float):
    """RK4 from t=0 to ``t_end``; returns (times, states) including both endpoints.

    After every step negative components are clipped to 0 and the state is
    renormalized onto the simplex.  The last step is shortened to land
    exactly on ``t_end``.
    """
    x, W = _as_inputs(x0, W)
    if not dt > 0 or not t_end >= 0:
        raise ConfigError("need dt > 0 and t_end >= 0")
    check_simplex(x)
    n_full = int(np.floor(t_end / dt + 1e-9))
    steps = [dt] * n_full
    rest = t_end - n_full * dt
    if rest > 1e-12 * max(1.0, t_end):
        steps.append(rest)

    def rhs(y):
        f = W @ y
        return y * (f - y @ f)

    times = [0.0]
    states = [x.copy()]
    t = 0.0
    for i, h in enumerate(steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NonFiniteState(f"state became non-finite at step {i + 1}")
        np.clip(x, 0.0, None, out=x)
        x /= x.sum()
        t = t_end if i == len(steps) - 1 else (i + 1) * dt
        times.append(t)
        states.append(x.copy())
    return np.array(times), np.array(states)
