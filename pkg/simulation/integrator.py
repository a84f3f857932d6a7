from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from models.exceptions import Blowup

ZERO_CLAMP = 1e-14
BLOWUP_NORM = 1e6


def rk4_step(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_rk4(field: Callable, x0: Sequence[float], dt: float, T: float) -> Tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4; returns (times, states) with one row per step"""
    if dt <= 0 or T <= dt:
        raise ValueError(f"Need dt > 0 and T > dt, got dt={dt}, T={T}")

    x = np.asarray(x0, dtype=float)
    # invariant subspaces: coordinates starting at 0 stay there
    pinned = x == 0.0
    steps = int(round(T / dt))
    times = np.linspace(0.0, steps * dt, steps + 1)
    states = np.empty((steps + 1, x.size))
    states[0] = x

    for i in range(1, steps + 1):
        x = rk4_step(lambda y: np.asarray(field(y), dtype=float), x, dt)
        x[pinned & (np.abs(x) < ZERO_CLAMP)] = 0.0
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > BLOWUP_NORM:
            raise Blowup(f"|x| exceeded {BLOWUP_NORM:g} at t = {times[i]:.6g}")
        states[i] = x
    return times, states


def count_loops(states: np.ndarray, transverse_index: int, tube: Optional[float] = None) -> Tuple[int, float]:
    """
    Loops around a cycle through two nodes on opposite sides of x1 = 0, and
    the largest |x_transverse| seen (up to the first tube exit when given).
    """
    x1 = states[:, 0]
    transverse = np.abs(states[:, transverse_index])
    end = len(states)
    if tube is not None:
        outside = np.nonzero(transverse >= tube)[0]
        if outside.size:
            end = int(outside[0]) + 1
    signs = np.sign(x1[:end])
    signs = signs[signs != 0]
    crossings = int(np.count_nonzero(signs[1:] != signs[:-1]))
    return crossings // 2, float(transverse[:end].max())
