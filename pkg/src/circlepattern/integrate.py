"""Dormand-Prince 5(4) stepping with PI step-size control.

The stepper is driven one accepted step at a time so the caller can inspect
the state (and the FSAL derivative at it) between steps and stop on its own
criteria.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Butcher tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B - _B_LOW

ORDER = 5


class StepSizeUnderflow(RuntimeError):
    pass


@dataclass
class StepInfo:
    t: float
    y: np.ndarray
    dy: np.ndarray  # f(t, y) at the accepted point
    h: float
    rejected: int


class DormandPrince:
    """Adaptive explicit integrator for ``y' = f(t, y)``.

    Parameters
    ----------
    fun : callable
        Right-hand side ``f(t, y) -> ndarray``.
    t0, y0 :
        Initial time and state.
    abs_tol, rel_tol : float
        Mixed error tolerance, ``abs_tol + rel_tol * |y|`` per component.
    max_step : float
        Upper bound on the step size.
    first_step : float, optional
        Initial step; chosen from the derivative scale when omitted.
    """

    safety = 0.9
    fac_min = 0.2
    fac_max = 5.0
    # Gustafsson PI gains for an error estimate of order 4
    beta1 = 0.7 / ORDER
    beta2 = 0.4 / ORDER

    def __init__(self, fun: Callable[[float, np.ndarray], np.ndarray], t0: float,
                 y0, abs_tol: float = 1e-10, rel_tol: float = 1e-10,
                 max_step: float = np.inf, first_step: float | None = None,
                 min_step: float = 1e-14):
        self.fun = fun
        self.t = float(t0)
        self.y = np.array(y0, dtype=float)
        self.dy = np.asarray(fun(self.t, self.y), dtype=float)
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.max_step = max_step
        self.min_step = min_step
        self.err_prev = 1.0
        self.nfev = 1
        if first_step is None:
            scale = abs_tol + rel_tol * np.abs(self.y)
            d0 = np.sqrt(np.mean((self.y / scale) ** 2))
            d1 = np.sqrt(np.mean((self.dy / scale) ** 2))
            first_step = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        self.h = min(first_step, max_step)

    def _attempt(self, h: float):
        k = np.empty((7, self.y.size))
        k[0] = self.dy
        for s in range(1, 7):
            ys = self.y + h * (np.asarray(_A[s]) @ k[:s])
            k[s] = self.fun(self.t + _C[s] * h, ys)
        self.nfev += 6
        y_new = self.y + h * (_B[:6] @ k[:6])
        err_vec = h * (_E @ k)
        scale = self.abs_tol + self.rel_tol * np.maximum(np.abs(self.y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        return y_new, k[6], err

    def step(self, t_bound: float = np.inf) -> StepInfo:
        """Advance by one accepted step, never past ``t_bound``."""
        rejected = 0
        while True:
            h = min(self.h, self.max_step, t_bound - self.t)
            if h < self.min_step * max(1.0, abs(self.t)):
                raise StepSizeUnderflow(f"step size {h:.3g} underflow at t={self.t:.6g}")
            y_new, dy_new, err = self._attempt(h)
            if not np.isfinite(err):
                self.h = h * self.fac_min
                rejected += 1
                continue
            if err <= 1.0:
                err = max(err, 1e-10)
                fac = self.safety * err ** -self.beta1 * self.err_prev ** self.beta2
                fac = min(self.fac_max, max(self.fac_min, fac))
                self.err_prev = err
                self.t += h
                self.y = y_new
                self.dy = np.asarray(dy_new, dtype=float)
                self.h = h * fac
                return StepInfo(self.t, self.y, self.dy, h, rejected)
            fac = max(self.fac_min, self.safety * err ** (-1.0 / ORDER))
            self.h = h * fac
            rejected += 1

    def fixed_step(self, h: float) -> np.ndarray:
        """Take one step of exactly ``h`` (no error control); used for order checks."""
        y_new, dy_new, _ = self._attempt(h)
        self.t += h
        self.y = y_new
        self.dy = np.asarray(dy_new, dtype=float)
        return self.y
