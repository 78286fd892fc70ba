"""Randomized analytic-versus-finite-difference gradient check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .geometry import Geometry, inner_angle_gradient

__all__ = ["GradcheckResult", "reference_angle", "gradient_check"]

R_RANGE = (0.01, 10.0)
PHI_RANGE = (0.05, math.pi - 0.05)


def reference_angle(g: Geometry | str, r_i, r_j, phi, dps: int = 60):
    """Inner angle from the law of cosines, evaluated in ``dps``-digit arithmetic."""
    g = Geometry.parse(g)
    with mpmath.workdps(dps):
        ri, rj, p = mpmath.mpf(r_i), mpmath.mpf(r_j), mpmath.mpf(phi)
        if g is Geometry.EUCLIDEAN:
            l = mpmath.sqrt(ri**2 + rj**2 + 2 * ri * rj * mpmath.cos(p))
            return mpmath.acos((l**2 + ri**2 - rj**2) / (2 * l * ri))
        cl = mpmath.cosh(ri) * mpmath.cosh(rj) + mpmath.sinh(ri) * mpmath.sinh(rj) * mpmath.cos(p)
        l = mpmath.acosh(cl)
        return mpmath.acos((cl * mpmath.cosh(ri) - mpmath.cosh(rj)) / (mpmath.sinh(l) * mpmath.sinh(ri)))


@dataclass
class GradcheckResult:
    geometry: Geometry
    samples: int
    max_rel_error: float
    worst_sample: tuple[float, float, float]
    signs_ok: bool
    threshold: float

    @property
    def passed(self) -> bool:
        return self.signs_ok and self.max_rel_error < self.threshold


def gradient_check(samples: int = 1000, seed: int = 42, step: float = 1e-6,
                   threshold: float = 1e-6, dps: int = 60) -> list[GradcheckResult]:
    """Compare analytic angle gradients with central differences.

    The difference quotients use the given ``step`` but evaluate the angle
    in extended precision; in double precision the rounding error of the
    quotient alone exceeds the smallest derivatives in the sampled range.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    out = []
    for g in Geometry:
        rng = np.random.default_rng(seed)
        ri = rng.uniform(*R_RANGE, samples)
        rj = rng.uniform(*R_RANGE, samples)
        phi = rng.uniform(*PHI_RANGE, samples)
        gi, gj = inner_angle_gradient(g, ri, rj, phi)
        gi, gj = np.atleast_1d(gi), np.atleast_1d(gj)
        worst, worst_at = 0.0, (0.0, 0.0, 0.0)
        with mpmath.workdps(dps):
            h = mpmath.mpf(step)
            for k in range(samples):
                a, b, p = ri[k], rj[k], phi[k]
                fi = (reference_angle(g, a + h, b, p, dps) - reference_angle(g, a - h, b, p, dps)) / (2 * h)
                fj = (reference_angle(g, a, b + h, p, dps) - reference_angle(g, a, b - h, p, dps)) / (2 * h)
                err = max(abs((gi[k] - fi) / fi), abs((gj[k] - fj) / fj))
                if err > worst:
                    worst, worst_at = float(err), (float(a), float(b), float(p))
        signs = bool(np.all(gi < 0) and np.all(gj > 0))
        out.append(GradcheckResult(g, samples, worst, worst_at, signs, threshold))
    return out
