"""Two-circle configuration kernels in Euclidean and hyperbolic geometry.

Two circles of radii ``r_i`` and ``r_j`` meeting at exterior intersection
angle ``phi`` span a triangle whose corners are the two centers and one
intersection point.  The side between the centers has length ``l`` and the
angle at the intersection point is ``pi - phi``.  ``theta_i`` denotes the
inner angle at the center of circle ``i``.

Angles are evaluated with the side-angle-side form

    tan(theta_i) = sin(phi) tanh(r_j) / (cosh(r_i) (tanh(r_i) + cos(phi) tanh(r_j)))

(with ``tanh``/``cosh`` replaced by the identity/one in the Euclidean case).
It agrees with the law of cosines but keeps full relative precision when
the radii are tiny, which is the regime a collapsing flow visits.

The public scalar functions validate their inputs; the ``*_from_log``
kernels used by the flow engine work directly in log coordinates and skip
validation.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .complex import Triangulation, WeightedComplex, euler_characteristic

__all__ = [
    "Geometry",
    "GeometryRangeError",
    "R_MIN",
    "HYPERBOLIC_R_MAX",
    "edge_length",
    "inner_angle",
    "inner_angle_gradient",
    "corner_angles",
    "vertex_sums",
    "cone_angle",
    "cone_angles",
    "curvature_vector",
    "CurvatureVector",
    "hyperbolic_area",
    "gauss_bonnet_residual",
    "radii_to_log",
    "log_to_radii",
]

R_MIN = 1e-12
HYPERBOLIC_R_MAX = 40.0
TWO_PI = 2.0 * math.pi


class Geometry(str, Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"

    @classmethod
    def parse(cls, value: "Geometry | str") -> "Geometry":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown geometry {value!r}") from None


class GeometryRangeError(ValueError):
    """Kernel arguments outside the supported numeric range."""


def _check(g: Geometry, ri, rj, phi):
    ri = np.asarray(ri, dtype=float)
    rj = np.asarray(rj, dtype=float)
    phi = np.asarray(phi, dtype=float)
    for name, r in (("r_i", ri), ("r_j", rj)):
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise GeometryRangeError(f"{name} must be positive and finite")
        if np.any(r < R_MIN):
            raise GeometryRangeError(f"{name} below {R_MIN:g} is degenerate")
        if g is Geometry.HYPERBOLIC and np.any(r > HYPERBOLIC_R_MAX):
            raise GeometryRangeError(
                f"hyperbolic {name} above the cap {HYPERBOLIC_R_MAX:g}"
            )
    if not np.all((phi > 0) & (phi < math.pi)):
        raise GeometryRangeError("phi must lie in (0, pi)")
    return ri, rj, phi


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def edge_length(g: Geometry | str, r_i, r_j, phi):
    """Distance between the two centers.

    Uses the half-angle forms ``(l/2)^2 = s^2 cos^2(phi/2) + d^2 sin^2(phi/2)``
    (Euclidean, ``s``/``d`` the half sum/difference of the radii) and its
    hyperbolic counterpart with ``sinh`` applied to every length; both are
    algebraically equal to the cosine-law expressions and free of
    cancellation.
    """
    g = Geometry.parse(g)
    ri, rj, phi = _check(g, r_i, r_j, phi)
    c2, s2 = np.cos(phi / 2) ** 2, np.sin(phi / 2) ** 2
    if g is Geometry.EUCLIDEAN:
        half = np.sqrt(((ri + rj) / 2) ** 2 * c2 + ((ri - rj) / 2) ** 2 * s2)
        return _scalar(2 * half)
    sh = np.sqrt(np.sinh((ri + rj) / 2) ** 2 * c2 + np.sinh((ri - rj) / 2) ** 2 * s2)
    return _scalar(2 * np.arcsinh(sh))


def _euclid_angles(ri, rj, phi):
    s, c = np.sin(phi), np.cos(phi)
    return np.arctan2(rj * s, ri + rj * c)


def _hyper_angles(tanh_i, tanh_j, sech_i, phi):
    s, c = np.sin(phi), np.cos(phi)
    return np.arctan2(s * tanh_j * sech_i, tanh_i + c * tanh_j)


def inner_angle(g: Geometry | str, r_i, r_j, phi):
    """Inner angle at the center of circle ``i``, in ``(0, pi)``."""
    g = Geometry.parse(g)
    ri, rj, phi = _check(g, r_i, r_j, phi)
    if g is Geometry.EUCLIDEAN:
        return _scalar(_euclid_angles(ri, rj, phi))
    return _scalar(_hyper_angles(np.tanh(ri), np.tanh(rj), 1 / np.cosh(ri), phi))


def inner_angle_gradient(g: Geometry | str, r_i, r_j, phi):
    """Partial derivatives ``(d theta_i / d r_i, d theta_i / d r_j)``.

    Computed from the derivatives of ``f = cos(theta_i)``::

        Euclidean   df/dr_i =  r_j^2 sin^2(phi) / l^3
                    df/dr_j = -r_i r_j sin^2(phi) / l^3
        hyperbolic  df/dr_i =  sinh^2(r_j) cosh(l) sin^2(phi) / sinh^3(l)
                    df/dr_j = -sinh(r_i) sinh(r_j) sin^2(phi) / sinh^3(l)

    and ``d theta = -df / sin(theta)`` with ``sin(theta_i)`` from the law of
    sines.  The first component is negative and the second positive.
    """
    g = Geometry.parse(g)
    ri, rj, phi = _check(g, r_i, r_j, phi)
    sphi = np.sin(phi)
    c2, s2 = np.cos(phi / 2) ** 2, np.sin(phi / 2) ** 2
    if g is Geometry.EUCLIDEAN:
        l = 2 * np.sqrt(((ri + rj) / 2) ** 2 * c2 + ((ri - rj) / 2) ** 2 * s2)
        df_i = rj**2 * sphi**2 / l**3
        df_j = -ri * rj * sphi**2 / l**3
        sin_t = rj * sphi / l
    else:
        sh_half = np.sqrt(np.sinh((ri + rj) / 2) ** 2 * c2 + np.sinh((ri - rj) / 2) ** 2 * s2)
        sinh_l = 2 * sh_half * np.sqrt(1 + sh_half**2)
        cosh_l = 1 + 2 * sh_half**2
        df_i = np.sinh(rj) ** 2 * cosh_l * sphi**2 / sinh_l**3
        df_j = -np.sinh(ri) * np.sinh(rj) * sphi**2 / sinh_l**3
        sin_t = np.sinh(rj) * sphi / sinh_l
    return _scalar(-df_i / sin_t), _scalar(-df_j / sin_t)


# --- log coordinates -------------------------------------------------------

def radii_to_log(g: Geometry | str, radii) -> np.ndarray:
    """``u = ln r`` (Euclidean) or ``u = ln tanh(r/2)`` (hyperbolic)."""
    g = Geometry.parse(g)
    r = np.asarray(radii, dtype=float)
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise GeometryRangeError("radii must be positive and finite")
    if g is Geometry.EUCLIDEAN:
        return np.log(r)
    # for large r, tanh(r/2) = 1 - 2 / (e^r + 1) and log1p keeps precision
    small = r < 1.0
    u = np.empty_like(r)
    u[small] = np.log(np.tanh(r[small] / 2))
    with np.errstate(over="ignore"):
        u[~small] = np.log1p(-2.0 / (np.exp(r[~small]) + 1.0))
    return u


def log_to_radii(g: Geometry | str, u) -> np.ndarray:
    """Inverse of :func:`radii_to_log`, accurate for very negative ``u``."""
    g = Geometry.parse(g)
    u = np.asarray(u, dtype=float)
    if g is Geometry.EUCLIDEAN:
        return np.exp(u)
    # r = 2 artanh(s) = log1p(2 s / (1 - s)),  s = e^u
    return np.log1p(2 * np.exp(u) / -np.expm1(u))


def corner_angles(tri: Triangulation, g: Geometry | str, u) -> np.ndarray:
    """Stacked ``[theta_i, theta_j]`` for every triangle, from log coordinates."""
    g = Geometry.parse(g)
    u = np.asarray(u, dtype=float)
    phi = tri.phi
    ui, uj = u[tri.i], u[tri.j]
    if g is Geometry.EUCLIDEAN:
        # scale invariance: only r_j / r_i matters
        ratio = np.exp(uj - ui)
        a = _euclid_angles(1.0, ratio, phi)
        b = _euclid_angles(ratio, 1.0, phi)
        return np.concatenate([a, b])
    s = np.exp(u)
    tanh_r = 2 * s / (1 + s * s)
    sech_r = -np.expm1(2 * u) / (1 + s * s)
    a = _hyper_angles(tanh_r[tri.i], tanh_r[tri.j], sech_r[tri.i], phi)
    b = _hyper_angles(tanh_r[tri.j], tanh_r[tri.i], sech_r[tri.j], phi)
    return np.concatenate([a, b])


def vertex_sums(tri: Triangulation, corners: np.ndarray) -> np.ndarray:
    """Per-vertex compensated (Neumaier) sum of stacked corner values."""
    padded = np.append(corners, 0.0)[tri.corner_table]
    total = np.zeros(tri.vertex_count)
    comp = np.zeros(tri.vertex_count)
    for k in range(padded.shape[1]):
        x = padded[:, k]
        t = total + x
        comp += np.where(np.abs(total) >= np.abs(x), (total - t) + x, (x - t) + total)
        total = t
    return total + comp


def _validated_log(g: Geometry, n: int, radii) -> np.ndarray:
    r = np.asarray(radii, dtype=float)
    if r.shape != (n,):
        raise GeometryRangeError(f"expected {n} radii, got shape {r.shape}")
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise GeometryRangeError("radii must be positive and finite")
    if g is Geometry.HYPERBOLIC and np.any(r > HYPERBOLIC_R_MAX):
        raise GeometryRangeError(f"hyperbolic radii above the cap {HYPERBOLIC_R_MAX:g}")
    return radii_to_log(g, r)


def cone_angles(tri: Triangulation, g: Geometry | str, radii) -> np.ndarray:
    """Cone angle at every primal vertex: sum of all triangle corners there."""
    g = Geometry.parse(g)
    u = _validated_log(g, tri.vertex_count, radii)
    return vertex_sums(tri, corner_angles(tri, g, u))


def cone_angle(tri: Triangulation, g: Geometry | str, radii, v: int) -> float:
    return float(cone_angles(tri, g, radii)[v])


class CurvatureVector:
    """Vertex curvatures ``K_i = 2 pi - cone angle``, optionally with targets."""

    __slots__ = ("values", "target")

    def __init__(self, values, target=None):
        self.values = np.asarray(values, dtype=float)
        self.target = None if target is None else np.asarray(target, dtype=float)

    def gap(self) -> np.ndarray:
        if self.target is None:
            raise ValueError("no target curvature set")
        return self.values - self.target

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return f"CurvatureVector(values={self.values!r}, target={self.target!r})"


def curvature_from_log(tri: Triangulation, g: Geometry, u) -> np.ndarray:
    return TWO_PI - vertex_sums(tri, corner_angles(tri, g, u))


def curvature_vector(tri: Triangulation, g: Geometry | str, radii, target=None) -> CurvatureVector:
    g = Geometry.parse(g)
    u = _validated_log(g, tri.vertex_count, radii)
    return CurvatureVector(curvature_from_log(tri, g, u), target)


def hyperbolic_area(tri: Triangulation, radii) -> float:
    """Total area of the hyperbolic cone metric: sum of triangle angle deficits.

    Each triangle has angle ``pi - phi`` at its star corner, so its deficit
    is ``phi - theta_i - theta_j``.
    """
    u = _validated_log(Geometry.HYPERBOLIC, tri.vertex_count, radii)
    return area_from_log(tri, u)


def area_from_log(tri: Triangulation, u) -> float:
    ang = corner_angles(tri, Geometry.HYPERBOLIC, u)
    n = len(tri)
    deficits = tri.phi - ang[:n] - ang[n:]
    return math.fsum(deficits)


def gauss_bonnet_residual(c: WeightedComplex, tri: Triangulation, g: Geometry | str, radii) -> float:
    """``sum K - 2 pi chi`` (Euclidean) or ``sum K - 2 pi chi - Area`` (hyperbolic)."""
    g = Geometry.parse(g)
    u = _validated_log(g, tri.vertex_count, radii)
    k = curvature_from_log(tri, g, u)
    terms = list(k) + [-TWO_PI * euler_characteristic(c)]
    if g is Geometry.HYPERBOLIC:
        terms.append(-area_from_log(tri, u))
    return math.fsum(terms)
