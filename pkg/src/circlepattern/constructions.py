"""Ready-made decompositions and random weight generators.

Every builder returns a decomposition document (a plain dict accepted by
:func:`build_complex`) so the same objects can be written to JSON files.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np
from scipy import linalg, optimize
from scipy.spatial import ConvexHull

from .complex import ComplexError, WeightedComplex, build_complex

__all__ = [
    "tetrahedron",
    "octahedron",
    "icosahedron",
    "cube",
    "dodecahedron",
    "torus_grid",
    "polygon_surface",
    "coned_polygon_surface",
    "dual",
    "regular_weights",
    "random_b1_weights",
]


def _pi_fraction(num: int, den: int) -> str:
    g = math.gcd(num, den)
    num, den = num // g, den // g
    head = "pi" if num == 1 else f"{num}pi"
    return head if den == 1 else f"{head}/{den}"


def _regular(faces: list[list[int]]) -> str:
    ms = {len(f) for f in faces}
    if len(ms) == 1:
        m = ms.pop()
        return _pi_fraction(m - 2, m)
    raise ValueError("faces of mixed length need explicit weights")


def tetrahedron() -> dict[str, Any]:
    faces = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
    return {"format": "simple", "vertex_count": 4, "faces": faces, "weights": {"*": "pi/3"}}


def octahedron() -> dict[str, Any]:
    # 0/1 = +-x, 2/3 = +-y, 4/5 = +-z
    faces = [[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
             [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]]
    return {"format": "simple", "vertex_count": 6, "faces": faces, "weights": {"*": "pi/3"}}


def icosahedron() -> dict[str, Any]:
    p = (1 + math.sqrt(5)) / 2
    pts = []
    for a in (-1, 1):
        for b in (-p, p):
            pts += [(0, a, b), (a, b, 0), (b, 0, a)]
    pts = np.asarray(pts, dtype=float)
    hull = ConvexHull(pts)
    faces = []
    for simplex in hull.simplices:
        a, b, c = pts[simplex]
        if np.dot(np.cross(b - a, c - a), a + b + c) < 0:
            simplex = simplex[::-1]
        faces.append([int(x) for x in simplex])
    return {"format": "simple", "vertex_count": 12, "faces": faces, "weights": {"*": "pi/3"}}


def dual(c: WeightedComplex) -> dict[str, Any]:
    """Combinatorial dual in the simple format (faces become vertices).

    Only valid when the dual is a simple graph; weights are set to the
    regular value for the dual face lengths when those are uniform.
    """
    faces = []
    seen: set[int] = set()
    for h0 in range(c.halfedge_count):
        v = c.origin[h0]
        if h0 in seen:
            continue
        cycle = []
        h = h0
        while h not in seen:
            seen.add(h)
            cycle.append(int(c.face_of[h]))
            h = c.next[h ^ 1]
        faces.append((v, cycle))
    faces.sort(key=lambda item: item[0])
    cycles = [cyc[::-1] for _, cyc in faces]
    return {"format": "simple", "vertex_count": c.face_count, "faces": cycles,
            "weights": {"*": _regular(cycles)}}


def cube() -> dict[str, Any]:
    return dual(build_complex(octahedron()))


def dodecahedron() -> dict[str, Any]:
    return dual(build_complex(icosahedron()))


def torus_grid(n: int = 3, m: int | None = None) -> dict[str, Any]:
    """``n x m`` grid on the torus, each square cut along one diagonal."""
    m = n if m is None else m
    if n < 3 or m < 3:
        raise ValueError("grid torus needs n, m >= 3 to avoid parallel edges")

    def vid(a, b):
        return (a % n) * m + (b % m)

    faces = []
    for a in range(n):
        for b in range(m):
            faces.append([vid(a, b), vid(a + 1, b), vid(a + 1, b + 1)])
            faces.append([vid(a, b), vid(a + 1, b + 1), vid(a, b + 1)])
    return {"format": "simple", "vertex_count": n * m, "faces": faces, "weights": {"*": "pi/3"}}


def _surface_word(genus: int) -> list[str]:
    word = []
    for k in range(genus):
        a, b = f"a{k + 1}", f"b{k + 1}"
        word += [a, b, "-" + a, "-" + b]
    return word


def polygon_surface(genus: int = 2) -> dict[str, Any]:
    """One vertex, one ``4g``-gon glued by ``a1 b1 a1^-1 b1^-1 ...``."""
    if genus < 1:
        raise ValueError("genus must be at least 1")
    word = _surface_word(genus)
    edges = {}
    for ref in word:
        edges.setdefault(ref.lstrip("-"), [0, 0])
    m = len(word)
    return {"format": "general", "vertex_count": 1, "edges": edges, "faces": [word],
            "weights": {"*": _pi_fraction(m - 2, m)}}


def coned_polygon_surface(genus: int = 2) -> dict[str, Any]:
    """The ``4g``-gon surface with a cone vertex inside the polygon.

    Vertex 0 is the polygon corner, vertex 1 the cone point; spokes ``s_k``
    run from the cone point to corner ``k``.
    """
    word = _surface_word(genus)
    m = len(word)
    edges: dict[str, list[int]] = {}
    for ref in word:
        edges.setdefault(ref.lstrip("-"), [0, 0])
    for k in range(m):
        edges[f"s{k}"] = [1, 0]
    faces = [[word[k], f"-s{(k + 1) % m}", f"s{k}"] for k in range(m)]
    return {"format": "general", "vertex_count": 2, "edges": edges, "faces": faces,
            "weights": {"*": "pi/3"}}


def regular_weights(c: WeightedComplex) -> np.ndarray:
    """Weights ``(m - 2) pi / m`` when all faces have the same length ``m``."""
    ms = {len(f) for f in c.faces}
    if len(ms) != 1:
        raise ValueError("faces of mixed length")
    m = ms.pop()
    return np.full(c.edge_count, (m - 2) * math.pi / m)


def _b1_system(c: WeightedComplex):
    a = np.zeros((c.face_count, c.edge_count))
    b = np.empty(c.face_count)
    for f, cycle in enumerate(c.faces):
        for h in cycle:
            a[f, h >> 1] += 1.0
        b[f] = (len(cycle) - 2) * math.pi
    return a, b


def random_b1_weights(c: WeightedComplex, rng: np.random.Generator,
                      spread: float = 0.5, margin: float = 0.05) -> WeightedComplex:
    """Random weights in ``[margin, pi - margin]`` satisfying the face angle sums.

    Starts from the most interior feasible point (an LP) and moves along a
    random direction of the null space of the face-sum constraints, by a
    fraction ``spread`` of the distance to the box boundary.
    """
    a, b = _b1_system(c)
    e = c.edge_count
    # maximise s subject to A phi = b, s <= phi <= pi - s
    cost = np.zeros(e + 1)
    cost[-1] = -1.0
    a_ub = np.zeros((2 * e, e + 1))
    a_ub[:e, :e] = -np.eye(e)
    a_ub[:e, -1] = 1.0
    a_ub[e:, :e] = np.eye(e)
    a_ub[e:, -1] = 1.0
    b_ub = np.concatenate([np.zeros(e), np.full(e, math.pi)])
    a_eq = np.hstack([a, np.zeros((len(b), 1))])
    res = optimize.linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b,
                           bounds=[(None, None)] * e + [(0, math.pi / 2)])
    if not res.success or res.x[-1] <= margin:
        raise ComplexError("no interior weights satisfy the face angle sums")
    base = res.x[:e]
    basis = linalg.null_space(a)
    if basis.shape[1] == 0:
        return c.with_weights(base)
    d = basis @ rng.standard_normal(basis.shape[1])
    d /= np.max(np.abs(d))
    lo, hi = base - margin, math.pi - margin - base
    with np.errstate(divide="ignore"):
        limit = np.min(np.where(d > 0, hi / d, np.where(d < 0, lo / -d, np.inf)))
    phi = base + spread * rng.uniform(0, 1) * limit * d
    # project back onto the constraint set to clean up rounding
    phi -= np.linalg.lstsq(a, a @ phi - b, rcond=None)[0]
    return c.with_weights(phi)
