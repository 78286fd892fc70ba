"""Weighted cellular decompositions of closed oriented surfaces.

A decomposition is stored as a half-edge structure.  Edge ``k`` owns the
two half-edges ``2k`` and ``2k + 1``, so ``twin(h) == h ^ 1``.  Loops and
parallel edges are ordinary citizens of this representation, which is what
one-vertex polygon decompositions of higher genus surfaces need.

Two input formats are understood by :func:`build_complex`:

``simple``
    faces are cyclic lists of vertex ids; edges are paired automatically by
    matching opposite directed vertex pairs.  Loops and parallel edges are
    rejected because the pairing would be ambiguous.  Edge names are
    ``"u-v"`` with ``u < v``.

``general``
    ``edges`` maps an edge name to its ``[tail, head]`` vertex pair and each
    face is a cyclic list of edge references, ``"a"`` for traversal from tail
    to head and ``"-a"`` for the reverse direction.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

__all__ = [
    "ComplexError",
    "WeightedComplex",
    "Triangulation",
    "CharacterVector",
    "B1Report",
    "build_complex",
    "load_complex",
    "parse_angle",
    "to_spec",
    "euler_characteristic",
    "validate_b1",
    "triangulate",
    "character",
]


class ComplexError(ValueError):
    """Raised when a decomposition description is not a valid closed surface."""


_PI_RE = re.compile(
    r"^\s*(?P<sign>[-+]?)\s*(?P<num>[0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*(?P<den>[0-9]*\.?[0-9]+))?\s*$",
    re.IGNORECASE,
)


def parse_angle(value: Any) -> float:
    """Convert a number or a string such as ``"pi/3"`` or ``"3pi/4"`` to radians.

    >>> parse_angle("3pi/4") == 3 * math.pi / 4
    True
    """
    if isinstance(value, bool):
        raise ComplexError(f"invalid angle {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ComplexError(f"invalid angle {value!r}")
    m = _PI_RE.match(value)
    if m is None:
        try:
            x = float(value)
        except ValueError:
            raise ComplexError(f"cannot parse angle {value!r}") from None
        if not math.isfinite(x):
            raise ComplexError(f"angle {value!r} is not finite")
        return x
    num = float(m.group("num")) if m.group("num") else 1.0
    den = float(m.group("den")) if m.group("den") else 1.0
    if den == 0.0:
        raise ComplexError(f"zero denominator in angle {value!r}")
    sign = -1.0 if m.group("sign") == "-" else 1.0
    return sign * num * math.pi / den


@dataclass(frozen=True)
class WeightedComplex:
    """Half-edge cellular decomposition with exterior intersection angles.

    Attributes
    ----------
    vertex_count : int
        Number of primal vertices ``N``.
    origin : tuple of int
        Origin vertex of each half-edge.
    next : tuple of int
        Successor of each half-edge along its face boundary.
    faces : tuple of tuple of int
        Boundary half-edges of each face, in cyclic order.
    weights : tuple of float
        Weight of each edge, radians in ``(0, pi)``.
    edge_names : tuple of str
        Names used for edges in the input document.

    Instances are produced by :func:`build_complex`, which verifies all
    invariants; constructing one directly skips validation.
    """

    vertex_count: int
    origin: tuple[int, ...]
    next: tuple[int, ...]
    faces: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...]
    edge_names: tuple[str, ...]

    @property
    def edge_count(self) -> int:
        return len(self.weights)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def halfedge_count(self) -> int:
        return len(self.origin)

    @staticmethod
    def twin(h: int) -> int:
        return h ^ 1

    @staticmethod
    def edge_of(h: int) -> int:
        return h >> 1

    def endpoints(self, e: int) -> tuple[int, int]:
        return self.origin[2 * e], self.origin[2 * e + 1]

    @cached_property
    def face_of(self) -> np.ndarray:
        out = np.empty(self.halfedge_count, dtype=np.intp)
        for f, cycle in enumerate(self.faces):
            out[list(cycle)] = f
        out.flags.writeable = False
        return out

    @cached_property
    def origin_array(self) -> np.ndarray:
        out = np.asarray(self.origin, dtype=np.intp)
        out.flags.writeable = False
        return out

    @cached_property
    def weight_array(self) -> np.ndarray:
        out = np.asarray(self.weights, dtype=float)
        out.flags.writeable = False
        return out

    @cached_property
    def edge_endpoints(self) -> np.ndarray:
        """``(E, 2)`` array of edge endpoints (equal entries for a loop)."""
        out = self.origin_array.reshape(-1, 2).copy()
        out.flags.writeable = False
        return out

    def degree(self, v: int) -> int:
        """Number of outgoing half-edges at ``v`` (a loop counts twice)."""
        return int(np.count_nonzero(self.origin_array == v))

    def with_weights(self, weights: Sequence[float]) -> "WeightedComplex":
        """Return a copy carrying new edge weights, re-checking their range."""
        weights = tuple(float(w) for w in weights)
        if len(weights) != self.edge_count:
            raise ComplexError(
                f"expected {self.edge_count} weights, got {len(weights)}"
            )
        _check_weights(weights, self.edge_names)
        return WeightedComplex(
            self.vertex_count, self.origin, self.next, self.faces, weights,
            self.edge_names,
        )

    def summary(self) -> dict[str, int]:
        chi = euler_characteristic(self)
        return {
            "vertices": self.vertex_count,
            "edges": self.edge_count,
            "faces": self.face_count,
            "euler_characteristic": chi,
            "genus": (2 - chi) // 2,
        }


def _check_weights(weights: Sequence[float], names: Sequence[str]) -> None:
    for name, w in zip(names, weights):
        if not (math.isfinite(w) and 0.0 < w < math.pi):
            raise ComplexError(f"weight of edge {name!r} is {w!r}, not in (0, pi)")


def _resolve_weights(raw: Any, names: Sequence[str]) -> list[float]:
    if raw is None:
        raise ComplexError("missing 'weights'")
    if isinstance(raw, (int, float, str)) and not isinstance(raw, bool):
        return [parse_angle(raw)] * len(names)
    if isinstance(raw, list):
        if len(raw) != len(names):
            raise ComplexError(
                f"'weights' list has {len(raw)} entries for {len(names)} edges"
            )
        return [parse_angle(w) for w in raw]
    if not isinstance(raw, Mapping):
        raise ComplexError("'weights' must be a number, list or object")
    aliases = {}
    for name in names:
        aliases[name] = name
        if re.fullmatch(r"\d+-\d+", name):
            u, v = name.split("-")
            aliases[f"{v}-{u}"] = name
    values: dict[str, float] = {}
    for key, w in raw.items():
        if key == "*":
            continue
        if key not in aliases:
            raise ComplexError(f"weight given for unknown edge {key!r}")
        values[aliases[key]] = parse_angle(w)
    default = raw.get("*")
    out = []
    for name in names:
        if name in values:
            out.append(values[name])
        elif default is not None:
            out.append(parse_angle(default))
        else:
            raise ComplexError(f"no weight for edge {name!r}")
    return out


def _pair_simple(faces: Sequence[Sequence[int]]):
    """Auto-pair the directed sides of simple-format faces into edges."""
    slots: dict[tuple[int, int], list[int]] = {}
    order: list[tuple[int, int]] = []
    flat: list[tuple[int, int]] = []
    for f, cycle in enumerate(faces):
        m = len(cycle)
        for k in range(m):
            a, b = int(cycle[k]), int(cycle[(k + 1) % m])
            if a == b:
                raise ComplexError(
                    f"face {f} has a loop at vertex {a}; use the general format"
                )
            key = (min(a, b), max(a, b))
            if key not in slots:
                slots[key] = []
                order.append(key)
            slots[key].append(len(flat))
            flat.append((a, b))

    names: list[str] = []
    slot_half: list[int] = [0] * len(flat)
    for e, key in enumerate(order):
        uses = slots[key]
        dirs = [flat[s] for s in uses]
        if len(uses) != 2:
            forward = sum(1 for d in dirs if d == dirs[0])
            if len(uses) % 2 == 0 and 2 * forward == len(uses):
                raise ComplexError(
                    f"ambiguous pairing between vertices {key[0]} and {key[1]} "
                    "(parallel edges); use the general format"
                )
            raise ComplexError(
                f"non-manifold edge {key[0]}-{key[1]}: used by {len(uses)} face slots"
            )
        if dirs[0] == dirs[1]:
            raise ComplexError(
                f"inconsistent orientation on edge {key[0]}-{key[1]}: "
                "both faces traverse it in the same direction"
            )
        slot_half[uses[0]] = 2 * e
        slot_half[uses[1]] = 2 * e + 1
        names.append(f"{key[0]}-{key[1]}")
    return names, flat, slot_half


def _parse_general(doc: Mapping[str, Any]):
    raw_edges = doc.get("edges")
    if raw_edges is None:
        raise ComplexError("general format requires 'edges'")
    if isinstance(raw_edges, list):
        raw_edges = {str(k): v for k, v in enumerate(raw_edges)}
    if not isinstance(raw_edges, Mapping):
        raise ComplexError("'edges' must be an object or a list")
    names = [str(k) for k in raw_edges]
    index = {name: e for e, name in enumerate(names)}
    ends = []
    for name in names:
        pair = raw_edges[name]
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise ComplexError(f"edge {name!r} must be a [tail, head] pair")
        ends.append((int(pair[0]), int(pair[1])))

    flat: list[tuple[int, int]] = []
    slot_half: list[int] = []
    used = [[0, 0] for _ in names]
    for f, cycle in enumerate(doc["faces"]):
        for ref in cycle:
            ref = str(ref)
            reverse = ref.startswith("-")
            name = ref[1:] if reverse else ref
            if name not in index:
                raise ComplexError(f"face {f} references unknown edge {name!r}")
            e = index[name]
            tail, head = ends[e]
            used[e][reverse] += 1
            flat.append((head, tail) if reverse else (tail, head))
            slot_half.append(2 * e + int(reverse))
    for e, (fwd, rev) in enumerate(used):
        if fwd + rev != 2:
            raise ComplexError(
                f"non-manifold edge {names[e]!r}: used by {fwd + rev} face slots"
            )
        if fwd != 1:
            raise ComplexError(
                f"inconsistent orientation on edge {names[e]!r}: "
                "both slots traverse it in the same direction"
            )
    return names, flat, slot_half


def build_complex(spec: Mapping[str, Any]) -> WeightedComplex:
    """Build and validate a :class:`WeightedComplex` from a description.

    Parameters
    ----------
    spec : mapping
        Decoded decomposition document with keys ``format``,
        ``vertex_count``, ``faces``, ``weights`` and, for the general format,
        ``edges``.

    Raises
    ------
    ComplexError
        On any violation of the closed oriented surface invariants or an
        out-of-range weight.
    """
    fmt = spec.get("format", "simple")
    if "vertex_count" not in spec:
        raise ComplexError("missing 'vertex_count'")
    if "faces" not in spec:
        raise ComplexError("missing 'faces'")
    n = int(spec["vertex_count"])
    if n < 1:
        raise ComplexError("'vertex_count' must be positive")
    faces_in = spec["faces"]
    if not isinstance(faces_in, list) or not faces_in:
        raise ComplexError("'faces' must be a non-empty list")
    for f, cycle in enumerate(faces_in):
        if not isinstance(cycle, list) or not cycle:
            raise ComplexError(f"face {f} must be a non-empty list")

    if fmt == "simple":
        names, flat, slot_half = _pair_simple(faces_in)
    elif fmt == "general":
        names, flat, slot_half = _parse_general(spec)
    else:
        raise ComplexError(f"unknown format {fmt!r}")

    n_half = 2 * len(names)
    origin = [0] * n_half
    nxt = [0] * n_half
    faces = []
    s = 0
    for f, cycle in enumerate(faces_in):
        m = len(cycle)
        hs = slot_half[s:s + m]
        for k in range(m):
            tail, head = flat[s + k]
            if not (0 <= tail < n and 0 <= head < n):
                raise ComplexError(f"face {f} uses a vertex outside 0..{n - 1}")
            if head != flat[s + (k + 1) % m][0]:
                raise ComplexError(
                    f"face {f} boundary is not a closed walk at slot {k}"
                )
            origin[hs[k]] = tail
            nxt[hs[k]] = hs[(k + 1) % m]
        faces.append(tuple(hs))
        s += m

    weights = _resolve_weights(spec.get("weights"), names)
    _check_weights(weights, names)
    c = WeightedComplex(n, tuple(origin), tuple(nxt), tuple(faces),
                        tuple(weights), tuple(names))
    _check_vertices(c)
    return c


def _check_vertices(c: WeightedComplex) -> None:
    n = c.vertex_count
    outgoing: list[list[int]] = [[] for _ in range(n)]
    for h, v in enumerate(c.origin):
        outgoing[v].append(h)
    for v, hs in enumerate(outgoing):
        if not hs:
            raise ComplexError(f"vertex {v} is not used by any face (disconnected)")
        # rotation around v must be a single cycle, otherwise v is pinched
        seen = {hs[0]}
        h = c.next[c.twin(hs[0])]
        while h not in seen:
            seen.add(h)
            h = c.next[c.twin(h)]
        if len(seen) != len(hs):
            raise ComplexError(f"vertex {v} is not a manifold point (pinched link)")

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in range(c.edge_count):
        a, b = c.endpoints(e)
        parent[find(a)] = find(b)
    if len({find(v) for v in range(n)}) != 1:
        raise ComplexError("decomposition is disconnected")


def load_complex(path: str | Path) -> WeightedComplex:
    """Read a decomposition document from a JSON file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ComplexError(
            f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ComplexError(f"{path}: top level must be an object")
    return build_complex(doc)


def to_spec(c: WeightedComplex) -> dict[str, Any]:
    """Serialize to the general format; ``build_complex(to_spec(c)) == c``."""
    edges = {
        name: [c.origin[2 * e], c.origin[2 * e + 1]]
        for e, name in enumerate(c.edge_names)
    }
    faces = [
        [("-" if h & 1 else "") + c.edge_names[h >> 1] for h in cycle]
        for cycle in c.faces
    ]
    return {
        "format": "general",
        "vertex_count": c.vertex_count,
        "edges": edges,
        "faces": faces,
        "weights": {name: w for name, w in zip(c.edge_names, c.weights)},
    }


def euler_characteristic(c: WeightedComplex) -> int:
    return c.vertex_count - c.edge_count + c.face_count


@dataclass(frozen=True)
class B1Report:
    """Per-face residuals of the angle-sum condition."""

    residuals: np.ndarray
    tolerances: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(np.all(np.abs(self.residuals) <= self.tolerances))

    @property
    def max_abs_residual(self) -> float:
        return float(np.max(np.abs(self.residuals)))


def validate_b1(c: WeightedComplex) -> B1Report:
    """Residual ``sum(weights on boundary) - (m - 2) pi`` for every face."""
    res = np.empty(c.face_count)
    tol = np.empty(c.face_count)
    for f, cycle in enumerate(c.faces):
        m = len(cycle)
        res[f] = math.fsum([c.weights[h >> 1] for h in cycle] + [-(m - 2) * math.pi])
        tol[f] = 1e-12 * m
    return B1Report(res, tol)


@dataclass(frozen=True)
class Triangulation:
    """Star-vertex triangulation: one triangle per half-edge.

    The triangle built from half-edge ``h`` has primal corners
    ``i = origin(h)`` and ``j = origin(twin(h))`` and its star corner is the
    face containing ``h``.  Star vertices are numbered like faces.
    """

    triangles: np.ndarray  # (2E, 5): edge, face, i, j, star
    phi: np.ndarray
    vertex_count: int
    star_vertex_count: int
    # padded corner table for per-vertex sums over the stacked [theta_i, theta_j]
    corner_table: np.ndarray

    @property
    def edge(self) -> np.ndarray:
        return self.triangles[:, 0]

    @property
    def i(self) -> np.ndarray:
        return self.triangles[:, 2]

    @property
    def j(self) -> np.ndarray:
        return self.triangles[:, 3]

    def __len__(self) -> int:
        return len(self.triangles)


def triangulate(c: WeightedComplex) -> Triangulation:
    rows = []
    for f, cycle in enumerate(c.faces):
        for h in cycle:
            rows.append((h >> 1, f, c.origin[h], c.origin[h ^ 1], f))
    tri = np.asarray(rows, dtype=np.intp)
    phi = c.weight_array[tri[:, 0]]

    n_tri = len(tri)
    corners: list[list[int]] = [[] for _ in range(c.vertex_count)]
    for t in range(n_tri):
        corners[tri[t, 2]].append(t)
        corners[tri[t, 3]].append(n_tri + t)
    width = max(len(cs) for cs in corners)
    table = np.full((c.vertex_count, width), 2 * n_tri, dtype=np.intp)
    for v, cs in enumerate(corners):
        table[v, :len(cs)] = cs

    for a in (tri, phi, table):
        a.flags.writeable = False
    return Triangulation(tri, phi, c.vertex_count, c.face_count, table)


@dataclass(frozen=True)
class CharacterVector:
    """Per-vertex sums of incident weights, with their mean."""

    values: np.ndarray
    average: float

    def __len__(self) -> int:
        return len(self.values)


def character(c: WeightedComplex) -> CharacterVector:
    """Sum of weights over outgoing half-edges; a loop contributes twice."""
    phi = c.weight_array[np.arange(c.halfedge_count) >> 1]
    groups: list[list[float]] = [[] for _ in range(c.vertex_count)]
    for h, v in enumerate(c.origin):
        groups[v].append(phi[h])
    values = np.array([math.fsum(g) for g in groups])
    values.flags.writeable = False
    return CharacterVector(values, math.fsum(values) / c.vertex_count)
