"""Existence and nonexistence criteria for ideal circle patterns.

Verdicts are three-valued.  A criterion answers ``EXISTS_UNIQUE`` or
``NOT_EXISTS`` only when its inequality holds at every vertex (or for every
vertex subset); anything else is ``INDETERMINATE``.

Boundary comparisons use an absolute tolerance ``tol`` so that values equal
up to rounding (a character of exactly ``2 pi`` on a flat torus, say) land
on the closed side of a weak inequality and fail a strict one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .complex import WeightedComplex, character, euler_characteristic, validate_b1
from .geometry import Geometry

__all__ = [
    "CriteriaError",
    "Verdict",
    "CriteriaReport",
    "SubsetReport",
    "SUBSET_MODES",
    "MAX_SUBSET_VERTICES",
    "classify_character",
    "check_prescribed",
    "check_subset_inequalities",
    "incident_weight_sums",
]

TWO_PI = 2.0 * math.pi
MAX_SUBSET_VERTICES = 24
SUBSET_MODES = ("bs-hyperbolic", "bs-euclidean", "ghz-h3", "ghz-e3")


class CriteriaError(ValueError):
    pass


class Verdict(str, enum.Enum):
    EXISTS_UNIQUE = "exists_unique"
    NOT_EXISTS = "not_exists"
    INDETERMINATE = "indeterminate"


@dataclass
class CriteriaReport:
    """Per-vertex comparison of a vertex quantity against its bounds.

    ``margins`` is positive where the existence side of the inequality holds.
    """

    criterion: str
    geometry: Geometry
    values: np.ndarray
    lower: np.ndarray
    margins: np.ndarray
    verdict: Verdict
    tag: str
    predicts_collapse: bool = False
    upper: float | None = None
    tolerance: float = 0.0
    boxes: dict[str, bool] = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "criterion": self.criterion,
            "geometry": self.geometry.value,
            "values": self.values.tolist(),
            "lower_bounds": self.lower.tolist(),
            "margins": self.margins.tolist(),
            "verdict": self.verdict.value,
            "tag": self.tag,
            "predicts_collapse": self.predicts_collapse,
            "tolerance": self.tolerance,
        }
        if self.upper is not None:
            out["upper_bound"] = self.upper
        if self.boxes:
            out["boxes"] = dict(self.boxes)
        return out


def _require_b1(c: WeightedComplex) -> None:
    b1 = validate_b1(c)
    if not b1.passed:
        raise CriteriaError(
            f"face angle-sum condition fails (max residual {b1.max_abs_residual:.3g})"
        )


def classify_character(c: WeightedComplex, g: Geometry | str, tol: float = 1e-10) -> CriteriaReport:
    """Decide existence of the zero (hyperbolic) or constant (Euclidean) pattern.

    Hyperbolic: character above ``2 pi`` everywhere gives existence and
    uniqueness; at most ``2 pi`` everywhere rules it out, and strictly below
    everywhere additionally predicts that the flow collapses to zero.

    Euclidean: the threshold is ``2 pi (1 - chi / N)``.  Since that is also
    the mean character, the existence branch is met exactly when all
    characters are equal, and the strict nonexistence branch never is.
    """
    g = Geometry.parse(g)
    _require_b1(c)
    ch = character(c).values
    n = c.vertex_count
    if g is Geometry.HYPERBOLIC:
        threshold = TWO_PI
    else:
        threshold = TWO_PI * (1 - euler_characteristic(c) / n)
    lower = np.full(n, threshold)
    margins = ch - lower
    collapse = False
    if g is Geometry.HYPERBOLIC:
        if np.all(margins > tol):
            verdict, tag = Verdict.EXISTS_UNIQUE, "hyperbolic character above 2pi at every vertex"
        elif np.all(margins <= tol):
            verdict, tag = Verdict.NOT_EXISTS, "hyperbolic character at most 2pi at every vertex"
            collapse = bool(np.all(margins < -tol))
        else:
            verdict, tag = Verdict.INDETERMINATE, "hyperbolic character straddles 2pi"
    else:
        if np.all(margins >= -tol):
            verdict, tag = (Verdict.EXISTS_UNIQUE,
                            "Euclidean character at least 2pi(1-chi/N) at every vertex (unique up to scaling)")
        elif np.all(margins < -tol):
            verdict, tag = Verdict.NOT_EXISTS, "Euclidean character below 2pi(1-chi/N) at every vertex"
            collapse = True
        else:
            verdict, tag = Verdict.INDETERMINATE, "Euclidean character straddles 2pi(1-chi/N)"
    return CriteriaReport("character", g, ch, lower, margins, verdict, tag, collapse,
                          tolerance=tol)


def check_prescribed(c: WeightedComplex, g: Geometry | str, kbar, tol: float = 1e-10,
                     sum_tol: float = 1e-9) -> CriteriaReport:
    """Compare prescribed curvatures against the box ``(2 pi - L_i, 2 pi)``.

    ``boxes`` records membership in the existence box (open on the left for
    hyperbolic, closed for Euclidean, intersected with the Gauss-Bonnet
    hyperplane there) and in the exclusion box whose points are never
    curvatures of a pattern.
    """
    g = Geometry.parse(g)
    _require_b1(c)
    kbar = np.asarray(kbar, dtype=float)
    n = c.vertex_count
    if kbar.shape != (n,):
        raise CriteriaError(f"prescribed curvature must have {n} entries")
    if not np.all(np.isfinite(kbar)) or np.any(kbar >= TWO_PI):
        raise CriteriaError("prescribed curvatures must be finite and below 2pi")
    chi = euler_characteristic(c)
    if g is Geometry.EUCLIDEAN and abs(math.fsum(kbar) - TWO_PI * chi) > sum_tol:
        raise CriteriaError(
            f"Euclidean prescribed curvatures must sum to 2pi*chi = {TWO_PI * chi:.12g}"
        )
    lower = TWO_PI - character(c).values
    margins = kbar - lower
    collapse = False
    if g is Geometry.HYPERBOLIC:
        in_exist = bool(np.all(margins > tol))
        in_exclude = bool(np.all(margins <= tol))
        if in_exist:
            verdict, tag = Verdict.EXISTS_UNIQUE, "2pi - L_i < Kbar_i < 2pi at every vertex"
        elif in_exclude:
            verdict, tag = Verdict.NOT_EXISTS, "Kbar_i <= 2pi - L_i at every vertex"
            collapse = bool(np.all(margins < -tol))
        else:
            verdict, tag = Verdict.INDETERMINATE, "Kbar straddles 2pi - L"
    else:
        in_exist = bool(np.all(margins >= -tol))
        in_exclude = bool(np.all(margins < -tol))
        if in_exist:
            verdict, tag = (Verdict.EXISTS_UNIQUE,
                            "2pi - L_i <= Kbar_i < 2pi at every vertex (unique up to scaling)")
        elif in_exclude:
            verdict, tag = Verdict.NOT_EXISTS, "Kbar_i < 2pi - L_i at every vertex"
            collapse = True
        else:
            verdict, tag = Verdict.INDETERMINATE, "Kbar straddles 2pi - L"
    return CriteriaReport("prescribed", g, kbar, lower, margins, verdict, tag, collapse,
                          upper=TWO_PI, tolerance=tol,
                          boxes={"in_existence_box": in_exist, "in_exclusion_box": in_exclude})


@dataclass
class SubsetReport:
    mode: str
    passed: bool
    worst_subset: tuple[int, ...]
    worst_slack: float
    full_set_slack: float
    subsets_checked: int
    tolerance: float
    upper_bound_ok: bool = True

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "passed": self.passed,
            "worst_subset": list(self.worst_subset),
            "worst_slack": self.worst_slack,
            "full_set_slack": self.full_set_slack,
            "subsets_checked": self.subsets_checked,
            "tolerance": self.tolerance,
            "curvature_below_2pi": self.upper_bound_ok,
        }


def incident_weight_sums(c: WeightedComplex, masks: np.ndarray) -> np.ndarray:
    """Sum of weights over edges with an endpoint in each subset.

    ``masks`` holds subsets as integer bitmasks over the vertices.  A loop
    has a single endpoint and is counted once.
    """
    ends = c.edge_endpoints
    emask = (np.int64(1) << ends[:, 0].astype(np.int64)) | (np.int64(1) << ends[:, 1].astype(np.int64))
    touched = (masks[:, None] & emask[None, :]) != 0
    return touched @ c.weight_array


def _popcount(masks: np.ndarray, n: int) -> np.ndarray:
    bits = (masks[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return bits.sum(axis=1)


def _subset_slacks(c, mode, masks, kvec, chi):
    n = c.vertex_count
    size = _popcount(masks, n).astype(float)
    incident = incident_weight_sums(c, masks)
    if mode in ("bs-hyperbolic", "bs-euclidean"):
        bits = ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(float)
        ksum = bits @ kvec
        return ksum - (TWO_PI * size - 2.0 * incident)
    if mode == "ghz-h3":
        return incident - math.pi * size
    # ghz-e3
    return math.pi * chi * size / n - (math.pi * size - incident)


def check_subset_inequalities(c: WeightedComplex, mode: str, kvec=None, tol: float = 1e-10,
                              equality_tol: float = 1e-9, tie_tol: float = 1e-12,
                              chunk: int = 1 << 16) -> SubsetReport:
    """Check a subset inequality for every non-empty vertex subset ``A``.

    Slacks (positive means the inequality holds):

    ``bs-hyperbolic``, ``bs-euclidean``
        ``sum_A K_i - (2 pi |A| - 2 sum_{e meets A} phi_e)``, plus
        ``K_i < 2 pi``.  In the Euclidean mode the full set must give
        equality (within ``equality_tol``) and proper subsets must be strict.
    ``ghz-h3``
        ``sum_{e meets A} phi_e - pi |A|``.
    ``ghz-e3``
        ``pi chi |A| / N - pi |A| + sum_{e meets A} phi_e``.  The full set
        always gives exactly zero on a decomposition satisfying the face
        sums, so it is treated like ``bs-euclidean``: strict on proper
        subsets, equality on ``V``.

    The reported witness is the proper (or, for the hyperbolic modes, any)
    subset of minimum slack.  Slacks within ``tie_tol`` of the minimum count
    as ties, so that subsets equal by symmetry but for rounding are treated
    alike; the lexicographically smallest tied subset is reported.
    """
    if mode not in SUBSET_MODES:
        raise CriteriaError(f"unknown mode {mode!r}; expected one of {SUBSET_MODES}")
    n = c.vertex_count
    if n > MAX_SUBSET_VERTICES:
        raise CriteriaError(f"subset enumeration limited to N <= {MAX_SUBSET_VERTICES}, got {n}")
    if mode.startswith("bs"):
        if kvec is None:
            raise CriteriaError(f"mode {mode!r} requires a curvature vector")
        kvec = np.asarray(kvec, dtype=float)
        if kvec.shape != (n,):
            raise CriteriaError(f"curvature vector must have {n} entries")
    chi = euler_characteristic(c)
    full = (1 << n) - 1
    equality_at_full = mode in ("bs-euclidean", "ghz-e3")

    best_slack = math.inf
    # (mask, slack) pairs within tie_tol of the running minimum
    candidates: list[tuple[int, float]] = []
    for start in range(1, full + 1, chunk):
        masks = np.arange(start, min(start + chunk, full + 1), dtype=np.int64)
        if equality_at_full:
            masks = masks[masks != full]
            if masks.size == 0:
                continue
        slack = _subset_slacks(c, mode, masks, kvec, chi)
        best_slack = min(best_slack, float(slack.min()))
        near = slack <= best_slack + tie_tol
        candidates = [(mk, s) for mk, s in candidates if s <= best_slack + tie_tol]
        candidates += zip(masks[near].tolist(), slack[near].tolist())
    best_masks = [mk for mk, _ in candidates]

    full_slack = float(_subset_slacks(c, mode, np.array([full], dtype=np.int64), kvec, chi)[0])
    upper_ok = True
    if mode.startswith("bs"):
        upper_ok = bool(np.all(kvec < TWO_PI))

    if best_masks:
        witness = min(tuple(v for v in range(n) if (mk >> v) & 1) for mk in best_masks)
        passed = best_slack > tol
    else:
        # N == 1 with equality at the full set: there are no proper subsets
        witness, best_slack, passed = (), math.inf, True
    if equality_at_full:
        passed = passed and abs(full_slack) <= equality_tol
    passed = passed and upper_ok
    return SubsetReport(mode, bool(passed), witness, float(best_slack), full_slack,
                        (1 << n) - 1, tol, upper_ok)

