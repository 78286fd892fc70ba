"""Acceptance gate: the nine exit criteria at their stated tolerances.

Each test records a one-line PASS/FAIL summary (shown at the end of the
pytest run) before asserting.
"""

import itertools
import math

import numpy as np
import pytest

from circlepattern import (
    FlowConfig,
    FlowStatus,
    Verdict,
    build_complex,
    character,
    check_subset_inequalities,
    classify_character,
    curvature_vector,
    euler_characteristic,
    gauss_bonnet_residual,
    hyperbolic_area,
    inner_angle_gradient,
    load_complex,
    run_flow,
    triangulate,
    validate_b1,
)
from circlepattern.constructions import (
    coned_polygon_surface,
    cube,
    dodecahedron,
    icosahedron,
    octahedron,
    polygon_surface,
    random_b1_weights,
    tetrahedron,
    torus_grid,
)
from circlepattern.criteria import incident_weight_sums
from circlepattern.diagnostics import gradient_check

from .conftest import FIXTURE_NAMES, fixture_path
from .oracles import central_difference, octagon_radius

pytestmark = pytest.mark.acceptance

PI = math.pi
GEOMS = ("euclidean", "hyperbolic")
SPHERES = (tetrahedron, octahedron, icosahedron, cube, dodecahedron)
HIGHER_GENUS = (lambda: polygon_surface(2), lambda: polygon_surface(3),
                lambda: coned_polygon_surface(2), lambda: coned_polygon_surface(3))


def _fixtures():
    for name in FIXTURE_NAMES:
        c = load_complex(fixture_path(name))
        yield name, c, triangulate(c)


def _random_complexes(count: int, seed: int):
    """Randomly weighted decompositions from a pool of sphere, torus and
    higher-genus builders."""
    rng = np.random.default_rng(seed)
    pool = SPHERES + HIGHER_GENUS + (torus_grid, lambda: torus_grid(3, 4))
    for _ in range(count):
        builder = pool[rng.integers(len(pool))]
        yield random_b1_weights(build_complex(builder()), rng)


def _normalised(r):
    return r / np.exp(np.mean(np.log(r)))


def test_criterion_1_gradient_fidelity(acceptance_log):
    worst = {}
    ok = True
    for res in gradient_check(samples=1000, seed=42, step=1e-6):
        worst[res.geometry.value] = res.max_rel_error
        ok &= res.passed
    # independent oracle on the same seeded samples
    for g in GEOMS:
        rng = np.random.default_rng(42)
        ri = rng.uniform(0.01, 10, 1000)
        rj = rng.uniform(0.01, 10, 1000)
        phi = rng.uniform(0.05, PI - 0.05, 1000)
        gi, gj = inner_angle_gradient(g, ri, rj, phi)
        err = 0.0
        for k in range(1000):
            fi = central_difference(g, ri[k], rj[k], phi[k], 1e-6, 0)
            fj = central_difference(g, ri[k], rj[k], phi[k], 1e-6, 1)
            err = max(err, abs(gi[k] - fi) / abs(fi), abs(gj[k] - fj) / abs(fj))
        worst[g + "-oracle"] = err
        ok &= err < 1e-6
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert acceptance_log(1, "gradient fidelity, rel err < 1e-6", ok, detail)


def test_criterion_2_gauss_bonnet(acceptance_log):
    rng = np.random.default_rng(2)
    worst = {"euclidean": 0.0, "hyperbolic": 0.0}
    for _, c, tri in _fixtures():
        chi = euler_characteristic(c)
        for _ in range(100):
            r = np.exp(rng.uniform(math.log(0.01), math.log(10), c.vertex_count))
            ke = curvature_vector(tri, "euclidean", r).values
            worst["euclidean"] = max(worst["euclidean"], abs(math.fsum(ke) - 2 * PI * chi))
            kh = curvature_vector(tri, "hyperbolic", r).values
            res = abs(math.fsum(kh) - 2 * PI * chi - hyperbolic_area(tri, r))
            worst["hyperbolic"] = max(worst["hyperbolic"], res)
            # the packaged residual agrees
            assert abs(gauss_bonnet_residual(c, tri, "hyperbolic", r)) < 1e-8
    ok = worst["euclidean"] < 1e-9 and worst["hyperbolic"] < 1e-8
    detail = f"max residual euclidean {worst['euclidean']:.1e}, hyperbolic {worst['hyperbolic']:.1e}"
    assert acceptance_log(2, "Gauss-Bonnet on 100 random states per fixture", ok, detail)


def test_criterion_3_character_identity(acceptance_log):
    worst = 0.0
    count = 0
    complexes = [c for _, c, _ in _fixtures()] + list(_random_complexes(50, seed=3))
    for c in complexes:
        assert validate_b1(c).passed
        mean = np.mean(character(c).values)
        worst = max(worst, abs(mean - 2 * PI * (1 - euler_characteristic(c) / c.vertex_count)))
        count += 1
    ok = worst < 1e-12 and count == 53
    assert acceptance_log(3, "mean character = 2pi(1 - chi/N)", ok,
                          f"{count} complexes, max deviation {worst:.1e}")


def test_criterion_4_hyperbolic_existence(acceptance_log):
    c = load_complex(fixture_path("octagon"))
    tri = triangulate(c)
    r_star = octagon_radius()
    res = run_flow(c, FlowConfig("hyperbolic"))
    gap = res.gap_supnorm
    err = abs(res.final_radii[0] - r_star)
    area = hyperbolic_area(tri, res.final_radii)
    restarts = []
    for f in (0.9, 1.1):
        rr = run_flow(c, FlowConfig("hyperbolic", initial_radii=[f * r_star]))
        restarts.append(abs(rr.final_radii[0] - res.final_radii[0]))
    ok = (res.status is FlowStatus.CONVERGED and gap < 1e-8 and err < 1e-8
          and abs(area - 4 * PI) < 1e-6 and max(restarts) < 1e-6)
    detail = (f"sup|K| {gap:.1e}, |r - r*| {err:.1e}, |area - 4pi| {abs(area - 4 * PI):.1e}, "
              f"restart spread {max(restarts):.1e}")
    assert acceptance_log(4, "octagon hyperbolic pattern", ok, detail)


def test_criterion_5_collapse(acceptance_log):
    c = load_complex(fixture_path("tetrahedron"))
    res = run_flow(c, FlowConfig("hyperbolic"))
    rate = res.rate_estimate
    ok = (res.status is FlowStatus.COLLAPSED and rate is not None
          and rate.quantity == "collapse" and rate.slope < 0 and rate.r_squared > 0.99)
    detail = f"status {res.status.value}, slope {rate.slope:.4f}, R^2 {rate.r_squared:.6f}"
    assert acceptance_log(5, "tetrahedron collapses exponentially", ok, detail)


def test_criterion_6_euclidean_boundary(acceptance_log):
    c = load_complex(fixture_path("torus3x3"))
    rng = np.random.default_rng(6)
    limits, drifts, statuses = [], [], []
    for _ in range(20):
        res = run_flow(c, FlowConfig("euclidean", initial_radii=rng.uniform(0.2, 5.0, 9)))
        statuses.append(res.status)
        limits.append(_normalised(res.final_radii))
        drifts.append(res.conservation.max_drift)
    spread = max(np.max(np.abs(a - b)) for a, b in itertools.combinations(limits, 2))
    ok = (all(s is FlowStatus.CONVERGED for s in statuses) and spread < 1e-6
          and max(drifts) < 1e-9 * 9)
    detail = f"20 starts converged, limit spread {spread:.1e}, max drift {max(drifts):.1e}"
    assert acceptance_log(6, "torus Euclidean uniqueness and conservation", ok, detail)


def test_criterion_7_prescribed_round_trip(acceptance_log):
    rng = np.random.default_rng(7)
    worst = 0.0
    runs = 0
    ok = True
    for _, c, tri in _fixtures():
        chi = euler_characteristic(c)
        for g in GEOMS:
            for _ in range(10):
                rbar = rng.uniform(0.3, 3.0, c.vertex_count)
                kbar = curvature_vector(tri, g, rbar).values
                ok &= bool(np.all(kbar < 2 * PI))
                if g == "euclidean":
                    ok &= abs(math.fsum(kbar) - 2 * PI * chi) < 1e-9
                r0 = rng.uniform(0.3, 3.0, c.vertex_count)
                res = run_flow(c, FlowConfig(g, target=kbar, initial_radii=r0))
                ok &= res.status is FlowStatus.CONVERGED
                if g == "euclidean":
                    err = np.max(np.abs(_normalised(res.final_radii) - _normalised(rbar)))
                else:
                    err = np.max(np.abs(res.final_radii - rbar))
                worst = max(worst, float(err))
                runs += 1
    ok &= worst < 1e-6
    assert acceptance_log(7, "prescribed curvature round trip", ok,
                          f"{runs} runs, max radius error {worst:.1e}")


def test_criterion_8_subset_inequalities(acceptance_log):
    rng = np.random.default_rng(8)
    ok = True
    bs_h_min = bs_e_min = math.inf
    eq_worst = 0.0
    for _, c, tri in _fixtures():
        assert c.vertex_count <= 12
        for _ in range(100):
            r = np.exp(rng.uniform(math.log(0.05), math.log(8), c.vertex_count))
            kh = curvature_vector(tri, "hyperbolic", r).values
            rep = check_subset_inequalities(c, "bs-hyperbolic", kh)
            ok &= rep.passed
            bs_h_min = min(bs_h_min, rep.worst_slack)
            ke = curvature_vector(tri, "euclidean", r).values
            rep = check_subset_inequalities(c, "bs-euclidean", ke)
            ok &= rep.passed
            if rep.worst_subset:
                bs_e_min = min(bs_e_min, rep.worst_slack)
            eq_worst = max(eq_worst, abs(rep.full_set_slack))
    ok &= eq_worst < 1e-9
    tetra = load_complex(fixture_path("tetrahedron"))
    h3 = check_subset_inequalities(tetra, "ghz-h3")
    singles = incident_weight_sums(tetra, np.array([1, 2, 4, 8], dtype=np.int64)) - PI
    verdict = classify_character(tetra, "hyperbolic").verdict
    ok &= (not h3.passed) and bool(np.all(np.abs(singles) < 1e-12)) and verdict is Verdict.NOT_EXISTS
    detail = (f"min slack hyperbolic {bs_h_min:.2e}, Euclidean proper {bs_e_min:.2e}, "
              f"|slack at V| {eq_worst:.1e}; tetrahedron H3 singleton slack {np.max(np.abs(singles)):.1e}")
    assert acceptance_log(8, "subset inequalities", ok, detail)


def _contradicts(verdict: Verdict, collapse: bool, status: FlowStatus) -> bool:
    if verdict is Verdict.EXISTS_UNIQUE:
        return status is not FlowStatus.CONVERGED
    if verdict is Verdict.NOT_EXISTS:
        if collapse:
            return status is not FlowStatus.COLLAPSED
        return status is FlowStatus.CONVERGED
    return False


def test_criterion_9_verdict_flow_consistency(acceptance_log):
    contradictions = []
    checked = 0
    for name, c, _ in _fixtures():
        for g in GEOMS:
            rep = classify_character(c, g)
            res = run_flow(c, FlowConfig(g, initial_radii=np.linspace(0.8, 1.5, c.vertex_count)))
            checked += 1
            if _contradicts(rep.verdict, rep.predicts_collapse, res.status):
                contradictions.append((name, g, rep.verdict.value, res.status.value))

    # randomized: alternate sphere (characters below 2pi) and higher genus
    # (above) builders, keeping samples whose characters are one-sided
    rng = np.random.default_rng(9)
    randomized = 0
    tries = 0
    while randomized < 50:
        tries += 1
        pool = SPHERES if randomized % 2 == 0 else HIGHER_GENUS
        c = random_b1_weights(build_complex(pool[rng.integers(len(pool))]()), rng)
        rep = classify_character(c, "hyperbolic")
        if not (np.all(rep.margins > rep.tolerance) or np.all(rep.margins < -rep.tolerance)):
            continue
        r0 = rng.uniform(0.5, 2.0, c.vertex_count)
        res = run_flow(c, FlowConfig("hyperbolic", initial_radii=r0))
        randomized += 1
        if _contradicts(rep.verdict, rep.predicts_collapse, res.status):
            contradictions.append(("random", "hyperbolic", rep.verdict.value, res.status.value))
    ok = not contradictions
    detail = (f"{checked} fixture runs, {randomized} random complexes ({tries} drawn), "
              f"{len(contradictions)} contradictions")
    assert acceptance_log(9, "character verdict vs flow outcome", ok, detail), contradictions
