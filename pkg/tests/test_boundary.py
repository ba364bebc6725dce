import copy
from fractions import Fraction

import networkx as nx
import pytest

from conftest import octahedron_complex
from oracles import four_point_bruteforce
from systolic.balls import ball_system
from systolic.boundary import (
    Thread,
    build_system,
    connectedness_report,
    daverman_report,
    hyperbolicity_check,
    local_cut_analysis,
    radial_ray,
    thread_from_ray,
    validate_thread,
)
from systolic.complex import SimplicialComplex
from systolic.errors import ComplexValidationError, RangeError, SystolicityViolation, TruncationError
from systolic.projections import SpherePoint, project_point


@pytest.fixture(scope="module")
def system4(disc7):
    return build_system(disc7.complex, disc7.basepoint, 4)


def test_build_system(system4):
    assert len(system4.spheres) == 4
    assert sorted(system4.maps) == [2, 3, 4]
    for k, pi in system4.maps.items():
        assert pi.source == system4.sphere(k)
        assert set(pi.target.simplex_of) == set(system4.sphere(k - 1).simplices())


def test_build_system_depth_one(disc7):
    s = build_system(disc7.complex, 0, 1)
    assert len(s.spheres) == 1 and not s.maps


def test_build_system_truncation(disc7):
    with pytest.raises(TruncationError):
        build_system(disc7.complex, 0, 6)
    with pytest.raises(RangeError):
        build_system(disc7.complex, 0, 0)


def test_build_system_propagates_violation():
    with pytest.raises(SystolicityViolation) as exc:
        build_system(octahedron_complex(), 0, 2)
    assert exc.value.witness["level"] == 2


def test_thread_from_projection_is_compatible(system4):
    X = system4.parent
    pts = [SpherePoint.vertex(4, system4.sphere(4).vertices[10])]
    for _ in range(3):
        pts.append(project_point(X, 0, pts[-1]))
    t = Thread(pts[::-1])
    assert validate_thread(system4, t).passed
    # serialization keeps exact equality
    assert validate_thread(system4, Thread.from_list(t.to_list())).passed


def test_perturbed_thread_fails(system4):
    for end in system4.sphere(4).vertices:
        t, _ = thread_from_ray(system4, radial_ray(system4, end))
        if any(len(p.support) >= 2 for p in t.points[1:]):
            break
    bad = copy.deepcopy(t)
    p = next(p for p in bad.points[1:] if len(p.support) >= 2)
    k = p.level
    c = list(p.coeffs)
    c[0] += Fraction(1, 100)
    c[1] -= Fraction(1, 100)
    bad.points[k - 1] = SpherePoint(k, p.support, tuple(c))
    rep = validate_thread(system4, bad)
    assert rep.failed and rep.witness["level"] in (k, k + 1)


def test_empty_thread_passes(system4):
    assert validate_thread(system4, Thread([])).passed


def test_thread_from_ray(system4):
    for end in system4.sphere(4).vertices[:25]:
        ray = radial_ray(system4, end)
        t, rep = thread_from_ray(system4, ray)
        assert rep.passed
        assert len(t.points) == 4
        for k, x in enumerate(t.points, start=1):
            # x_k lies in the closed star of v_k inside S_k
            assert ray[k] in x.support or all(ray[k] in system4.parent.adjacency[u] for u in x.support)


def test_thread_from_short_ray(system4):
    v1 = system4.sphere(1).vertices[0]
    t, rep = thread_from_ray(system4, [0, v1])
    assert t.points == [SpherePoint.vertex(1, v1)] and rep.passed


def test_thread_from_bad_ray(system4, disc7):
    far = disc7.layers[2][0]
    with pytest.raises(ComplexValidationError):
        thread_from_ray(system4, [0, far])
    with pytest.raises(ComplexValidationError):
        thread_from_ray(system4, [disc7.layers[1][0]])


def test_hyperbolicity_disc(disc7):
    rep = hyperbolicity_check(disc7.complex, 6, 2, base=0)
    assert rep.passed and Fraction(rep.stats["delta"]) <= Fraction(5, 2)
    assert rep.stats["mode"] == "exhaustive"


def test_hyperbolicity_matches_bruteforce(disc7):
    X = disc7.complex
    system = ball_system(X, (0,))
    B3 = system.ball(3)
    pts = [v for v, d in system.distance.items() if d <= 1]
    dist = dict(nx.all_pairs_shortest_path_length(B3.graph()))
    rep = hyperbolicity_check(X, 3, 1, base=0)
    assert float(rep.stats["delta_float"]) == four_point_bruteforce(dist, pts)


def test_hyperbolicity_needs_slack(disc7):
    with pytest.raises(RangeError):
        hyperbolicity_check(disc7.complex, 5, 2, base=0)
    with pytest.raises(TruncationError):
        hyperbolicity_check(disc7.complex, 9, 3, base=0)


def test_repeated_points_have_zero_defect():
    X = SimplicialComplex([(0, 1)])
    rep = hyperbolicity_check(X, 0, 0, base=0)
    assert rep.stats["delta"] == "0"


def test_control_defect_grows(control6):
    deltas = [Fraction(hyperbolicity_check(control6.complex, 3 * r0, r0, base=0).stats["delta"]) for r0 in (1, 2, 3, 4, 5)]
    assert deltas == sorted(deltas)
    assert deltas[-1] > Fraction(5, 2)


def test_sampled_hyperbolicity_is_deterministic(disc7):
    a = hyperbolicity_check(disc7.complex, 6, 2, base=0, sample=5000, seed=3)
    b = hyperbolicity_check(disc7.complex, 6, 2, base=0, sample=5000, seed=3)
    assert a.to_dict() == b.to_dict() and a.stats["mode"] == "sampled"


def test_daverman_report(system4):
    rep = daverman_report(system4, samples=20)
    assert rep.passed
    h2 = rep.details[1]
    seq = [d for d in h2.details if d.name == "decay_sequence"][0].stats["a"]
    assert all(a > b for a, b in zip(seq, seq[1:]))
    assert seq[0] == 0.5


def test_connectedness(system4):
    rep = connectedness_report(system4)
    assert rep.passed
    assert all(d.stats.get("cross_checked", False) for d in rep.details[1:])


def test_connectedness_detects_disconnected_sphere():
    # two octahedra sharing vertex 0: the link of 0 is two 4-cycles
    a = [(0, b, c) for b in (1, 2) for c in (3, 4)] + [(5, b, c) for b in (1, 2) for c in (3, 4)]
    b = [(0, x, y) for x in (11, 12) for y in (13, 14)] + [(15, x, y) for x in (11, 12) for y in (13, 14)]
    X = SimplicialComplex(a + b)
    rep = connectedness_report(build_system(X, 0, 1))
    assert rep.failed
    assert len(rep.details[0].witness["components"]) == 2


def test_local_cut_analysis_two_dimensional(system4):
    for k in range(1, 5):
        rep = local_cut_analysis(system4, k)
        assert rep.passed
        ident, cuts = rep.details
        assert ident.passed
        assert cuts.stats["label"].startswith("expected-disconnection")
        assert cuts.stats["cut_vertices"] == system4.sphere(k).num_vertices
