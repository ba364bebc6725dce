"""The twelve acceptance criteria, one test each.

Each test records a PASS/FAIL line in ``RESULTS``; the terminal summary hook in
conftest prints them after the run.
"""
import functools
import random
import time
from fractions import Fraction

import networkx as nx
import pytest

from conftest import octahedron_complex
from oracles import contraction_oracle, k_large_bruteforce, skeleton
import systolic.balls
from systolic.balls import ball_system, check_projection_simplices, check_sphere_facts, condition_R
from systolic.boundary import build_system, connectedness_report, daverman_report, hyperbolicity_check
from systolic.builder import random_small_complex
from systolic.cli import cmd_verify_all
from systolic.complex import (
    Subcomplex,
    is_connected,
    is_flag,
    is_full_subcomplex,
    is_k_large,
    is_locally_k_large,
)
from systolic.pontryagin import check_stage, check_stage_map, run_stages
from systolic.projections import (
    chain_condition,
    check_preimage_connected,
    check_surjective,
    contraction_constant,
    measure_contraction,
    pi_map,
    preimage,
)

RESULTS: dict[int, str] = {}


def criterion(number: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                RESULTS[number] = f"FAIL  [{number:2d}] {title} ({time.perf_counter() - t:.1f}s)"
                print(RESULTS[number])
                raise
            RESULTS[number] = f"PASS  [{number:2d}] {title} ({time.perf_counter() - t:.1f}s)"
            print(RESULTS[number])
        return run
    return wrap


@pytest.fixture(scope="module")
def discs(disc7, disc78):
    return [disc7, disc78]


def safe_levels(disc):
    system = ball_system(disc.complex, (disc.basepoint,))
    return system, range(1, system.safe_radius(1) + 1)


@criterion(1, "k-largeness agrees with the all-cycles oracle")
def test_k_large_oracle_equivalence():
    rng = random.Random(2024)
    t = time.perf_counter()
    count = 0
    for i in range(500):
        X = random_small_complex(rng.randint(1, 12), rng.uniform(0.1, 0.9), seed=i)
        facets = list(X.maximal_simplices)
        for k in range(4, 9):
            assert is_k_large(X, k).passed == k_large_bruteforce(facets, k), (i, k, facets)
        count += 1
    assert count >= 500
    assert time.perf_counter() - t < 60


@criterion(2, "built discs are flag, locally 7-large and satisfy condition R")
def test_discs_local_conditions(discs):
    for disc in discs:
        X = disc.complex
        assert is_flag(X).passed
        assert is_locally_k_large(X, 7).passed
        system = ball_system(X, (disc.basepoint,))
        interior = [v for v, d in system.distance.items() if d < system.frontier_distance]
        assert interior
        for v in interior:
            rep = condition_R(X, v)
            assert rep.passed, rep.witness


@criterion(3, "spheres are full and 6-large; projection simplices are single simplices")
def test_sphere_facts_and_projection_simplices(discs):
    for disc in discs:
        _, levels = safe_levels(disc)
        for k in levels:
            rep = check_sphere_facts(disc.complex, (disc.basepoint,), k)
            assert rep.passed, rep.to_dict()
            rep = check_projection_simplices(disc.complex, (disc.basepoint,), k, identities=True)
            assert rep.passed, rep.to_dict()


@criterion(4, "chain condition holds; octahedron witness is reproducible")
def test_chain_condition(discs):
    for disc in discs:
        _, levels = safe_levels(disc)
        for k in levels:
            if k >= 2:
                assert chain_condition(disc.complex, (disc.basepoint,), k).passed
    first = chain_condition(octahedron_complex(), 0, 2)
    second = chain_condition(octahedron_complex(), 0, 2)
    assert first.failed and first.witness
    assert first.to_dict() == second.to_dict()


@criterion(5, "preimages of simplices and random subcomplexes are full and 6-large")
def test_preimages_full_and_six_large(discs):
    rng = random.Random(5)
    for disc in discs:
        system, levels = safe_levels(disc)
        for k in levels:
            if k < 2:
                continue
            pi = pi_map(disc.complex, (disc.basepoint,), k)
            target = system.sphere(k - 1)
            tops = sorted(target.maximal_simplices)
            subs = [Subcomplex.closure(target, [s]) for s in sorted(target.simplices())]
            for _ in range(100):
                p = rng.random()
                subs.append(Subcomplex.closure(target, [t for t in tops if rng.random() < p] or [rng.choice(tops)]))
            for L in subs:
                P, rep = preimage(pi, L)
                assert rep.passed, rep.witness
                assert is_full_subcomplex(pi.source, P).passed
                assert is_k_large(P, 6).passed


@criterion(6, "projection maps are onto with connected preimages")
def test_surjective_and_connected_preimages(discs):
    for disc in discs:
        system, levels = safe_levels(disc)
        for k in levels:
            if k < 2:
                continue
            pi = pi_map(disc.complex, (disc.basepoint,), k)
            assert check_surjective(pi).passed
            target = system.sphere(k - 1)
            for s in [None, *sorted(target.simplices())]:
                K = target if s is None else Subcomplex.closure(target, [s])
                assert check_preimage_connected(pi, K).passed


@criterion(7, "contraction constant C(2) = 1/2 and measured decay within C^l")
def test_contraction(disc7):
    c = contraction_constant(2)
    assert c.C == Fraction(1, 2)
    _, _, ratio = contraction_oracle(2)
    assert abs(ratio - 0.5) < 1e-12
    pairs = 0
    for l in (1, 2, 3):
        rep = measure_contraction(disc7.complex, disc7.basepoint, 5, l, samples=1000, seed=l, tolerance=1e-9)
        assert rep.passed, rep.witness
        assert rep.stats["max_ratio"] <= float(c.C ** l) + 1e-9
        pairs += rep.stats["exact_pairs"] + rep.stats["approximate_pairs"]
    assert pairs >= 1000


@criterion(8, "four-point defect: degree 7 within 5/2, degree 6 control exceeds it")
def test_hyperbolicity(disc7, control6):
    t = time.perf_counter()
    rep = hyperbolicity_check(disc7.complex, 6, 2, base=disc7.basepoint)
    assert rep.stats["mode"] == "exhaustive"
    assert Fraction(rep.stats["delta"]) <= Fraction(5, 2)
    control = hyperbolicity_check(control6.complex, 15, 5, base=control6.basepoint)
    assert Fraction(control.stats["delta"]) > Fraction(5, 2)
    assert time.perf_counter() - t < 300


@criterion(9, "boundary hypotheses hold on a depth-4 system")
def test_daverman(disc7):
    system = build_system(disc7.complex, disc7.basepoint, 4)
    rep = daverman_report(system, samples=100)
    assert rep.passed, rep.to_dict()
    h2 = [d for d in rep.details if d.name == "hypothesis_2"][0]
    seq = [Fraction(a) for a in [d for d in h2.details if d.name == "decay_sequence"][0].stats["a"]]
    assert all(a > b for a, b in zip(seq, seq[1:]))


@criterion(10, "every sphere is connected and the inductive check agrees with BFS")
def test_connectedness(discs):
    for disc in discs:
        system = build_system(disc.complex, disc.basepoint, 4)
        assert connectedness_report(system).passed
        for k in range(1, system.depth + 1):
            S = system.sphere(k)
            bfs = nx.is_connected(skeleton(S.maximal_simplices))
            assert bfs and is_connected(S)
            if k >= 2:
                assert check_preimage_connected(system.maps[k], system.sphere(k - 1)).passed == bfs


@criterion(11, "surface stages follow the Euler recurrence with valid stage maps")
def test_pontryagin_stages():
    t = time.perf_counter()
    stages, maps = run_stages("tetrahedron", 3)
    assert stages[1].euler == -6 and stages[1].genus == 4
    for prev, nxt, smap in zip(stages, stages[1:], maps):
        F = len(prev.complex.faces(2))
        assert nxt.euler == prev.euler - 2 * F
        assert check_stage_map(smap).passed
        assert check_stage(nxt, prev).passed
    assert time.perf_counter() - t < 60


def _fresh_verify(disc):
    systolic.balls._cached_system.cache_clear()
    return cmd_verify_all(disc.complex, disc.basepoint, depth=4).dumps(timings=False)


@criterion(12, "verify runs are byte-identical modulo timings")
def test_determinism(disc7):
    first = _fresh_verify(disc7)
    second = _fresh_verify(disc7)
    assert first == second
    assert '"status": "fail"' not in first
