import networkx as nx
import pytest

from oracles import bfs_layers
from systolic.balls import ball_system, condition_R
from systolic.builder import DiscSpec, build_control_disc, build_disc, random_small_complex
from systolic.complex import SimplicialComplex, is_flag, is_locally_k_large, link
from systolic.errors import ConstructionError, RangeError


def test_radius_one_is_a_wheel():
    d = build_disc(DiscSpec(7, 1))
    X = d.complex
    assert X.num_vertices == 8 and len(X.maximal_simplices) == 7
    assert len(X.adjacency[d.basepoint]) == 7


def test_radius_two_is_locally_7_large():
    d = build_disc(DiscSpec(7, 2))
    assert is_locally_k_large(d.complex, 7).passed
    assert len(d.layers[1]) == 7


@pytest.mark.parametrize("spec", [DiscSpec(7, 3), DiscSpec(7, 5), DiscSpec(8, 4), DiscSpec(7, 5, seed=3)])
def test_layers_match_bfs_spheres(spec):
    d = build_disc(spec)
    dist = bfs_layers(d.complex.maximal_simplices, d.basepoint)
    for i, layer in enumerate(d.layers):
        assert sorted(layer) == sorted(v for v, di in dist.items() if di == i)


def test_known_ring_sizes(disc7, disc78):
    assert [len(x) for x in disc7.layers] == [1, 7, 21, 56, 147, 385, 1008]
    assert [len(x) for x in disc78.layers] == [1, 7, 26, 82, 263, 834, 2673]


def test_interior_degrees_hit_targets(any_disc):
    X = any_disc.complex
    interior = [v for layer in any_disc.layers[:-1] for v in layer]
    for v in interior:
        lk = link(X, (v,))
        assert nx.is_isomorphic(lk.graph(), nx.cycle_graph(any_disc.target_degree[v]))
        assert any_disc.target_degree[v] >= 7


def test_jitter_uses_both_degrees(disc78):
    assert set(disc78.target_degree.values()) == {7, 8}


def test_disc_properties(any_disc):
    X = any_disc.complex
    assert is_flag(X).passed
    assert is_locally_k_large(X, 7).passed
    assert nx.is_connected(X.graph())
    # a disc: Euler characteristic 1
    f = X.f_vector()
    assert f[0] - f[1] + f[2] == 1


def test_condition_R_at_basepoint_neighbourhood(any_disc):
    system = ball_system(any_disc.complex, (any_disc.basepoint,))
    for v in [v for v, d in system.distance.items() if d <= system.safe_radius(3)]:
        assert condition_R(any_disc.complex, v).passed


def test_builder_is_deterministic():
    a = build_disc(DiscSpec(7, 4, seed=11))
    b = build_disc(DiscSpec(7, 4, seed=11))
    assert a.complex == b.complex and a.layers == b.layers


def test_spec_validation():
    with pytest.raises(RangeError):
        DiscSpec(6, 3)
    with pytest.raises(RangeError):
        DiscSpec(7, 0)


def test_unreachable_degree_raises():
    # degree-5 targets cannot be met once the first ring is closed
    with pytest.raises(ConstructionError):
        build_control_disc(5, 3)


def test_control_disc_is_flat(control6):
    assert [len(x) for x in control6.layers[:4]] == [1, 6, 12, 18]
    assert is_locally_k_large(control6.complex, 6).passed
    assert is_locally_k_large(control6.complex, 7).failed


def test_random_small_complex_examples():
    assert random_small_complex(4, 1.0, seed=0).maximal_simplices == {(0, 1, 2, 3)}
    iso = random_small_complex(5, 0.0, seed=0)
    assert iso.maximal_simplices == {(i,) for i in range(5)}
    assert random_small_complex(8, 0.4, seed=1) == random_small_complex(8, 0.4, seed=1)
    assert isinstance(random_small_complex(8, 0.4, seed=1), SimplicialComplex)
