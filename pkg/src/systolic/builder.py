"""Test complexes: layered hyperbolic discs and small random clique complexes.

A disc is grown ring by ring around a basepoint. Going from ring ``i`` to
ring ``i+1`` every ring edge gets one outward triangle, and every ring vertex
``u`` gets ``a(u) >= 1`` extra outward triangles fanned around it so that its
final degree hits its target. Since each new vertex touches at most two
consecutive vertices of the previous ring, rings are exactly the BFS spheres
around the basepoint and every interior vertex link is a cycle of length equal
to its target degree.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx

from .complex import SimplicialComplex
from .errors import ConstructionError, RangeError
from .serialize import load_complex  # noqa: F401  (re-exported entry point)


@dataclass(frozen=True)
class DiscSpec:
    min_degree: int = 7
    radius: int = 1
    seed: int | None = None

    def __post_init__(self):
        if self.min_degree < 7:
            raise RangeError(f"min_degree must be >= 7, got {self.min_degree}")
        if self.radius < 1:
            raise RangeError(f"radius must be >= 1, got {self.radius}")


@dataclass
class Disc:
    """A built disc: the complex, its basepoint and the vertex rings."""

    complex: SimplicialComplex
    basepoint: int
    layers: list[list[int]]
    target_degree: dict[int, int] = field(repr=False)

    @property
    def radius(self) -> int:
        return len(self.layers) - 1

    @property
    def frontier(self) -> list[int]:
        return self.layers[-1]


def _grow(radius: int, degree_of) -> Disc:
    center = 0
    next_id = 1
    targets = {center: degree_of()}
    first = list(range(next_id, next_id + targets[center]))
    next_id += len(first)
    facets = [(center, first[j], first[(j + 1) % len(first)]) for j in range(len(first))]
    current = {u: 3 for u in first}
    layers = [[center], first]
    for u in first:
        targets[u] = degree_of()

    for _ in range(radius - 1):
        ring = layers[-1]
        m = len(ring)
        fans = []
        for u in ring:
            a = targets[u] - current[u] - 1
            if a < 1:
                raise ConstructionError(
                    f"vertex {u} already has degree {current[u]}; target {targets[u]} is unreachable"
                )
            fans.append(a)
        new_ring: list[int] = []
        edge_apex: list[int] = []
        private: list[list[int]] = []
        for j in range(m):
            private.append(list(range(next_id, next_id + fans[j] - 1)))
            next_id += fans[j] - 1
            new_ring.extend(private[j])
            edge_apex.append(next_id)
            new_ring.append(next_id)
            next_id += 1
        for j, u in enumerate(ring):
            nxt = ring[(j + 1) % m]
            facets.append((u, nxt, edge_apex[j]))
            fan = [edge_apex[j - 1]] + private[j] + [edge_apex[j]]
            facets.extend((u, fan[t], fan[t + 1]) for t in range(len(fan) - 1))
            current[u] += len(fan)
        for w in new_ring:
            current[w] = 3
        for w in edge_apex:
            current[w] = 4
        for w in new_ring:
            targets[w] = degree_of()
        layers.append(new_ring)

    return Disc(SimplicialComplex(facets), center, layers, targets)


def build_disc(spec: DiscSpec) -> Disc:
    """Layered disc whose interior vertices have degree min_degree (or +1 with a seed)."""
    if spec.seed is None:
        return _grow(spec.radius, lambda: spec.min_degree)
    rng = random.Random(spec.seed)
    return _grow(spec.radius, lambda: rng.choice((spec.min_degree, spec.min_degree + 1)))


def build_control_disc(degree: int, radius: int) -> Disc:
    """Homogeneous layered disc of any degree, for contrast runs.

    Degree 6 gives a flat (triangular lattice) disc that is locally 6-large
    but not locally 7-large; degrees below 6 cannot be grown this way.
    """
    if radius < 1:
        raise RangeError(f"radius must be >= 1, got {radius}")
    return _grow(radius, lambda: degree)


def random_small_complex(num_vertices: int, density: float, seed: int | None = None) -> SimplicialComplex:
    """Clique complex of an Erdos-Renyi graph, reproducible from ``seed``."""
    if num_vertices < 1:
        raise RangeError("need at least one vertex")
    rng = random.Random(seed)
    g = nx.empty_graph(num_vertices)
    for u, v in combinations(range(num_vertices), 2):
        if rng.random() < density:
            g.add_edge(u, v)
    return SimplicialComplex(tuple(c) for c in nx.find_cliques(g))
