"""Finite abstract simplicial complexes and the predicates built on them.

Complexes are stored by their maximal simplices. Every other face, the
1-skeleton adjacency and the vertex-to-facet index are derived lazily and
cached; instances are never mutated after construction.

Simplices are strictly increasing tuples of integer vertex labels.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations
from typing import Iterable, Iterator

import networkx as nx

from .errors import (
    ComplexValidationError,
    InvalidSimplexError,
    InvalidSubcomplexError,
    RangeError,
)
from .report import CheckReport

Simplex = tuple[int, ...]


def as_simplex(vertices: Iterable[int]) -> Simplex:
    """Normalize a vertex collection into a sorted tuple.

    Raises ComplexValidationError on an empty collection or a repeated vertex.
    """
    vs = [int(v) for v in vertices]
    if not vs:
        raise ComplexValidationError("empty simplex", offending=())
    s = tuple(sorted(vs))
    if len(set(s)) != len(s):
        raise ComplexValidationError(f"simplex {vs} repeats a vertex", offending=tuple(vs))
    return s


def maximal_only(simplices: Iterable[Simplex]) -> frozenset[Simplex]:
    """Drop every simplex contained in another member of the collection."""
    by_size = sorted(set(simplices), key=lambda s: (-len(s), s))
    kept: list[Simplex] = []
    index: dict[int, list[frozenset]] = {}
    for s in by_size:
        fs = frozenset(s)
        if any(fs <= other for other in index.get(s[0], ())):
            continue
        kept.append(s)
        for v in s:
            index.setdefault(v, []).append(fs)
    return frozenset(kept)


class _Cells:
    """Face structure shared by complexes and subcomplexes."""

    maximal_simplices: frozenset[Simplex]

    @cached_property
    def facets(self) -> tuple[Simplex, ...]:
        return tuple(sorted(self.maximal_simplices, key=lambda s: (len(s), s)))

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for s in self.maximal_simplices for v in s}))

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def dim(self) -> int:
        return max((len(s) for s in self.maximal_simplices), default=0) - 1

    @cached_property
    def star_index(self) -> dict[int, tuple[Simplex, ...]]:
        """Vertex -> maximal simplices containing it."""
        idx: dict[int, list[Simplex]] = {}
        for s in self.facets:
            for v in s:
                idx.setdefault(v, []).append(s)
        return {v: tuple(ss) for v, ss in idx.items()}

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for s in self.maximal_simplices:
            for a, b in combinations(s, 2):
                adj[a].add(b)
                adj[b].add(a)
        return {v: frozenset(n) for v, n in adj.items()}

    @cached_property
    def _faces_by_dim(self) -> dict[int, frozenset[Simplex]]:
        out: dict[int, set[Simplex]] = {}
        for s in self.maximal_simplices:
            for r in range(1, len(s) + 1):
                out.setdefault(r - 1, set()).update(combinations(s, r))
        return {d: frozenset(f) for d, f in out.items()}

    def faces(self, d: int) -> frozenset[Simplex]:
        if d < 0 or d > self.dim:
            raise RangeError(f"dimension {d} outside 0..{self.dim}")
        return self._faces_by_dim.get(d, frozenset())

    def simplices(self) -> Iterator[Simplex]:
        for d in sorted(self._faces_by_dim):
            yield from sorted(self._faces_by_dim[d])

    @cached_property
    def num_simplices(self) -> int:
        return sum(len(f) for f in self._faces_by_dim.values())

    def f_vector(self) -> list[int]:
        return [len(self._faces_by_dim.get(d, ())) for d in range(self.dim + 1)]

    def __contains__(self, simplex) -> bool:
        s = tuple(sorted(simplex))
        if not s:
            return False
        fs = set(s)
        return any(fs.issubset(m) for m in self.star_index.get(s[0], ()))

    def __eq__(self, other):
        if not isinstance(other, _Cells):
            return NotImplemented
        return self.maximal_simplices == other.maximal_simplices

    def __hash__(self):
        return hash(self.maximal_simplices)

    def is_empty(self) -> bool:
        return not self.maximal_simplices

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((u, v) for u, ns in self.adjacency.items() for v in ns if u < v)
        return g


class SimplicialComplex(_Cells):
    """A finite abstract simplicial complex given by generating simplices.

    The generators need not be maximal; nested ones are discarded. Labels are
    arbitrary integers; :meth:`normalized` relabels them densely.
    """

    def __init__(self, simplices: Iterable[Iterable[int]] = ()):
        self.maximal_simplices = maximal_only(as_simplex(s) for s in simplices)

    def __repr__(self):
        return f"SimplicialComplex(V={self.num_vertices}, dim={self.dim}, facets={len(self.maximal_simplices)})"

    def normalized(self) -> tuple[SimplicialComplex, dict[int, int]]:
        """Return a copy with vertices relabelled 0..V-1 (in label order)."""
        relabel = {v: i for i, v in enumerate(self.vertices)}
        return SimplicialComplex(tuple(relabel[v] for v in s) for s in self.maximal_simplices), relabel

    def whole(self) -> Subcomplex:
        return Subcomplex(self, self.maximal_simplices, check=False)


class Subcomplex(_Cells):
    """A face-closed family of simplices of a parent complex.

    Stored by its maximal members; membership is derived from them.
    """

    def __init__(self, parent: _Cells, generators: Iterable[Iterable[int]], check: bool = True):
        self.parent = parent
        gens = maximal_only(t for t in (tuple(sorted(g)) for g in generators) if t)
        if check:
            for g in gens:
                if g not in parent:
                    raise InvalidSubcomplexError(f"{g} is not a simplex of the parent complex")
        self.maximal_simplices = gens

    def __repr__(self):
        return f"Subcomplex(V={self.num_vertices}, dim={self.dim}, facets={len(self.maximal_simplices)})"

    @classmethod
    def span(cls, parent: _Cells, vertices: Iterable[int]) -> Subcomplex:
        """The full subcomplex of ``parent`` on a vertex set."""
        vs = set(vertices)
        gens = set()
        for v in vs:
            for m in parent.star_index.get(v, ()):
                gens.add(tuple(u for u in m if u in vs))
        return cls(parent, gens, check=False)

    @classmethod
    def closure(cls, parent: _Cells, simplices: Iterable[Iterable[int]]) -> Subcomplex:
        return cls(parent, simplices, check=True)

    def as_complex(self) -> SimplicialComplex:
        return SimplicialComplex(self.maximal_simplices)

    def whole(self) -> Subcomplex:
        return Subcomplex(self, self.maximal_simplices, check=False)


Cells = _Cells


def faces(X: _Cells, d: int) -> frozenset[Simplex]:
    """All ``d``-dimensional faces of ``X``."""
    return X.faces(d)


def link(X: _Cells, sigma: Iterable[int]) -> SimplicialComplex:
    """Link of a simplex: all tau disjoint from sigma with tau * sigma in X."""
    s = tuple(sorted(sigma))
    if not s or s not in X:
        raise InvalidSimplexError(f"{s} is not a simplex of the complex")
    fs = set(s)
    gens = []
    for m in X.star_index[s[0]]:
        if fs.issubset(m):
            rest = tuple(v for v in m if v not in fs)
            if rest:
                gens.append(rest)
    return SimplicialComplex(gens)


def _minimal_non_face(X: _Cells, clique: Simplex) -> Simplex | None:
    for r in range(3, len(clique) + 1):
        for sub in combinations(clique, r):
            if sub not in X:
                return sub
    return None


def is_flag(X: _Cells) -> CheckReport:
    """Every clique of the 1-skeleton spans a simplex.

    The witness is a smallest vertex set that is a clique but not a face.
    """
    best = None
    examined = 0
    for clique in nx.find_cliques(X.graph()):
        examined += 1
        c = tuple(sorted(clique))
        if len(c) < 3 or c in X:
            continue
        w = _minimal_non_face(X, c)
        if w is not None and (best is None or (len(w), w) < (len(best), best)):
            best = w
            if len(best) == 3:
                break
    if best is not None:
        return CheckReport.fail("is_flag", {"empty_clique": best}, cliques_examined=examined)
    return CheckReport.ok("is_flag", cliques_examined=examined)


def is_full_subcomplex(X: _Cells, A: _Cells) -> CheckReport:
    """Every vertex set of ``A`` spanning a simplex of ``X`` spans one in ``A``."""
    for g in A.maximal_simplices:
        if g not in X:
            raise InvalidSubcomplexError(f"{g} is not a simplex of the ambient complex")
    span = Subcomplex.span(X, A.vertices)
    for g in sorted(span.maximal_simplices):
        if g not in A:
            for r in range(2, len(g) + 1):
                for sub in combinations(g, r):
                    if sub not in A:
                        return CheckReport.fail("is_full_subcomplex", {"spans_in_ambient_only": sub})
    return CheckReport.ok("is_full_subcomplex", vertices=A.num_vertices)


def find_induced_cycle(adj: dict[int, frozenset[int]], length: int) -> list[int] | None:
    """Find a chordless cycle with exactly ``length`` vertices (length >= 4).

    The cycle is returned starting at its smallest vertex.
    """
    order = sorted(adj)

    for s in order:
        path = [s]
        on_path = {s}

        def extend() -> list[int] | None:
            last = path[-1]
            interior = path[1:-1]
            for x in sorted(adj[last]):
                if x <= s or x in on_path:
                    continue
                if interior and not adj[x].isdisjoint(interior):
                    continue
                closes = len(path) >= 2 and s in adj[x]
                if len(path) + 1 == length:
                    if closes and len(path) >= 3:
                        return path + [x]
                    continue
                if closes:
                    continue
                path.append(x)
                on_path.add(x)
                found = extend()
                if found:
                    return found
                path.pop()
                on_path.discard(x)
            return None

        found = extend()
        if found:
            return found
    return None


def is_k_large(X: _Cells, k: int) -> CheckReport:
    """Flag, and no chordless cycle with 4 <= length < k in the 1-skeleton."""
    if k < 4:
        raise RangeError(f"k-largeness needs k >= 4, got {k}")
    name = f"is_{k}_large"
    flag = is_flag(X)
    if flag.failed:
        return CheckReport.fail(name, flag.witness)
    adj = X.adjacency
    for length in range(4, k):
        cyc = find_induced_cycle(adj, length)
        if cyc is not None:
            return CheckReport.fail(name, {"induced_cycle": cyc})
    return CheckReport.ok(name, vertices=X.num_vertices)


def is_locally_k_large(X: _Cells, k: int) -> CheckReport:
    """Every nonempty simplex has a k-large link."""
    name = f"is_locally_{k}_large"
    cache: dict[frozenset, CheckReport] = {}
    examined = 0
    for sigma in X.simplices():
        examined += 1
        lk = link(X, sigma)
        key = lk.maximal_simplices
        rep = cache.get(key)
        if rep is None:
            rep = is_k_large(lk, k)
            cache[key] = rep
        if rep.failed:
            return CheckReport.fail(name, {"simplex": sigma, **rep.witness}, simplices_examined=examined)
    return CheckReport.ok(name, simplices_examined=examined)


def _gallery_connected(chambers: list[Simplex]) -> bool:
    if not chambers:
        return False
    if len(chambers[0]) == 1:
        return True
    ridge_owner: dict[Simplex, list[int]] = {}
    for i, c in enumerate(chambers):
        for r in combinations(c, len(c) - 1):
            ridge_owner.setdefault(r, []).append(i)
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for r in combinations(chambers[i], len(chambers[i]) - 1):
            for j in ridge_owner[r]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
    return len(seen) == len(chambers)


def is_chamber_complex(X: _Cells, frontier: Iterable[int] = ()) -> CheckReport:
    """Chamber, pseudomanifold, gallery-connectedness and normality flags.

    The report passes iff ``X`` is a chamber complex. Codimension-one faces
    lying entirely in ``frontier`` (the truncation boundary of a finite piece
    of a larger complex) are exempt from the chamber-count conditions.
    """
    name = "is_chamber_complex"
    chambers = sorted(X.maximal_simplices)
    if not chambers:
        return CheckReport.fail(name, {"reason": "no chambers"}, chamber=False, pseudomanifold=False,
                                gallery_connected=False, normal=False)
    n = X.dim
    impure = [c for c in chambers if len(c) != n + 1]
    frontier = set(frontier)
    counts: dict[Simplex, int] = {}
    for c in chambers:
        for r in combinations(c, len(c) - 1):
            counts[r] = counts.get(r, 0) + 1
    considered = {r: c for r, c in counts.items() if not (r and set(r) <= frontier)}
    thin = sorted(r for r, c in considered.items() if c < 2)
    thick = sorted(r for r, c in considered.items() if c > 2)
    chamber = not impure and not thin
    pseudo = chamber and not thick
    gallery = _gallery_connected(chambers)
    normal = gallery
    bad_link = None
    if chamber and gallery:
        for sigma in X.simplices():
            if len(sigma) >= n:  # link dimension n - |sigma| must be >= 1
                continue
            lk = link(X, sigma)
            if not _gallery_connected(sorted(lk.maximal_simplices)):
                normal = False
                bad_link = sigma
                break
    flags = dict(chamber=chamber, pseudomanifold=pseudo, gallery_connected=gallery,
                 normal=normal and chamber, dim=n)
    if not chamber:
        witness = {"impure": impure[:1]} if impure else {"thin_face": thin[0]}
        return CheckReport.fail(name, witness, **flags)
    rep = CheckReport.ok(name, **flags)
    if thick:
        rep.stats["thick_face"] = thick[0]
    if bad_link is not None:
        rep.stats["disconnected_link_of"] = bad_link
    return rep


@dataclass
class Subdivision:
    """First barycentric subdivision together with its vertex correspondence.

    Vertex ``i`` of ``complex`` is the barycenter of ``simplex_of[i]``.
    """

    complex: SimplicialComplex
    simplex_of: tuple[Simplex, ...]
    id_of: dict[Simplex, int]

    def barycenter(self, simplex: Iterable[int]) -> int:
        return self.id_of[tuple(sorted(simplex))]

    def chain(self, ids: Iterable[int]) -> list[Simplex]:
        return sorted((self.simplex_of[i] for i in ids), key=len)


def barycentric_subdivision(X: _Cells) -> Subdivision:
    """Vertices are the simplices of X; simplices are inclusion chains."""
    simplex_of = tuple(X.simplices())
    id_of = {s: i for i, s in enumerate(simplex_of)}
    chains = []
    for m in X.maximal_simplices:
        for perm in permutations(m):
            chains.append(tuple(id_of[tuple(sorted(perm[: r + 1]))] for r in range(len(perm))))
    return Subdivision(SimplicialComplex(chains), simplex_of, id_of)


def bfs_distances(X: _Cells, sources: Iterable[int], limit: int | None = None) -> dict[int, int]:
    """1-skeleton distances from a source set; unreachable vertices are absent."""
    adj = X.adjacency
    dist = {}
    queue = deque()
    for s in sources:
        if s not in adj:
            raise InvalidSimplexError(f"vertex {s} not in complex")
        dist[s] = 0
        queue.append(s)
    while queue:
        u = queue.popleft()
        if limit is not None and dist[u] >= limit:
            continue
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def graph_distance(X: _Cells, u: int, v: int) -> int | None:
    """BFS distance in the 1-skeleton, or None when disconnected."""
    if v not in X.adjacency:
        raise InvalidSimplexError(f"vertex {v} not in complex")
    return bfs_distances(X, [u]).get(v)


def all_pairs_distances(X: _Cells, subset: Iterable[int] | None = None) -> dict[int, dict[int, int]]:
    """Distances from every vertex of ``subset`` (default: all) to all of X."""
    subset = X.vertices if subset is None else sorted(subset)
    return {u: bfs_distances(X, [u]) for u in subset}


def connected_components(A: _Cells) -> list[list[int]]:
    """Vertex partition by 1-skeleton connectivity, ordered by least vertex."""
    seen: set[int] = set()
    comps = []
    for v in A.vertices:
        if v in seen:
            continue
        comp = sorted(bfs_distances(A, [v]))
        seen.update(comp)
        comps.append(comp)
    return comps


def is_connected(A: _Cells) -> bool:
    return len(connected_components(A)) == 1


def euler_characteristic(X: _Cells) -> int:
    return sum((-1) ** d * c for d, c in enumerate(X.f_vector()))


def boundary_vertices(X: _Cells) -> frozenset[int]:
    """Vertices of codimension-one faces that lie in exactly one top simplex."""
    n = X.dim
    if n < 1:
        return frozenset()
    counts: dict[Simplex, int] = {}
    for m in X.maximal_simplices:
        if len(m) == n + 1:
            for r in combinations(m, n):
                counts[r] = counts.get(r, 0) + 1
    return frozenset(v for r, c in counts.items() if c == 1 for v in r)
