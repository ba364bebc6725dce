"""Combinatorial balls and spheres around a simplex, projections onto inner
spheres, and the link-connectivity condition R.

All computations go through :class:`BallSystem`, which runs one BFS from the
base simplex and derives every ball, sphere and interior from the distance
labels. Systems are cached per (complex, base) pair.
"""
from __future__ import annotations

from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable

from .complex import (
    Cells,
    Simplex,
    Subcomplex,
    Subdivision,
    barycentric_subdivision,
    bfs_distances,
    boundary_vertices,
    connected_components,
    is_chamber_complex,
    is_full_subcomplex,
    is_k_large,
    link,
)
from .errors import InvalidSimplexError, RangeError, SystolicityViolation
from .report import CheckReport


class BallSystem:
    """Distance layers around a base simplex ``Q`` of ``X``.

    Layer 0 holds the vertices of Q and layer i the vertices at 1-skeleton
    distance i from Q.
    """

    def __init__(self, parent: Cells, base: Iterable[int]):
        Q = tuple(sorted(base))
        if not Q or Q not in parent:
            raise InvalidSimplexError(f"{Q} is not a simplex of the complex")
        self.parent = parent
        self.base = Q
        self.distance = bfs_distances(parent, Q)
        self._balls: dict[int, Subcomplex] = {}
        self._spheres: dict[int, Subcomplex] = {}
        self._interiors: dict[int, Subcomplex] = {}
        self._projections: dict[Simplex, Simplex] = {}
        self._subdivisions: dict[int, Subdivision] = {}
        self.maps: dict[int, object] = {}

    @cached_property
    def layers(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for v, d in self.distance.items():
            out.setdefault(d, []).append(v)
        return [tuple(sorted(out[i])) for i in range(max(out) + 1)]

    @property
    def radius(self) -> int:
        """Largest nonempty layer index."""
        return len(self.layers) - 1

    @cached_property
    def _facet_level(self) -> dict[Simplex, int]:
        inf = len(self.parent.vertices) + 1
        return {m: min(self.distance.get(v, inf) for v in m) for m in self.parent.maximal_simplices}

    @cached_property
    def frontier_distance(self) -> int:
        """Distance from Q to the boundary of the finite complex.

        For a closed complex this is one more than the radius, so that every
        layer counts as safe.
        """
        bd = boundary_vertices(self.parent)
        ds = [self.distance[v] for v in bd if v in self.distance]
        return min(ds) if ds else self.radius + 1

    def safe_radius(self, reach: int = 0) -> int:
        """Largest level i with i + reach within the trustworthy region."""
        return min(self.frontier_distance - reach, self.radius)

    def layer(self, i: int) -> tuple[int, ...]:
        return self.layers[i] if 0 <= i < len(self.layers) else ()

    def ball(self, i: int) -> Subcomplex:
        if i < 0:
            raise RangeError("ball radius must be >= 0")
        if i not in self._balls:
            if i == 0:
                gens = [self.base]
            else:
                gens = [m for m, lvl in self._facet_level.items() if lvl <= i - 1]
            self._balls[i] = Subcomplex(self.parent, gens, check=False)
        return self._balls[i]

    def sphere(self, i: int) -> Subcomplex:
        """Subcomplex of B_i spanned by the distance-i vertices."""
        if i < 0:
            raise RangeError("sphere radius must be >= 0")
        if i not in self._spheres:
            if i == 0:
                self._spheres[i] = self.ball(0)
            else:
                ring = set(self.layer(i))
                gens = {tuple(v for v in m if v in ring) for m in self.ball(i).maximal_simplices}
                self._spheres[i] = Subcomplex(self.parent, gens, check=False)
        return self._spheres[i]

    def interior(self, i: int) -> Subcomplex:
        """B_i minus S_i: simplices of B_i with every vertex at distance < i."""
        if i < 0:
            raise RangeError("interior radius must be >= 0")
        if i not in self._interiors:
            if i == 0:
                self._interiors[i] = self.ball(0)
            else:
                gens = {tuple(v for v in m if self.distance[v] < i) for m in self.ball(i).maximal_simplices}
                self._interiors[i] = Subcomplex(self.parent, gens, check=False)
        return self._interiors[i]

    def subdivided_sphere(self, i: int) -> Subdivision:
        if i not in self._subdivisions:
            self._subdivisions[i] = barycentric_subdivision(self.sphere(i))
        return self._subdivisions[i]

    def projection(self, tau: Iterable[int]) -> Simplex:
        """The simplex X_tau ∩ B_{i-1} for a simplex tau of S_i.

        Raises SystolicityViolation when that intersection is empty or is not
        the closure of a single simplex.
        """
        tau = tuple(sorted(tau))
        if tau in self._projections:
            return self._projections[tau]
        levels = {self.distance.get(v) for v in tau}
        if len(levels) != 1 or None in levels:
            raise InvalidSimplexError(f"{tau} does not lie in one sphere around {self.base}")
        i = levels.pop()
        if i < 1 or tau not in self.sphere(i):
            raise InvalidSimplexError(f"{tau} is not a simplex of S_{i}")
        inner = self.ball(i - 1)
        fs = set(tau)
        candidates = set()
        for m in self.parent.star_index[tau[0]]:
            if fs.issubset(m):
                rest = tuple(v for v in m if v not in fs and self.distance[v] <= i - 1)
                for r in range(1, len(rest) + 1):
                    candidates.update(c for c in combinations(rest, r) if c in inner)
        maximal = sorted(c for c in candidates if not any(set(c) < set(o) for o in candidates))
        if len(maximal) != 1:
            raise SystolicityViolation(
                f"projection of {tau} onto S_{i - 1} is not a single simplex",
                witness={"tau": tau, "level": i, "projection_facets": maximal},
            )
        self._projections[tau] = maximal[0]
        return maximal[0]


@lru_cache(maxsize=64)
def _cached_system(parent: Cells, base: Simplex) -> BallSystem:
    return BallSystem(parent, base)


def ball_system(X: Cells, Q: Iterable[int]) -> BallSystem:
    return _cached_system(X, tuple(sorted(Q)))


def _base(Q) -> Simplex:
    return (Q,) if isinstance(Q, int) else tuple(sorted(Q))


def ball(X: Cells, Q, i: int) -> Subcomplex:
    """B_i(Q, X): union of simplices meeting B_{i-1}; B_0 = Q."""
    return ball_system(X, _base(Q)).ball(i)


def sphere(X: Cells, Q, i: int) -> Subcomplex:
    """S_i(Q, X); empty beyond the last layer."""
    return ball_system(X, _base(Q)).sphere(i)


def interior_ball(X: Cells, Q, i: int) -> Subcomplex:
    """Open ball B_i minus S_i. At i = 0 this is Q by convention."""
    return ball_system(X, _base(Q)).interior(i)


def projection_simplex(X: Cells, Q, i: int, tau: Iterable[int]) -> Simplex:
    tau = tuple(sorted(tau))
    system = ball_system(X, _base(Q))
    if any(system.distance.get(v) != i for v in tau):
        raise InvalidSimplexError(f"{tau} is not contained in S_{i}")
    return system.projection(tau)


def projection_identities(X: Cells, Q, tau: Iterable[int]) -> CheckReport:
    """For tau in S_i with projection rho, X_tau ∩ B_i = B_1(rho, X_tau) and
    X_tau ∩ S_i = S_1(rho, X_tau), compared simplex by simplex."""
    system = ball_system(X, _base(Q))
    tau = tuple(sorted(tau))
    i = system.distance[tau[0]]
    rho = system.projection(tau)
    lk = link(X, tau)
    local = ball_system(lk, rho)
    in_ball = {s for s in lk.simplices() if s in system.ball(i)}
    in_sphere = {s for s in lk.simplices() if s in system.sphere(i)}
    b1 = set(local.ball(1).simplices())
    s1 = set(local.sphere(1).simplices())
    if in_ball != b1:
        return CheckReport.fail("projection_identities", {"tau": tau, "rho": rho, "ball_mismatch": in_ball ^ b1})
    if in_sphere != s1:
        return CheckReport.fail("projection_identities", {"tau": tau, "rho": rho, "sphere_mismatch": in_sphere ^ s1})
    return CheckReport.ok("projection_identities")


def check_projection_simplices(X: Cells, Q, i: int, identities: bool = True) -> CheckReport:
    """Every simplex of S_i has a single-simplex projection (and, optionally,
    satisfies the link identities)."""
    system = ball_system(X, _base(Q))
    name = f"projection_simplices[{i}]"
    S = system.sphere(i)
    count = 0
    for tau in S.simplices():
        count += 1
        try:
            system.projection(tau)
        except SystolicityViolation as exc:
            return CheckReport.fail(name, exc.witness, examined=count)
        if identities:
            rep = projection_identities(X, system.base, tau)
            if rep.failed:
                return CheckReport.fail(name, rep.witness, examined=count)
    return CheckReport.ok(name, examined=count, identities_checked=identities)


def check_sphere_facts(X: Cells, Q, i: int) -> CheckReport:
    """Fullness and 6-largeness of S_i and B_i, chamber structure of S_i and
    outward extension of its top simplices."""
    system = ball_system(X, _base(Q))
    S, B = system.sphere(i), system.ball(i)
    checks = []
    for label, sub in (("sphere", S), ("ball", B)):
        r = is_full_subcomplex(X, sub)
        r.name = f"{label}_full[{i}]"
        checks.append(r)
        r = is_k_large(sub, 6)
        r.name = f"{label}_6_large[{i}]"
        checks.append(r)

    frontier = [v for v, d in system.distance.items() if d >= system.frontier_distance]
    ambient = is_chamber_complex(X, frontier=frontier)
    n = X.dim
    if ambient.passed and i >= 1:
        r = is_chamber_complex(S)
        if r.passed and r.stats["dim"] != n - 1:
            r = CheckReport.fail("", {"sphere_dim": r.stats["dim"], "expected": n - 1})
        r.name = f"sphere_chamber[{i}]"
        checks.append(r)
    else:
        checks.append(CheckReport.skip(f"sphere_chamber[{i}]", "ambient complex is not a chamber complex"))

    name = f"outward_extension[{i}]"
    if i + 1 > system.safe_radius(0) or not ambient.passed:
        checks.append(CheckReport.skip(name, "next layer is at the truncation frontier"))
    else:
        missing = None
        tops = S.faces(n - 1) if S.dim == n - 1 else frozenset()
        for sigma in sorted(tops):
            fs = set(sigma)
            ok = any(
                any(system.distance[v] == i + 1 for v in m if v not in fs)
                for m in X.star_index[sigma[0]]
                if fs.issubset(m)
            )
            if not ok:
                missing = sigma
                break
        if missing is None:
            checks.append(CheckReport.ok(name, top_simplices=len(tops)))
        else:
            checks.append(CheckReport.fail(name, {"simplex": missing}))
    return CheckReport.bundle(f"sphere_facts[{i}]", checks)


def condition_R(X: Cells, v: int, max_reach: int = 3) -> CheckReport:
    """For every simplex sigma of the link X_v, the span of link vertices at
    link-distance >= r from sigma is connected, for r = 2..max_reach.

    An empty complement counts as connected and is tallied in the stats.
    """
    lk = link(X, (v,))
    name = f"condition_R[{v}]"
    empty = 0
    examined = 0
    for sigma in lk.simplices():
        dist = bfs_distances(lk, sigma)
        for r in range(2, max_reach + 1):
            examined += 1
            rest = [u for u in lk.vertices if dist.get(u, r) >= r]
            if not rest:
                empty += 1
                continue
            comps = connected_components(Subcomplex.span(lk, rest))
            if len(comps) > 1:
                return CheckReport.fail(name, {"vertex": v, "sigma": sigma, "radius": r, "components": comps})
    return CheckReport.ok(name, complements_examined=examined, empty_complements=empty)
