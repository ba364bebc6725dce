"""Projection maps between consecutive spheres and exact point propagation.

Each vertex ``w`` of S_k is sent to the barycenter of its projection simplex
on S_{k-1}; extending affinely over simplices gives a simplicial map
S_k -> S'_{k-1}. Points are carried with exact rational barycentric
coordinates, so compositions and thread compatibility are decided by equality
of fractions.

Distances between points are only computed inside a single simplex, where a
unit regular simplex gives ``d(x, y)^2 = 1/2 * sum((x_i - y_i)^2)``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .balls import BallSystem, ball_system
from .complex import (
    Cells,
    Simplex,
    Subcomplex,
    Subdivision,
    barycentric_subdivision,
    connected_components,
    graph_distance,
    is_full_subcomplex,
    is_k_large,
)
from .errors import ChainViolation, RangeError, SystolicityViolation
from .report import CheckReport


@dataclass(frozen=True)
class SpherePoint:
    """A point of S_level: a support simplex and positive rational weights."""

    level: int
    support: Simplex
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.support) != len(self.coeffs) or not self.support:
            raise ValueError("support and coefficients must be nonempty and of equal length")
        if list(self.support) != sorted(set(self.support)):
            raise ValueError(f"support {self.support} must be strictly increasing")
        if any(c <= 0 for c in self.coeffs):
            raise ValueError("coefficients must be positive")
        if sum(self.coeffs) != 1:
            raise ValueError(f"coefficients sum to {sum(self.coeffs)}, not 1")

    @classmethod
    def vertex(cls, level: int, w: int) -> SpherePoint:
        return cls(level, (w,), (Fraction(1),))

    @classmethod
    def from_mapping(cls, level: int, weights: Mapping[int, Fraction]) -> SpherePoint:
        items = sorted((v, Fraction(c)) for v, c in weights.items() if c != 0)
        return cls(level, tuple(v for v, _ in items), tuple(c for _, c in items))

    @classmethod
    def parse(cls, level: int, text: str) -> SpherePoint:
        """Parse ``"w1:1/2,w2:1/2"``."""
        weights = {}
        for part in text.split(","):
            v, c = part.split(":")
            weights[int(v)] = weights.get(int(v), 0) + Fraction(c.strip())
        return cls.from_mapping(level, weights)

    def as_mapping(self) -> dict[int, Fraction]:
        return dict(zip(self.support, self.coeffs))

    def to_dict(self) -> dict:
        return {"level": self.level, "support": list(self.support), "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> SpherePoint:
        return cls(int(data["level"]), tuple(data["support"]), tuple(Fraction(c) for c in data["coeffs"]))


def distance_sq_in_simplex(x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> Fraction:
    """Squared distance of two points of one unit regular simplex."""
    keys = set(x) | set(y)
    return Fraction(1, 2) * sum((x.get(v, 0) - y.get(v, 0)) ** 2 for v in keys)


@dataclass(frozen=True)
class ContractionConstant:
    """Per-simplex contraction constant of the projections for dim(X) = n.

    ``D`` is the distance from a vertex of the regular unit (n-1)-simplex to
    the opposite facet, ``E`` the diameter of a top simplex of its barycentric
    subdivision (vertex to centroid). Squares are kept exact; C = E/D is the
    rational (n-1)/n.
    """

    n: int
    D_sq: Fraction
    E_sq: Fraction
    C: Fraction

    @property
    def D(self) -> float:
        return math.sqrt(self.D_sq)

    @property
    def E(self) -> float:
        return math.sqrt(self.E_sq)


def contraction_constant(n: int) -> ContractionConstant:
    if n < 2:
        raise RangeError(f"contraction constant needs n >= 2, got {n}")
    m = n - 1
    # unit regular m-simplex: vertex-to-centroid of a j-face is sqrt(j / (2(j+1)))
    D_sq = Fraction(m + 1, 2 * m)
    E_sq = Fraction(m, 2 * (m + 1))
    C = Fraction(n - 1, n)
    assert C * C == E_sq / D_sq
    return ContractionConstant(n, D_sq, E_sq, C)


@dataclass
class SimplicialMap:
    """The projection S_k -> S'_{k-1} as a vertex assignment.

    Target vertices are ids of ``target.complex``; ``target.simplex_of`` maps
    each one back to the simplex of S_{k-1} it is the barycenter of.
    """

    source: Subcomplex
    target: Subdivision
    vertex_assignment: dict[int, int]
    level: int
    system: BallSystem

    def __post_init__(self):
        for sigma in self.source.maximal_simplices:
            img = self.image(sigma)
            if img not in self.target.complex:
                raise ChainViolation(
                    f"image of {sigma} is not a simplex of S'_{self.level - 1}",
                    witness={"simplex": sigma, "projections": [self.projection(w) for w in sigma]},
                )

    def projection(self, w: int) -> Simplex:
        return self.target.simplex_of[self.vertex_assignment[w]]

    def image(self, sigma: Iterable[int]) -> tuple[int, ...]:
        return tuple(sorted({self.vertex_assignment[w] for w in sigma}))


def pi_vertex(X: Cells, Q, k: int, w: int) -> Simplex:
    """Image of a vertex of S_k: the barycenter of its projection simplex,
    identified with that simplex of S_{k-1}."""
    system = ball_system(X, (Q,) if isinstance(Q, int) else Q)
    if system.distance.get(w) != k:
        raise RangeError(f"vertex {w} is not in S_{k}")
    return system.projection((w,))


def _system(X, Q) -> BallSystem:
    return ball_system(X, (Q,) if isinstance(Q, int) else tuple(Q))


def pi_map(X: Cells, Q, k: int) -> SimplicialMap:
    """The projection S_k -> S'_{k-1}, cached per (X, Q, k)."""
    if k < 1:
        raise RangeError("projection level must be >= 1")
    system = _system(X, Q)
    if k in system.maps:
        return system.maps[k]
    source = system.sphere(k)
    target = system.subdivided_sphere(k - 1)
    assignment = {w: target.id_of[system.projection((w,))] for w in source.vertices}
    pi = SimplicialMap(source, target, assignment, k, system)
    system.maps[k] = pi
    return pi


def _is_chain(simplices: list[Simplex]) -> bool:
    ordered = sorted(simplices, key=len)
    return all(set(a) <= set(b) for a, b in zip(ordered, ordered[1:]))


def chain_condition(X: Cells, Q, k: int) -> CheckReport:
    """Projections of the vertices of every simplex of S_k are nested."""
    name = f"chain_condition[{k}]"
    system = _system(X, Q)
    S = system.sphere(k)
    examined = 0
    try:
        for sigma in S.simplices():
            examined += 1
            projs = [system.projection((w,)) for w in sigma]
            if not _is_chain(projs):
                return CheckReport.fail(name, {"simplex": sigma, "projections": projs}, examined=examined)
    except SystolicityViolation as exc:
        return CheckReport.fail(name, {"systolicity_violation": exc.witness}, examined=examined)
    return CheckReport.ok(name, examined=examined, fraction_passing=1.0)


def preimage(pi: SimplicialMap, L: Cells) -> tuple[Subcomplex, CheckReport]:
    """Preimage of a subcomplex L of S_{k-1}, with fullness/6-largeness checks.

    The preimage is assembled simplex by simplex: sigma belongs to it when its
    image chain is a simplex of L'. The report checks that this equals the
    span of the vertices projecting into L, and that it is full in S_k and
    6-large.
    """
    Ld = barycentric_subdivision(L) if not L.is_empty() else None
    members = []
    if Ld is not None:
        for sigma in pi.source.simplices():
            chain = {pi.projection(w) for w in sigma}
            ids = [Ld.id_of.get(t) for t in chain]
            if None not in ids and tuple(sorted(ids)) in Ld.complex:
                members.append(sigma)
    P = Subcomplex(pi.source, members, check=False)
    span = Subcomplex.span(pi.source, [w for w in pi.source.vertices if pi.projection(w) in L])
    name = f"preimage[{pi.level}]"
    if P != span:
        diff = sorted(set(span.simplices()) ^ set(P.simplices()))
        return P, CheckReport.fail(name, {"span_mismatch": diff[:5]})
    full = is_full_subcomplex(pi.source, P)
    large = is_k_large(P, 6)
    if full.failed:
        return P, CheckReport.fail(name, {"not_full": full.witness})
    if large.failed:
        return P, CheckReport.fail(name, {"not_6_large": large.witness})
    return P, CheckReport.ok(name, vertices=P.num_vertices, full=True, six_large=True)


def check_surjective(pi: SimplicialMap, frontier: Iterable[int] = ()) -> CheckReport:
    """Every top simplex of S'_{k-1} is the image of some simplex of S_k.

    Uncovered chains touching ``frontier`` vertices are counted as skipped.
    """
    name = f"surjective[{pi.level}]"
    covered = {pi.image(sigma) for sigma in pi.source.simplices()}
    frontier = set(frontier)
    skipped = 0
    targets = sorted(pi.target.complex.maximal_simplices)
    for chain in targets:
        if chain in covered:
            continue
        simplices = pi.target.chain(chain)
        if frontier and frontier.intersection(simplices[-1]):
            skipped += 1
            continue
        return CheckReport.fail(name, {"uncovered_chain": simplices}, targets=len(targets))
    return CheckReport.ok(name, targets=len(targets), skipped=skipped)


def preimage_span(pi: SimplicialMap, K: Cells) -> Subcomplex:
    return Subcomplex.span(pi.source, [w for w in pi.source.vertices if pi.projection(w) in K])


def check_preimage_connected(pi: SimplicialMap, K: Cells) -> CheckReport:
    """The preimage of a connected subcomplex K of S_{k-1} is connected."""
    name = f"preimage_connected[{pi.level}]"
    P = preimage_span(pi, K)
    comps = connected_components(P)
    if len(comps) != 1:
        return CheckReport.fail(name, {"K": sorted(K.maximal_simplices), "components": comps})
    return CheckReport.ok(name, preimage_vertices=P.num_vertices)


def project_point(X: Cells, Q, p: SpherePoint) -> SpherePoint:
    """Push a point of S_k to S_{k-1} with exact coefficients."""
    if p.level < 2:
        raise RangeError("points can be projected from level >= 2 only")
    system = _system(X, Q)
    projs = [system.projection((w,)) for w in p.support]
    if not _is_chain(projs):
        raise ChainViolation(
            f"projections of {p.support} are not nested",
            witness={"support": p.support, "projections": projs},
        )
    out: dict[int, Fraction] = {}
    for lam, tau in zip(p.coeffs, projs):
        share = lam / len(tau)
        for u in tau:
            out[u] = out.get(u, 0) + share
    return SpherePoint.from_mapping(p.level - 1, out)


def project_point_times(X: Cells, Q, p: SpherePoint, times: int) -> SpherePoint:
    for _ in range(times):
        p = project_point(X, Q, p)
    return p


def common_simplex(system: BallSystem, *points: SpherePoint) -> bool:
    support = set()
    for p in points:
        support.update(p.support)
    return tuple(sorted(support)) in system.sphere(points[0].level)


def point_distance(system: BallSystem, x: SpherePoint, y: SpherePoint) -> tuple[float, bool]:
    """Distance in S_level: exact within a common simplex, otherwise an upper
    bound through the 1-skeleton (flagged ``exact=False``)."""
    if common_simplex(system, x, y):
        return math.sqrt(distance_sq_in_simplex(x.as_mapping(), y.as_mapping())), True
    a, b = x.support[0], y.support[0]
    to_a = math.sqrt(distance_sq_in_simplex(x.as_mapping(), {a: Fraction(1)}))
    to_b = math.sqrt(distance_sq_in_simplex(y.as_mapping(), {b: Fraction(1)}))
    hops = graph_distance(system.sphere(x.level), a, b)
    if hops is None:
        return math.inf, False
    return to_a + hops + to_b, False


def _random_point(rng: random.Random, level: int, simplex: Simplex) -> SpherePoint:
    weights = [rng.randint(1, 9) for _ in simplex]
    total = sum(weights)
    return SpherePoint(level, simplex, tuple(Fraction(w, total) for w in weights))


def measure_contraction(X: Cells, Q, k: int, l: int, samples: int = 200, seed: int = 0,
                        tolerance: float = 1e-6) -> CheckReport:
    """Ratio d(pi^l x, pi^l y) / d(x, y) over ``samples`` random distinct
    same-simplex pairs of S_k.

    Exact pairs are compared against C^l in rational arithmetic; pairs whose
    images leave a common simplex use the 1-skeleton upper bound and the
    relative ``tolerance``.
    """
    if not 1 <= l < k:
        raise RangeError(f"need 1 <= l < k, got l={l}, k={k}")
    system = _system(X, Q)
    C = contraction_constant(X.dim).C
    bound_sq = C ** (2 * l)
    top = sorted(s for s in system.sphere(k).maximal_simplices if len(s) >= 2)
    name = f"contraction[k={k},l={l}]"
    if not top:
        return CheckReport.skip(name, "S_k has no simplices of positive dimension")
    rng = random.Random(seed)
    worst = 0.0
    exact = approx = 0
    attempts = 0
    while exact + approx < samples and attempts < 20 * samples:
        attempts += 1
        sigma = rng.choice(top)
        x = _random_point(rng, k, sigma)
        y = _random_point(rng, k, sigma)
        if x == y:
            continue
        d0_sq = distance_sq_in_simplex(x.as_mapping(), y.as_mapping())
        xi = project_point_times(X, Q, x, l)
        yi = project_point_times(X, Q, y, l)
        if common_simplex(system, xi, yi):
            exact += 1
            d1_sq = distance_sq_in_simplex(xi.as_mapping(), yi.as_mapping())
            worst = max(worst, math.sqrt(d1_sq / d0_sq))
            if d1_sq > bound_sq * d0_sq:
                return CheckReport.fail(name, {"x": x, "y": y, "ratio_sq": d1_sq / d0_sq, "bound_sq": bound_sq})
        else:
            approx += 1
            d1, _ = point_distance(system, xi, yi)
            ratio = d1 / math.sqrt(d0_sq)
            worst = max(worst, ratio)
            if ratio > float(C ** l) * (1 + tolerance):
                return CheckReport.fail(name, {"x": x, "y": y, "ratio": ratio, "approximate": True})
    return CheckReport.ok(name, max_ratio=worst, bound=float(C ** l), exact_pairs=exact, approximate_pairs=approx)
