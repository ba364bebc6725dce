"""Finite prefixes of the inverse system of spheres around a vertex.

The ideal boundary is never materialized. Everything here works on the
depth-m prefix {S_1, ..., S_m; pi_2, ..., pi_m}: thread compatibility,
decay of simplex diameters, connectedness of the approximants, local cut
scans, plus a four-point hyperbolicity check on a finite ball.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .balls import BallSystem, ball_system
from .complex import (
    Cells,
    Subcomplex,
    bfs_distances,
    connected_components,
    link,
)
from .errors import ChainViolation, ComplexValidationError, RangeError, SystolicityViolation, TruncationError
from .projections import (
    SimplicialMap,
    SpherePoint,
    chain_condition,
    check_preimage_connected,
    common_simplex,
    contraction_constant,
    distance_sq_in_simplex,
    pi_map,
    point_distance,
    preimage,
    project_point,
)
from .report import CheckReport

FOUR_POINT = (
    "defect(a,b,c,d) = (largest - second largest of "
    "d(a,b)+d(c,d), d(a,c)+d(b,d), d(a,d)+d(b,c)) / 2"
)


@dataclass
class InverseSystem:
    parent: Cells
    basepoint: int
    depth: int
    system: BallSystem = field(repr=False)
    maps: dict[int, SimplicialMap] = field(default_factory=dict, repr=False)

    def sphere(self, k: int) -> Subcomplex:
        if not 1 <= k <= self.depth:
            raise RangeError(f"level {k} outside 1..{self.depth}")
        return self.system.sphere(k)

    @property
    def spheres(self) -> list[Subcomplex]:
        return [self.sphere(k) for k in range(1, self.depth + 1)]

    @property
    def n(self) -> int:
        return self.parent.dim


@dataclass
class Thread:
    points: list[SpherePoint]

    def to_list(self) -> list[dict]:
        return [p.to_dict() for p in self.points]

    @classmethod
    def from_list(cls, data: list[dict]) -> Thread:
        return cls([SpherePoint.from_dict(d) for d in data])

    def to_dict(self) -> dict:
        return {"points": self.to_list()}


def build_system(X: Cells, v: int, m: int) -> InverseSystem:
    """Assemble the depth-m prefix around vertex ``v``.

    Every level must stay one step inside the truncation frontier, and the
    chain condition is re-checked per level.
    """
    if m < 1:
        raise RangeError("depth must be >= 1")
    system = ball_system(X, (v,))
    limit = system.safe_radius(1)
    if m > limit:
        raise TruncationError(f"depth {m} exceeds the safe radius {limit} around {v}")
    inv = InverseSystem(X, v, m, system)
    for k in range(2, m + 1):
        rep = chain_condition(X, (v,), k)
        if rep.failed:
            raise ChainViolation(f"chain condition fails at level {k}", witness={"level": k, **rep.witness})
        try:
            inv.maps[k] = pi_map(X, (v,), k)
        except SystolicityViolation as exc:
            raise type(exc)(f"level {k}: {exc}", witness={"level": k, "detail": exc.witness}) from exc
    return inv


def validate_thread(sys: InverseSystem, t: Thread) -> CheckReport:
    """Exact compatibility pi_k(x_k) = x_{k-1} along the thread."""
    name = "thread"
    pts = t.points
    if not pts:
        return CheckReport.ok(name, length=0)
    for idx, p in enumerate(pts):
        if p.level != idx + 1:
            return CheckReport.fail(name, {"position": idx, "level": p.level, "expected_level": idx + 1})
        if p.support not in sys.system.sphere(p.level):
            return CheckReport.fail(name, {"level": p.level, "support_not_in_sphere": p.support})
    for k in range(2, len(pts) + 1):
        got = project_point(sys.parent, (sys.basepoint,), pts[k - 1])
        if got != pts[k - 2]:
            return CheckReport.fail(name, {"level": k, "projected": got, "expected": pts[k - 2]})
    return CheckReport.ok(name, length=len(pts))


def radial_ray(sys: InverseSystem, end: int) -> list[int]:
    """Geodesic from the basepoint to ``end`` choosing the smallest inner
    neighbour at each step."""
    dist = sys.system.distance
    if end not in dist:
        raise ComplexValidationError(f"vertex {end} is not reachable from {sys.basepoint}")
    ray = [end]
    while dist[ray[-1]] > 0:
        here = ray[-1]
        ray.append(min(u for u in sys.parent.adjacency[here] if dist[u] == dist[here] - 1))
    return ray[::-1]


def thread_from_ray(sys: InverseSystem, ray: Sequence[int]) -> tuple[Thread, CheckReport]:
    """Thread obtained by pushing the deepest ray vertex down to level 1.

    The report lists d(v_k, x_k) per level; exact values must stay below
    E/(1-E), the sum of E^i over i >= 1.
    """
    ray = list(ray)
    dist = sys.system.distance
    if not ray or ray[0] != sys.basepoint:
        raise ComplexValidationError("ray must start at the basepoint", offending=ray[:1])
    for k, (a, b) in enumerate(zip(ray, ray[1:]), start=1):
        if b not in sys.parent.adjacency.get(a, ()):
            raise ComplexValidationError(f"ray vertices {a} and {b} are not adjacent", offending=(a, b))
        if dist.get(b) != k:
            raise ComplexValidationError(f"ray vertex {b} is not in S_{k}", offending=b)
    m = len(ray) - 1
    if m > sys.depth:
        raise TruncationError(f"ray of length {m} is deeper than the system ({sys.depth})")
    if m == 0:
        return Thread([]), CheckReport.ok("thread_from_ray", levels=0)
    pts = [SpherePoint.vertex(m, ray[m])]
    for _ in range(m - 1):
        pts.append(project_point(sys.parent, (sys.basepoint,), pts[-1]))
    thread = Thread(pts[::-1])
    E = contraction_constant(max(sys.n, 2)).E
    bound = E / (1 - E)
    per_level = []
    worst = None
    for k, x in enumerate(thread.points, start=1):
        vk = SpherePoint.vertex(k, ray[k])
        d, exact = point_distance(sys.system, vk, x)
        per_level.append({"level": k, "distance": d, "exact": exact})
        if exact and d > bound + 1e-12:
            worst = worst or {"level": k, "distance": d, "bound": bound}
    compat = validate_thread(sys, thread)
    name = "thread_from_ray"
    if worst is not None:
        return thread, CheckReport.fail(name, worst, bound=bound, levels=per_level)
    if compat.failed:
        return thread, CheckReport.fail(name, compat.witness, bound=bound, levels=per_level)
    return thread, CheckReport.ok(name, bound=bound, levels=per_level)


def _distance_matrix(ball: Subcomplex, points: list[int]) -> np.ndarray:
    index = {u: i for i, u in enumerate(points)}
    D = np.full((len(points), len(points)), -1, dtype=np.int32)
    for u in points:
        du = bfs_distances(ball, (u,))
        row = D[index[u]]
        for w, d in du.items():
            if w in index:
                row[index[w]] = d
    if (D < 0).any():
        raise ComplexValidationError("ball is disconnected; four-point defect is undefined")
    return D


def _defects(D: np.ndarray, a, b, c, d) -> np.ndarray:
    s1 = D[a, b] + D[c, d]
    s2 = D[a, c] + D[b, d]
    s3 = D[a, d] + D[b, c]
    s = np.sort(np.stack([s1, s2, s3]), axis=0)
    return s[2] - s[1]


def hyperbolicity_check(X: Cells, r: int, r0: int, base: int | None = None,
                        sample: int | None = None, seed: int = 0) -> CheckReport:
    """Maximal four-point defect over quadruples of B_{r0}, measured in B_r.

    Requires r >= 3*r0 so geodesics between inner points stay inside B_r.
    Exhaustive unless ``sample`` is given. Passes iff the maximum is <= 5/2.
    """
    if r0 < 0 or r < 3 * r0:
        raise RangeError(f"need r >= 3*r0 >= 0, got r={r}, r0={r0}")
    base = min(X.vertices) if base is None else base
    system = ball_system(X, (base,))
    if r > system.safe_radius(0):
        raise TruncationError(f"radius {r} exceeds the safe radius {system.safe_radius(0)}")
    inner = [v for v in sorted(system.distance) if system.distance[v] <= r0]
    D = _distance_matrix(system.ball(r), inner)
    n = len(inner)
    twice_max = 0
    witness = (inner[0],) * 4
    count = 0
    if sample is None:
        idx = np.arange(n)
        c, d = np.meshgrid(idx, idx, indexing="ij")
        c, d = c.ravel(), d.ravel()
        for a in range(n):
            for b in range(a, n):
                vals = _defects(D, a, b, c, d)
                count += vals.size
                j = int(vals.argmax())
                if vals[j] > twice_max:
                    twice_max = int(vals[j])
                    witness = (inner[a], inner[b], inner[c[j]], inner[d[j]])
        mode = "exhaustive"
    else:
        rng = np.random.default_rng(seed)
        q = rng.integers(0, n, size=(4, sample))
        vals = _defects(D, *q)
        count = sample
        j = int(vals.argmax())
        if vals[j] > twice_max:
            twice_max = int(vals[j])
            witness = tuple(inner[int(t)] for t in q[:, j])
        mode = "sampled"
    delta = Fraction(twice_max, 2)
    stats = {
        "delta": str(delta),
        "delta_float": float(delta),
        "quadruples": count,
        "inner_vertices": n,
        "radius": r,
        "inner_radius": r0,
        "mode": mode,
        "formula": FOUR_POINT,
    }
    name = f"hyperbolicity[r={r},r0={r0}]"
    if delta > Fraction(5, 2):
        return CheckReport.fail(name, {"quadruple": witness, "defect": str(delta)}, **stats)
    return CheckReport(name, "pass", witness=None, stats={**stats, "argmax": list(witness)})


def _random_subcomplex(rng: random.Random, S: Subcomplex) -> Subcomplex:
    tops = sorted(S.maximal_simplices)
    p = rng.random()
    chosen = [t for t in tops if rng.random() < p]
    if not chosen:
        chosen = [rng.choice(tops)]
    return Subcomplex.closure(S, chosen)


def _image_diameter_sq(sys: InverseSystem, sigma, l: int) -> tuple[Fraction | None, float]:
    pts = [SpherePoint.vertex(sys.system.distance[sigma[0]], w) for w in sigma]
    for _ in range(l):
        pts = [project_point(sys.parent, (sys.basepoint,), p) for p in pts]
    if len(pts) < 2:
        return Fraction(0), 0.0
    if common_simplex(sys.system, *pts):
        best = max(distance_sq_in_simplex(p.as_mapping(), q.as_mapping()) for p in pts for q in pts)
        return best, math.sqrt(best)
    best = max(point_distance(sys.system, p, q)[0] for p in pts for q in pts)
    return None, best


def daverman_report(sys: InverseSystem, samples: int = 100, seed: int = 0) -> CheckReport:
    """Combinatorial witnesses for the two finite-level hypotheses.

    (1) chain condition at every level, and full 6-large preimages of every
    simplex of S_{k-1} together with ``samples`` random subcomplexes;
    (2) for every simplex sigma of S_k and l <= k-1 the l-fold image has
    diameter <= C^l * diam(sigma), with a_k = C^k * max diam reported.
    """
    rng = random.Random(seed)
    X, Q = sys.parent, (sys.basepoint,)
    h1 = []
    for k in range(2, sys.depth + 1):
        h1.append(chain_condition(X, Q, k))
        pi = sys.maps[k]
        target = sys.sphere(k - 1)
        bad = None
        tested = 0
        subs = [Subcomplex.closure(target, [s]) for s in sorted(target.simplices())]
        subs += [_random_subcomplex(rng, target) for _ in range(samples)]
        for L in subs:
            tested += 1
            _, rep = preimage(pi, L)
            if rep.failed:
                bad = {"L": sorted(L.maximal_simplices), **rep.witness}
                break
        name = f"preimages[{k}]"
        h1.append(CheckReport.fail(name, bad, tested=tested) if bad else CheckReport.ok(name, tested=tested))

    C = contraction_constant(max(sys.n, 2)).C
    h2 = []
    maxdiam = 1 if any(s.dim >= 1 for s in sys.spheres) else 0
    for k in range(1, sys.depth + 1):
        S = sys.sphere(k)
        worst = 0.0
        approx = 0
        bad = None
        for sigma in sorted(S.simplices()):
            if len(sigma) < 2:
                continue
            for l in range(0, k):
                dsq, d = _image_diameter_sq(sys, sigma, l)
                if dsq is None:
                    approx += 1
                    ok = d <= float(C ** l) * (1 + 1e-6)
                    ratio = d
                else:
                    ok = dsq <= C ** (2 * l)
                    ratio = math.sqrt(dsq)
                worst = max(worst, ratio / float(C ** l)) if l else worst
                if not ok and bad is None:
                    bad = {"simplex": sigma, "l": l, "diameter": ratio, "bound": float(C ** l)}
        name = f"decay[{k}]"
        stats = {"worst_ratio_to_bound": worst, "approximate": approx}
        h2.append(CheckReport.fail(name, bad, **stats) if bad else CheckReport.ok(name, **stats))
    decay = [float(C ** k) * maxdiam for k in range(1, sys.depth + 1)]
    monotone = all(a > b for a, b in zip(decay, decay[1:]))
    h2.append(
        CheckReport.ok("decay_sequence", a=decay)
        if monotone
        else CheckReport.fail("decay_sequence", {"a": decay})
    )
    return CheckReport.bundle(
        "daverman",
        [CheckReport.bundle("hypothesis_1", h1), CheckReport.bundle("hypothesis_2", h2)],
        C=str(C),
        depth=sys.depth,
    )


def connectedness_report(sys: InverseSystem) -> CheckReport:
    """Every S_k is connected, and connectedness of the preimage of S_{k-1}
    agrees with direct BFS on S_k."""
    checks = []
    for k in range(1, sys.depth + 1):
        S = sys.sphere(k)
        comps = connected_components(S)
        direct = len(comps) == 1
        name = f"sphere_connected[{k}]"
        if not direct:
            checks.append(CheckReport.fail(name, {"level": k, "components": comps}))
            continue
        if k >= 2:
            via = check_preimage_connected(sys.maps[k], sys.sphere(k - 1))
            if via.passed != direct:
                checks.append(CheckReport.fail(name, {"level": k, "direct": direct, "via_preimage": via.passed}))
                continue
            checks.append(CheckReport.ok(name, vertices=S.num_vertices, cross_checked=True))
        else:
            checks.append(CheckReport.ok(name, vertices=S.num_vertices, cross_checked=False))
    return CheckReport.bundle("connectedness", checks)


def local_cut_analysis(sys: InverseSystem, k: int) -> CheckReport:
    """Link identity (S_k)_w = S_1(rho, X_w) at every w in S_k, and a scan for
    vertices w with B_2(w, S_k) minus w disconnected.

    For 2-dimensional complexes spheres are cycles, so every vertex is a local
    cut point; those results are labeled as expected and do not fail.
    """
    S = sys.sphere(k)
    X = sys.parent
    identity_bad = None
    link_disconnected = []
    cuts = []
    for w in S.vertices:
        rho = sys.system.projection((w,)) if k >= 1 else None
        Xw = link(X, (w,))
        local = ball_system(Xw, rho)
        lhs = set(link(S, (w,)).simplices())
        rhs = set(local.sphere(1).simplices())
        if lhs != rhs and identity_bad is None:
            identity_bad = {"vertex": w, "rho": rho, "difference": sorted(lhs ^ rhs)}
        if len(connected_components(link(S, (w,)))) > 1:
            link_disconnected.append(w)
        near = bfs_distances(S, (w,), limit=2)
        ball2 = Subcomplex.span(S, [u for u in near if u != w])
        if len(connected_components(ball2)) > 1:
            cuts.append(w)
    n = X.dim
    expected = n < 3
    details = [
        CheckReport.fail(f"link_identity[{k}]", identity_bad)
        if identity_bad
        else CheckReport.ok(f"link_identity[{k}]", vertices=S.num_vertices)
    ]
    stats = {
        "cut_vertices": len(cuts),
        "link_disconnected": len(link_disconnected),
        "dimension": n,
        "label": "expected-disconnection (n < 3)" if expected else "checked",
    }
    name = f"local_cuts[{k}]"
    if (cuts or link_disconnected) and not expected:
        witness = {"cut_vertices": cuts[:10], "link_disconnected": link_disconnected[:10]}
        details.append(CheckReport.fail(name, witness, **stats))
    else:
        details.append(CheckReport.ok(name, **stats))
    return CheckReport.bundle(f"local_cut_analysis[{k}]", details)
