"""Surface stages of the Pontryagin sphere inverse system.

Stage k+1 is the connected sum of stage k with one torus per triangle:
the open triangle sigma is removed, a fresh torus copy with an open marked
face removed is attached, and the two boundary triangles are identified.
We keep the natural triangulation of the glued surface.
"""
from __future__ import annotations

import csv
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .complex import (
    Simplex,
    SimplicialComplex,
    euler_characteristic,
    is_chamber_complex,
    is_connected,
    link,
)
from .errors import ComplexValidationError, RangeError
from .report import CheckReport
from .serialize import complex_to_dict, load_complex

FACE_BUDGET = 100_000


def _surface_problems(X: SimplicialComplex) -> list[str]:
    problems = []
    if X.dim != 2:
        problems.append(f"dimension {X.dim}, expected 2")
        return problems
    rep = is_chamber_complex(X)
    if not rep.stats.get("pseudomanifold"):
        problems.append("not a pseudomanifold")
    if not is_connected(X):
        problems.append("not connected")
    for v in X.vertices:
        lk = link(X, (v,))
        if lk.dim != 1 or any(len(lk.adjacency[u]) != 2 for u in lk.vertices) or not is_connected(lk):
            problems.append(f"link of {v} is not a cycle")
            break
    return problems


def orientation(X: SimplicialComplex) -> dict[Simplex, tuple[int, int, int]] | None:
    """Coherent orientation of a closed surface by propagation, or None.

    Two triangles sharing an edge are coherent when they traverse the edge in
    opposite directions.
    """
    tris = sorted(X.faces(2))
    if not tris:
        return None
    by_edge: dict[tuple[int, int], list[Simplex]] = {}
    for t in tris:
        for e in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])):
            by_edge.setdefault(e, []).append(t)
    oriented: dict[Simplex, tuple[int, int, int]] = {}
    for start in tris:
        if start in oriented:
            continue
        oriented[start] = start
        queue = deque([start])
        while queue:
            t = queue.popleft()
            a, b, c = oriented[t]
            for x, y in ((a, b), (b, c), (c, a)):
                for s in by_edge[tuple(sorted((x, y)))]:
                    if s == t:
                        continue
                    (z,) = set(s) - {x, y}
                    want = (y, x, z)
                    if s not in oriented:
                        oriented[s] = want
                        queue.append(s)
                    elif not _same_cycle(oriented[s], want):
                        return None
    return oriented


def _same_cycle(p, q) -> bool:
    return any(p == q[i:] + q[:i] for i in range(3))


def is_orientable(X: SimplicialComplex) -> bool:
    return orientation(X) is not None


@dataclass
class SurfaceStage:
    complex: SimplicialComplex
    triangulation_tag: str
    genus: int
    glued_faces: dict[Simplex, int] = field(default_factory=dict, repr=False)
    index: int = 1

    @property
    def euler(self) -> int:
        return euler_characteristic(self.complex)

    def stats(self) -> dict:
        f = self.complex.f_vector()
        return {"stage": self.index, "V": f[0], "E": f[1], "F": f[2], "chi": self.euler, "genus": self.genus}


def _validate_surface(X: SimplicialComplex, what: str) -> None:
    problems = _surface_problems(X)
    if problems:
        raise ComplexValidationError(f"{what}: " + "; ".join(problems), offending=problems)


def _tetrahedron() -> SimplicialComplex:
    return SimplicialComplex([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def _octahedron() -> SimplicialComplex:
    return SimplicialComplex([(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)])


def _icosahedron() -> SimplicialComplex:
    # two poles 0 and 11, upper ring 1..5, lower ring 6..10
    up, low = list(range(1, 6)), list(range(6, 11))
    tris = []
    for i in range(5):
        j = (i + 1) % 5
        tris.append((0, up[i], up[j]))
        tris.append((11, low[i], low[j]))
        tris.append((up[i], up[j], low[i]))
        tris.append((up[j], low[i], low[j]))
    return SimplicialComplex(tris)


MODELS = {"tetrahedron": _tetrahedron, "octahedron": _octahedron, "icosahedron": _icosahedron}


def initial_sphere(model: str = "tetrahedron", path: str | Path | None = None) -> SurfaceStage:
    """Stage 1: a triangulated 2-sphere, built in or read from a file."""
    if model == "file":
        if path is None:
            raise ComplexValidationError("model 'file' needs a path")
        X = load_complex(path)
    elif model in MODELS:
        X = MODELS[model]()
    else:
        raise ComplexValidationError(f"unknown model {model!r}")
    _validate_surface(X, "initial surface")
    if euler_characteristic(X) != 2:
        raise ComplexValidationError(f"initial surface has Euler characteristic {euler_characteristic(X)}, not 2")
    if not is_orientable(X):
        raise ComplexValidationError("initial surface is not orientable")
    return SurfaceStage(X, model, 0)


def minimal_torus() -> SimplicialComplex:
    """The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex(tris)


@dataclass(frozen=True)
class TorusTemplate:
    torus: SimplicialComplex
    marked: Simplex
    orientation: dict = field(repr=False, hash=False, compare=False)


def torus_template(T: SimplicialComplex | None = None, marked: Iterable[int] | None = None) -> TorusTemplate:
    T = minimal_torus() if T is None else T
    _validate_surface(T, "torus")
    if euler_characteristic(T) != 0:
        raise ComplexValidationError(f"torus has Euler characteristic {euler_characteristic(T)}, not 0")
    orient = orientation(T)
    if orient is None:
        raise ComplexValidationError("torus triangulation is not orientable")
    marked = min(T.faces(2)) if marked is None else tuple(sorted(marked))
    if marked not in T.faces(2):
        raise ComplexValidationError(f"{marked} is not a triangle of the torus")
    return TorusTemplate(T, marked, orient)


def _rotate_min(cyc: tuple[int, int, int]) -> tuple[int, int, int]:
    i = cyc.index(min(cyc))
    return cyc[i:] + cyc[:i]


@dataclass
class FaceBlock:
    """Data of p_k over one triangle sigma of the previous stage."""

    sigma: Simplex
    vertex_map: dict[int, int]
    triangles: list[Simplex]


@dataclass
class StageMap:
    source_index: int
    blocks: list[FaceBlock]
    template: TorusTemplate = field(repr=False)


def step(stage: SurfaceStage, template: TorusTemplate, budget: int = FACE_BUDGET) -> tuple[SurfaceStage, StageMap]:
    """Glue one torus copy into every triangle of ``stage``.

    The oriented marked face (x, y, z) of the torus, rotated to start at its
    smallest vertex, is matched with the oriented sigma = (a, b, c) rotated
    the same way by x -> a, y -> c, z -> b, which reverses orientation so the
    result stays orientable.
    """
    X = stage.complex
    F = len(X.faces(2))
    fT = len(template.torus.faces(2))
    new_faces = F * (fT - 1)
    if new_faces > budget:
        raise RangeError(f"next stage would have {new_faces} faces, over the budget {budget}")
    orient = orientation(X)
    if orient is None:
        raise ComplexValidationError("stage surface is not orientable")
    x, y, z = _rotate_min(template.orientation[template.marked])
    others = [v for v in template.torus.vertices if v not in template.marked]
    next_id = max(X.vertices) + 1
    triangles = []
    blocks = []
    for sigma in sorted(X.faces(2)):
        a, b, c = _rotate_min(orient[sigma])
        vmap = {x: a, y: c, z: b}
        for v in others:
            vmap[v] = next_id
            next_id += 1
        block = [tuple(sorted(vmap[u] for u in t)) for t in sorted(template.torus.faces(2)) if t != template.marked]
        triangles.extend(block)
        blocks.append(FaceBlock(sigma, vmap, block))
    Y = SimplicialComplex(triangles)
    glued = {b.sigma: i for i, b in enumerate(blocks)}
    nxt = SurfaceStage(Y, f"{stage.triangulation_tag}+torus", stage.genus + F, glued, stage.index + 1)
    return nxt, StageMap(stage.index, blocks, template)


def check_stage_map(smap: StageMap | None) -> CheckReport:
    """p_k is the identity on each boundary triangle and sends its block into sigma."""
    name = "stage_map"
    if smap is None:
        return CheckReport.skip(name, "first stage has no map")
    marked = smap.template.marked
    for block in smap.blocks:
        boundary = sorted(block.vertex_map[u] for u in marked)
        if tuple(boundary) != block.sigma:
            return CheckReport.fail(name, {"sigma": block.sigma, "boundary_image": boundary})
        rebuilt = [
            tuple(sorted(block.vertex_map[u] for u in t))
            for t in sorted(smap.template.torus.faces(2))
            if t != marked
        ]
        if rebuilt != block.triangles:
            bad = sorted(set(rebuilt) ^ set(block.triangles))
            return CheckReport.fail(name, {"sigma": block.sigma, "inconsistent_triangles": bad[:6]})
        bvals = set(block.sigma)
        # p_k collapses the interior vertices of the block onto sigma; the
        # boundary vertices of the block must be exactly those of sigma
        inner = {block.vertex_map[u] for u in smap.template.torus.vertices if u not in marked}
        if inner & bvals:
            return CheckReport.fail(name, {"sigma": block.sigma, "interior_hits_boundary": sorted(inner & bvals)})
        for t in block.triangles:
            outside = [v for v in t if v not in inner and v not in bvals]
            if outside:
                return CheckReport.fail(name, {"sigma": block.sigma, "triangle": t, "outside": outside})
        # boundary edges of sigma must appear once in the block, i.e. ∂sigma is the seam
        for e in ((block.sigma[0], block.sigma[1]), (block.sigma[0], block.sigma[2]), (block.sigma[1], block.sigma[2])):
            hits = sum(1 for t in block.triangles if set(e) <= set(t))
            if hits != 1:
                return CheckReport.fail(name, {"sigma": block.sigma, "edge": e, "block_triangles_on_edge": hits})
    return CheckReport.ok(name, blocks=len(smap.blocks))


def check_stage(stage: SurfaceStage, previous: SurfaceStage | None = None) -> CheckReport:
    """Closed connected orientable surface with the expected Euler characteristic."""
    X = stage.complex
    checks = []
    problems = _surface_problems(X)
    checks.append(
        CheckReport.fail("surface", {"problems": problems}) if problems else CheckReport.ok("surface")
    )
    checks.append(CheckReport.ok("orientable") if is_orientable(X) else CheckReport.fail("orientable", {"stage": stage.index}))
    chi = stage.euler
    if chi != 2 - 2 * stage.genus:
        checks.append(CheckReport.fail("euler_genus", {"chi": chi, "genus": stage.genus}))
    else:
        checks.append(CheckReport.ok("euler_genus", chi=chi, genus=stage.genus))
    if previous is not None:
        F = len(previous.complex.faces(2))
        want = previous.euler - 2 * F
        if chi != want:
            checks.append(CheckReport.fail("euler_recurrence", {"chi": chi, "expected": want}))
        else:
            checks.append(CheckReport.ok("euler_recurrence", chi=chi, expected=want))
    return CheckReport.bundle(f"stage[{stage.index}]", checks)


def run_stages(model: str = "tetrahedron", stages: int = 3, template: TorusTemplate | None = None,
               budget: int = FACE_BUDGET, path: str | Path | None = None) -> tuple[list[SurfaceStage], list[StageMap]]:
    """Stages 1..stages (stage 1 is the initial sphere)."""
    if stages < 1:
        raise RangeError("need at least one stage")
    template = template or torus_template()
    out = [initial_sphere(model, path)]
    maps = []
    for _ in range(stages - 1):
        nxt, smap = step(out[-1], template, budget)
        out.append(nxt)
        maps.append(smap)
    return out, maps


def write_stages(stages: list[SurfaceStage], out_dir: str | Path) -> Path:
    """Each stage as complex JSON plus ``stats.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for s in stages:
        with open(out_dir / f"stage_{s.index}.json", "w") as fh:
            json.dump(complex_to_dict(s.complex), fh, sort_keys=True)
    path = out_dir / "stats.csv"
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["stage", "V", "E", "F", "chi", "genus"])
        w.writeheader()
        for s in stages:
            w.writerow(s.stats())
    return path
