"""Command-line entry point.

Exit codes: 0 when every non-skipped check passes, 1 when a check fails,
2 for unreadable or invalid input.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import __version__
from .balls import ball_system, check_projection_simplices, check_sphere_facts, condition_R
from .boundary import (
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
from .builder import DiscSpec, build_control_disc, build_disc
from .complex import (
    Cells,
    Subcomplex,
    barycentric_subdivision,
    is_chamber_complex,
    is_flag,
    is_locally_k_large,
)
from .errors import ComplexError, ComplexValidationError, RangeError, SystolicityViolation, TruncationError
from .pontryagin import FACE_BUDGET, check_stage, check_stage_map, run_stages, torus_template, write_stages
from .projections import (
    SpherePoint,
    chain_condition,
    check_preimage_connected,
    check_surjective,
    measure_contraction,
    pi_map,
    preimage,
    project_point,
)
from .report import CheckReport, jsonable
from .serialize import complex_to_dict, dump_complex, load_complex, to_dot

log = logging.getLogger("systolic")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
REPORT_ENV = "SYSTOLIC_REPORT_DIR"

CHECKS = (
    "flag",
    "local-7-large",
    "condition-r",
    "sphere-facts",
    "projection-simplices",
    "chain",
    "preimage",
    "surjective",
    "preimage-connected",
    "contraction",
    "hyperbolicity",
    "daverman",
    "connectedness",
    "local-cuts",
)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    inputs: dict
    version: str
    reports: list[CheckReport] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(r.failed for r in self.reports)

    def to_dict(self, timings: bool = True) -> dict:
        out = {
            "command": self.command,
            "parameters": jsonable(self.parameters),
            "inputs": self.inputs,
            "version": self.version,
            "passed": not self.failed,
            "reports": [r.to_dict() for r in self.reports],
        }
        if timings:
            out["timings"] = self.timings
        return out

    def dumps(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True) + "\n"


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _guarded(name: str, fn: Callable[[], CheckReport]) -> CheckReport:
    try:
        return fn()
    except SystolicityViolation as exc:
        return CheckReport.fail(name, {"systolicity_violation": exc.witness, "message": str(exc)})
    except TruncationError as exc:
        return CheckReport.skip(name, str(exc))


def _preimage_suite(X: Cells, base, k: int, samples: int, rng: random.Random) -> CheckReport:
    pi = pi_map(X, base, k)
    target = ball_system(X, base).sphere(k - 1)
    subs = [Subcomplex.closure(target, [s]) for s in sorted(target.simplices())]
    tops = sorted(target.maximal_simplices)
    for _ in range(samples):
        p = rng.random()
        chosen = [t for t in tops if rng.random() < p] or [rng.choice(tops)]
        subs.append(Subcomplex.closure(target, chosen))
    for L in subs:
        _, rep = preimage(pi, L)
        if rep.failed:
            return CheckReport.fail(f"preimage[{k}]", {"L": sorted(L.maximal_simplices), **rep.witness})
    return CheckReport.ok(f"preimage[{k}]", subcomplexes=len(subs))


def _connected_preimages(X: Cells, base, k: int) -> CheckReport:
    pi = pi_map(X, base, k)
    target = ball_system(X, base).sphere(k - 1)
    subs = [Subcomplex.closure(target, [s]) for s in sorted(target.simplices())] + [target]
    for K in subs:
        rep = check_preimage_connected(pi, K)
        if rep.failed:
            return rep
    return CheckReport.ok(f"preimage_connected[{k}]", subcomplexes=len(subs))


def cmd_verify_all(X: Cells, base: int, max_radius: int | None = None, depth: int | None = None,
                   checks: tuple[str, ...] = CHECKS, samples: int = 100, contraction_pairs: int = 1000,
                   seed: int = 0, input_path: str | None = None) -> RunManifest:
    """Run the check suite around ``base`` and collect the reports."""
    system = ball_system(X, (base,))
    safe1 = system.safe_radius(1)
    max_radius = safe1 if max_radius is None else max_radius
    if max_radius > safe1:
        raise TruncationError(f"max radius {max_radius} exceeds the safe radius {safe1}")
    depth = min(4, safe1) if depth is None else depth
    params = {
        "base": base,
        "max_radius": max_radius,
        "depth": depth,
        "checks": list(checks),
        "samples": samples,
        "contraction_pairs": contraction_pairs,
        "seed": seed,
    }
    inputs = {str(input_path): sha256_file(input_path)} if input_path else {}
    manifest = RunManifest("verify", params, inputs, __version__)
    rng = random.Random(seed)
    Q = (base,)
    levels = range(1, max_radius + 1)

    def run(name, fn):
        t = time.perf_counter()
        manifest.reports.append(_guarded(name, fn))
        manifest.timings[name] = round(time.perf_counter() - t, 4)

    def per_level(name, fn, start=1):
        return lambda: CheckReport.bundle(name, [_guarded(f"{name}[{k}]", lambda k=k: fn(k)) for k in levels if k >= start])

    if "flag" in checks:
        run("flag", lambda: is_flag(X))
    if "local-7-large" in checks:
        run("locally_7_large", lambda: is_locally_k_large(X, 7))
    if "condition-r" in checks:
        interior = [v for v, d in sorted(system.distance.items()) if d < system.frontier_distance]
        run("condition_R", lambda: CheckReport.bundle("condition_R", [condition_R(X, v) for v in interior]))
    if "sphere-facts" in checks:
        run("sphere_facts", per_level("sphere_facts", lambda k: check_sphere_facts(X, Q, k)))
    if "projection-simplices" in checks:
        run("projection_simplices", per_level("projection_simplices", lambda k: check_projection_simplices(X, Q, k)))
    if "chain" in checks:
        run("chain_condition", per_level("chain_condition", lambda k: chain_condition(X, Q, k)))
    if "preimage" in checks:
        run("preimage", per_level("preimage", lambda k: _preimage_suite(X, Q, k, samples, rng), start=2))
    if "surjective" in checks:
        run("surjective", per_level("surjective", lambda k: check_surjective(pi_map(X, Q, k))))
    if "preimage-connected" in checks:
        run("preimage_connected", per_level("preimage_connected", lambda k: _connected_preimages(X, Q, k), start=2))
    if "contraction" in checks:
        ls = [l for l in (1, 2, 3) if l < max_radius]
        run("contraction", lambda: CheckReport.bundle(
            "contraction",
            [_guarded(f"contraction[l={l}]", lambda l=l: measure_contraction(X, Q, max_radius, l, contraction_pairs, seed))
             for l in ls],
        ))
    if "hyperbolicity" in checks:
        r0 = system.safe_radius(0) // 3

        def hyp():
            if r0 < 1:
                return CheckReport.skip("hyperbolicity", "ball too small for an inner radius >= 1")
            return hyperbolicity_check(X, 3 * r0, r0, base=base)

        run("hyperbolicity", hyp)
    inverse = {}
    boundary_checks = [c for c in ("daverman", "connectedness", "local-cuts") if c in checks]
    if boundary_checks:
        try:
            inverse["sys"] = build_system(X, base, depth)
        except (SystolicityViolation, TruncationError, RangeError) as exc:
            witness = getattr(exc, "witness", None) or {"message": str(exc)}
            for c in boundary_checks:
                manifest.reports.append(CheckReport.fail(c.replace("-", "_"), {"inverse_system": witness}))
    if "sys" in inverse:
        isys = inverse["sys"]
        if "daverman" in checks:
            run("daverman", lambda: daverman_report(isys, samples=samples, seed=seed))
        if "connectedness" in checks:
            run("connectedness", lambda: connectedness_report(isys))
        if "local-cuts" in checks:
            run("local_cuts", lambda: CheckReport.bundle(
                "local_cuts", [local_cut_analysis(isys, k) for k in range(1, depth + 1)]))
    return manifest


# ---- command handlers ----------------------------------------------------


def _report_path(args, default_name: str) -> Path | None:
    if getattr(args, "report", None):
        return Path(args.report)
    env = os.environ.get(REPORT_ENV)
    if env:
        return Path(env) / default_name
    return None


def _emit(reports: list[CheckReport], path: Path | None, payload: dict | None = None) -> int:
    for r in reports:
        print(r.summary_line())
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        body = payload if payload is not None else {"reports": [r.to_dict() for r in reports]}
        path.write_text(json.dumps(jsonable(body), indent=2, sort_keys=True) + "\n")
    return EXIT_FAIL if any(r.failed for r in reports) else EXIT_OK


def _cmd_build_disc(args) -> int:
    if args.control:
        disc = build_control_disc(args.degree, args.radius)
    else:
        disc = build_disc(DiscSpec(args.degree, args.radius, args.seed))
    dump_complex(disc.complex, args.out)
    sizes = [len(layer) for layer in disc.layers]
    print(f"wrote {args.out}: V={disc.complex.num_vertices} F={len(disc.complex.maximal_simplices)} rings={sizes}")
    return EXIT_OK


def _cmd_load(args) -> int:
    X, notes = load_complex(args.complex, with_notes=True)
    summary = {
        "file": args.complex,
        "normalization": notes,
        "sha256": sha256_file(args.complex),
        "dim": X.dim,
        "f_vector": X.f_vector(),
        "flag": is_flag(X).passed,
        "chamber": is_chamber_complex(X).stats,
    }
    print(json.dumps(jsonable(summary), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_verify(args) -> int:
    X = load_complex(args.complex)
    checks = tuple(args.check) if args.check else CHECKS
    manifest = cmd_verify_all(X, args.base, args.max_radius, args.depth, checks, args.samples,
                              args.pairs, args.seed, args.complex)
    path = _report_path(args, "verify.json")
    for r in manifest.reports:
        print(r.summary_line())
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(manifest.dumps())
    return EXIT_FAIL if manifest.failed else EXIT_OK


def _cmd_spheres(args) -> int:
    X = load_complex(args.complex)
    system = ball_system(X, (args.base,))
    top = system.safe_radius(0) if args.max_radius is None else args.max_radius
    rows = []
    for i in range(0, top + 1):
        S, B = system.sphere(i), system.ball(i)
        rows.append({"i": i, "sphere_vertices": S.num_vertices, "sphere_f": S.f_vector(), "ball_vertices": B.num_vertices})
    payload = {"base": args.base, "frontier_distance": system.frontier_distance, "spheres": rows}
    print(json.dumps(payload, indent=2))
    if args.facts:
        reports = [check_sphere_facts(X, (args.base,), i) for i in range(1, top + 1)]
        payload["reports"] = [r.to_dict() for r in reports]
        return _emit(reports, _report_path(args, "spheres.json"), payload)
    path = _report_path(args, "spheres.json")
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_project(args) -> int:
    X = load_complex(args.complex)
    Q = (args.base,)
    if args.point:
        p = SpherePoint.parse(args.level, args.point)
        out = [p.to_dict()]
        for _ in range(args.times):
            p = project_point(X, Q, p)
            out.append(p.to_dict())
        print(json.dumps(out, indent=2))
        return EXIT_OK
    pi = pi_map(X, Q, args.level)
    table = {str(w): list(pi.projection(w)) for w in pi.source.vertices}
    print(json.dumps({"level": args.level, "projections": table}, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_boundary(args) -> int:
    X = load_complex(args.complex)
    isys = build_system(X, args.base, args.depth)
    reports = [daverman_report(isys, samples=args.samples, seed=args.seed), connectedness_report(isys)]
    threads = []
    for end in isys.sphere(isys.depth).vertices[: args.threads]:
        th, rep = thread_from_ray(isys, radial_ray(isys, end))
        reports.append(validate_thread(isys, th))
        reports.append(rep)
        threads.append(Thread.to_list(th))
    payload = {"base": args.base, "depth": args.depth, "reports": [r.to_dict() for r in reports], "threads": threads}
    return _emit(reports, _report_path(args, "boundary.json"), payload)


def _cmd_hyperbolicity(args) -> int:
    X = load_complex(args.complex)
    rep = hyperbolicity_check(X, args.radius, args.inner, base=args.base, sample=args.sample, seed=args.seed)
    print(f"delta = {rep.stats['delta']}  ({rep.stats['formula']})")
    return _emit([rep], _report_path(args, "hyperbolicity.json"))


def _cmd_pontryagin(args) -> int:
    if args.torus != "minimal":
        raise ComplexValidationError(f"unknown torus template {args.torus!r}")
    stages, maps = run_stages(args.initial, args.stages, torus_template(), args.budget, args.initial_file)
    reports = [check_stage(s, stages[i - 1] if i else None) for i, s in enumerate(stages)]
    reports += [check_stage_map(m) for m in maps]
    if args.out:
        write_stages(stages, args.out)
    for s in stages:
        print(s.stats())
    return _emit(reports, _report_path(args, "pontryagin.json"))


def _cmd_export(args) -> int:
    X = load_complex(args.complex)
    if args.what == "skeleton-dot":
        text = to_dot(X)
    else:
        if args.what == "sphere":
            if args.level is None:
                raise ComplexValidationError("export sphere needs --level")
            A = ball_system(X, (args.base,)).sphere(args.level)
            name = f"sphere_{args.level}"
        else:
            A = barycentric_subdivision(X if args.level is None else ball_system(X, (args.base,)).sphere(args.level)).complex
            name = "subdivision"
        if args.format == "dot":
            text = to_dot(A, name)
        else:
            data = complex_to_dict(A)
            data["labels"] = list(A.vertices)
            text = json.dumps(data, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="systolic", description="Checks for systolic simplicial complexes.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-disc", help="grow a layered disc")
    b.add_argument("--degree", type=int, default=7)
    b.add_argument("--radius", type=int, required=True)
    b.add_argument("--seed", type=int)
    b.add_argument("--control", action="store_true", help="homogeneous disc of any degree (e.g. 6)")
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_build_disc)

    ld = sub.add_parser("load", help="validate a complex file and print a summary")
    ld.add_argument("--complex", required=True)
    ld.set_defaults(func=_cmd_load)

    v = sub.add_parser("verify", help="run the check suite")
    v.add_argument("--complex", required=True)
    v.add_argument("--base", type=int, default=0)
    v.add_argument("--max-radius", type=int)
    v.add_argument("--depth", type=int)
    v.add_argument("--check", action="append", choices=CHECKS)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--pairs", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--report")
    v.set_defaults(func=_cmd_verify)

    s = sub.add_parser("spheres", help="sizes of balls and spheres")
    s.add_argument("--complex", required=True)
    s.add_argument("--base", type=int, default=0)
    s.add_argument("--max-radius", type=int)
    s.add_argument("--facts", action="store_true", help="also run the sphere fact checks")
    s.add_argument("--report")
    s.set_defaults(func=_cmd_spheres)

    pr = sub.add_parser("project", help="projection map or point propagation")
    pr.add_argument("--complex", required=True)
    pr.add_argument("--base", type=int, default=0)
    pr.add_argument("--level", type=int, required=True)
    pr.add_argument("--point")
    pr.add_argument("--times", type=int, default=1)
    pr.set_defaults(func=_cmd_project)

    bd = sub.add_parser("boundary", help="inverse system reports and threads")
    bd.add_argument("--complex", required=True)
    bd.add_argument("--base", type=int, default=0)
    bd.add_argument("--depth", type=int, required=True)
    bd.add_argument("--samples", type=int, default=100)
    bd.add_argument("--threads", type=int, default=3)
    bd.add_argument("--seed", type=int, default=0)
    bd.add_argument("--report")
    bd.set_defaults(func=_cmd_boundary)

    h = sub.add_parser("hyperbolicity", help="four-point defect on a ball")
    h.add_argument("--complex", required=True)
    h.add_argument("--base", type=int, default=0)
    h.add_argument("--radius", type=int, required=True)
    h.add_argument("--inner", type=int, required=True)
    h.add_argument("--sample", type=int)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--report")
    h.set_defaults(func=_cmd_hyperbolicity)

    pt = sub.add_parser("pontryagin", help="surface stages")
    pt.add_argument("--initial", default="tetrahedron", choices=("tetrahedron", "octahedron", "icosahedron", "file"))
    pt.add_argument("--initial-file")
    pt.add_argument("--torus", default="minimal")
    pt.add_argument("--stages", type=int, default=3)
    pt.add_argument("--budget", type=int, default=FACE_BUDGET)
    pt.add_argument("--out")
    pt.add_argument("--report")
    pt.set_defaults(func=_cmd_pontryagin)

    e = sub.add_parser("export", help="DOT or JSON exports")
    e.add_argument("--complex", required=True)
    e.add_argument("--what", required=True, choices=("skeleton-dot", "sphere", "subdivision"))
    e.add_argument("--base", type=int, default=0)
    e.add_argument("--level", type=int)
    e.add_argument("--format", choices=("dot", "json"), default="dot")
    e.add_argument("--out")
    e.set_defaults(func=_cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SystolicityViolation as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        print(json.dumps(jsonable(exc.witness), sort_keys=True), file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ComplexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
