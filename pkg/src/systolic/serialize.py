"""JSON complex files and DOT export of 1-skeletons."""
from __future__ import annotations

import json
import logging
from pathlib import Path

from .complex import Cells, SimplicialComplex, as_simplex
from .errors import ComplexValidationError

log = logging.getLogger(__name__)


def complex_to_dict(X: Cells) -> dict:
    """Dense-id JSON form. Labels are relabelled 0..V-1 in increasing order."""
    relabel = {v: i for i, v in enumerate(X.vertices)}
    simplices = sorted((sorted(relabel[v] for v in s) for s in X.maximal_simplices), key=lambda s: (len(s), s))
    return {"dim": X.dim, "num_vertices": X.num_vertices, "maximal_simplices": simplices}


def dump_complex(X: Cells, path) -> None:
    Path(path).write_text(json.dumps(complex_to_dict(X)) + "\n")


def parse_complex(data: dict) -> tuple[SimplicialComplex, dict]:
    """Validate a decoded JSON complex.

    Duplicated or nested maximal simplices are dropped and counted in the
    returned notes. Anything else malformed raises ComplexValidationError
    naming the first offending simplex.
    """
    if not isinstance(data, dict):
        raise ComplexValidationError("top-level JSON value must be an object")
    for key in ("dim", "num_vertices", "maximal_simplices"):
        if key not in data:
            raise ComplexValidationError(f"missing field {key!r}")
    nv = data["num_vertices"]
    if not isinstance(nv, int) or nv < 0:
        raise ComplexValidationError(f"num_vertices must be a nonnegative integer, got {nv!r}")
    raw = data["maximal_simplices"]
    if not isinstance(raw, list):
        raise ComplexValidationError("maximal_simplices must be a list")
    simplices = []
    for entry in raw:
        if not isinstance(entry, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in entry):
            raise ComplexValidationError(f"simplex {entry!r} is not a list of integers", offending=entry)
        s = as_simplex(entry)
        if s[0] < 0 or s[-1] >= nv:
            raise ComplexValidationError(f"simplex {entry} uses a vertex outside 0..{nv - 1}", offending=entry)
        simplices.append(s)
    X = SimplicialComplex(simplices)
    duplicates = len(simplices) - len(set(simplices))
    nested = len(set(simplices)) - len(X.maximal_simplices)
    if X.num_vertices != nv:
        missing = sorted(set(range(nv)) - set(X.vertices))
        raise ComplexValidationError(f"vertices {missing[:5]} appear in no simplex", offending=missing[:1])
    if X.dim != data["dim"]:
        raise ComplexValidationError(f"declared dim {data['dim']} but simplices have dim {X.dim}")
    return X, {"duplicates_removed": duplicates, "nested_removed": nested}


def load_complex(path, with_notes: bool = False):
    """Read and validate a JSON complex file.

    With ``with_notes`` the normalization counts are returned alongside.
    """
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ComplexValidationError(f"{path}: not valid JSON ({exc})") from exc
    X, notes = parse_complex(data)
    if notes["duplicates_removed"] or notes["nested_removed"]:
        log.info("%s: normalized input (%s)", path, notes)
    return (X, notes) if with_notes else X


def to_dot(X: Cells, name: str = "skeleton") -> str:
    """Undirected DOT graph of the 1-skeleton with stable ordering."""
    lines = [f"graph {name} {{"]
    for v in X.vertices:
        lines.append(f"  {v};")
    for u in X.vertices:
        for w in sorted(X.adjacency[u]):
            if u < w:
                lines.append(f"  {u} -- {w};")
    lines.append("}")
    return "\n".join(lines) + "\n"
