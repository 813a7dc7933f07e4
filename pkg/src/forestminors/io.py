"""Graph files, family names and JSON certificates."""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .erdosposa import DualityCertificate, Family, Packing, Transversal
from .generators import parse_family_member
from .graph import Graph
from .minors import MinorModel

__all__ = [
    "GraphFileError",
    "parse_graph_file",
    "read_graph_file",
    "format_graph_file",
    "parse_family",
    "graph_digest",
    "certificate_document",
    "dump_document",
    "load_document",
    "check_document",
]


class GraphFileError(ValueError):
    """Malformed graph file; the message names the offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_graph_file(text: str) -> tuple[Graph, tuple[int, ...]]:
    """Parse ``n m`` / ``u v`` edge lines / optional ``r v1 v2 ...`` roots.

    Blank lines and lines starting with ``#`` are ignored.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            rows.append((lineno, line.split()))
    if not rows:
        raise GraphFileError(1, "missing header 'n m'")
    lineno, head = rows[0]
    if len(head) != 2 or not all(tok.isdigit() for tok in head):
        raise GraphFileError(lineno, "header must be two non-negative integers 'n m'")
    n, m = int(head[0]), int(head[1])
    edges = []
    seen = set()
    roots: tuple[int, ...] = ()
    body = rows[1:]
    for lineno, toks in body:
        if toks[0] == "r":
            if roots:
                raise GraphFileError(lineno, "second roots line")
            vals = _ints(lineno, toks[1:])
            for v in vals:
                if not 0 <= v < n:
                    raise GraphFileError(lineno, f"root {v} out of range [0, {n})")
            if len(set(vals)) != len(vals):
                raise GraphFileError(lineno, "repeated root")
            roots = tuple(vals)
            continue
        if roots:
            raise GraphFileError(lineno, "edge after the roots line")
        if len(toks) != 2:
            raise GraphFileError(lineno, "edge line must be 'u v'")
        u, v = _ints(lineno, toks)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFileError(lineno, f"vertex id out of range [0, {n}) in edge {u} {v}")
        if u == v:
            raise GraphFileError(lineno, f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFileError(lineno, f"duplicate edge {u} {v}")
        seen.add(key)
        edges.append(key)
    if len(edges) != m:
        last = body[-1][0] if body else rows[0][0]
        raise GraphFileError(last, f"header promises {m} edges, found {len(edges)}")
    return Graph(n, edges), roots


def _ints(lineno: int, toks) -> list[int]:
    try:
        vals = [int(tok) for tok in toks]
    except ValueError:
        raise GraphFileError(lineno, "expected integers") from None
    return vals


def read_graph_file(path: str) -> tuple[Graph, tuple[int, ...]]:
    with open(path, encoding="ascii") as fh:
        return parse_graph_file(fh.read())


def format_graph_file(g: Graph, roots=()) -> str:
    lines = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges()]
    if roots:
        lines.append("r " + " ".join(map(str, roots)))
    return "\n".join(lines) + "\n"


def parse_family(spec: str) -> Family:
    """Comma-separated member names, e.g. ``P3,K3`` or ``2K2``."""
    names = [s for s in (p.strip() for p in spec.split(",")) if s]
    if not names:
        raise ValueError("empty family")
    return Family(tuple(parse_family_member(s) for s in names))


def graph_digest(g: Graph) -> str:
    payload = json.dumps([g.n, sorted(g.edges())], separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def _models_json(packing: Packing) -> list[dict]:
    return [
        {"member": i, "branch_sets": {str(x): sorted(s) for x, s in sorted(m.branch_sets.items())}}
        for i, m in packing.models
    ]


def certificate_document(kind: str, g: Graph, family: list[str] | None = None, *,
                         packing: Packing | None = None, transversal: Transversal | None = None,
                         cert: DualityCertificate | None = None, extra: dict | None = None) -> dict:
    doc: dict[str, Any] = {"kind": kind, "graph": {"n": g.n, "digest": graph_digest(g)}}
    if family is not None:
        doc["family"] = list(family)
    if cert is not None:
        packing, transversal = cert.packing, cert.transversal
        doc["mode"] = cert.mode
        doc["constant_used"] = str(cert.constant_used)
        doc["ratio"] = cert.ratio
        doc["warnings"] = list(cert.warnings)
    if packing is not None:
        doc["models"] = _models_json(packing)
    if transversal is not None:
        doc["transversal"] = sorted(transversal.vertices)
    if extra:
        doc.update(extra)
    return doc


def dump_document(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_document(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("not a certificate document")
    return doc


def _packing_from(doc: dict) -> Packing:
    models = []
    for entry in doc.get("models", []):
        branch = {int(x): frozenset(int(v) for v in vs) for x, vs in entry["branch_sets"].items()}
        models.append((int(entry["member"]), MinorModel(branch)))
    return Packing(tuple(models))


def check_document(doc: dict, g: Graph) -> tuple[bool, str]:
    """Re-verify a certificate document against ``g``; returns (ok, reason)."""
    from .erdosposa import verify_packing, verify_transversal
    from .pathwidth import pathwidth_at_most

    if doc.get("graph", {}).get("digest") != graph_digest(g):
        return False, "graph digest mismatch"
    kind = doc["kind"]
    try:
        if kind == "fpt":
            xs = [int(v) for v in doc["transversal"]]
            if any(not 0 <= v < g.n for v in xs) or len(set(xs)) != len(xs):
                return False, "transversal vertex out of range"
            if len(xs) > int(doc["k"]):
                return False, "transversal larger than k"
            keep = [v for v in range(g.n) if v not in set(xs)]
            from .graph import induced_subgraph

            sub, _ = induced_subgraph(g, keep)
            ok = pathwidth_at_most(sub, int(doc["t"]) - 1)[0]
            return ok, "ok" if ok else "pathwidth still too large"
        fam = parse_family(",".join(doc["family"]))
        if kind in ("packing", "duality"):
            if not verify_packing(fam, g, _packing_from(doc)):
                return False, "packing invalid"
        if kind in ("transversal", "duality"):
            tr = Transversal(frozenset(int(v) for v in doc["transversal"]))
            if len(tr) != len(doc["transversal"]):
                return False, "repeated transversal vertex"
            if not verify_transversal(fam, g, tr):
                return False, "transversal invalid"
        if kind == "duality" and len(doc.get("models", [])) > len(doc["transversal"]):
            return False, "packing larger than transversal"
        if kind not in ("packing", "transversal", "duality"):
            return False, f"unknown kind {kind!r}"
    except (KeyError, TypeError, ValueError) as exc:
        return False, f"malformed document ({exc})"
    return True, "ok"
