"""File formats: graphs, pre-graphs, schemes, core decompositions.

Everything is JSON.  A graph record carries ``dim``, ``k``, ``matchings``
(D+1 integer arrays in color order, 0-indexed) and an optional ``root``
object with ``black`` and ``color``.  Readers reject unknown fields so that
format drift fails loudly instead of being silently ignored.
"""

from __future__ import annotations

import json

from .chains import ChainKind, Scheme, validate_scheme
from .errors import MelonforgeError
from .graphs import ColoredGraph, PreGraph, validate, validate_pregraph
from .reduction import CoreDecomposition, ROOT_BLACK_SLOT, ROOT_WHITE_SLOT


class FormatError(MelonforgeError):
    pass


def _take(record: dict, required, optional=()):
    unknown = set(record) - set(required) - set(optional)
    if unknown:
        raise FormatError(f"unknown fields: {sorted(unknown)}")
    missing = set(required) - set(record)
    if missing:
        raise FormatError(f"missing fields: {sorted(missing)}")


def graph_to_record(g: ColoredGraph) -> dict:
    rec = {"dim": g.dim, "k": g.k, "matchings": [list(m) for m in g.matchings]}
    if g.root is not None:
        rec["root"] = {"black": g.root[0], "color": g.root[1]}
    return rec


def graph_from_record(rec: dict) -> ColoredGraph:
    _take(rec, ("dim", "k", "matchings"), ("root",))
    root = None
    if "root" in rec:
        _take(rec["root"], ("black", "color"))
        root = (rec["root"]["black"], rec["root"]["color"])
    return validate(rec["dim"], rec["k"], rec["matchings"], root)


def pregraph_to_record(p: PreGraph) -> dict:
    return {
        "dim": p.dim,
        "blacks": p.blacks,
        "whites": p.whites,
        "matchings": [list(m) for m in p.matchings],
        "open": [{"side": s, "vertex": v, "color": c} for s, v, c in p.open_halves()],
    }


def pregraph_from_record(rec: dict) -> PreGraph:
    _take(rec, ("dim", "blacks", "whites", "matchings"), ("open",))
    p = validate_pregraph(rec["dim"], rec["blacks"], rec["whites"], rec["matchings"])
    if "open" in rec:
        stated = {(h["side"][0], h["vertex"], h["color"]) for h in rec["open"]}
        if stated != set(p.open_halves()):
            raise FormatError("open half-edge list disagrees with the matchings")
    return p


def _endpoint_to_record(ep) -> dict:
    if ep[0] in ("b", "w"):
        return {"side": "black" if ep[0] == "b" else "white",
                "vertex": ep[1], "color": ep[2]}
    return {"cv": ep[1], "port": ep[2]}


def _endpoint_from_record(rec) -> tuple:
    if "cv" in rec:
        _take(rec, ("cv", "port"))
        return ("cv", rec["cv"], rec["port"])
    _take(rec, ("side", "vertex", "color"))
    return ("b" if rec["side"] == "black" else "w", rec["vertex"], rec["color"])


def scheme_to_record(s: Scheme) -> dict:
    cvs = []
    pairing = s.pairing()
    for idx, cv in enumerate(s.chain_vertices):
        cvs.append({
            "kind": cv.kind,
            "left_color": cv.left_color,
            "right_color": cv.right_color,
            "secondary": cv.secondary,
            "ports": {port: _endpoint_to_record(pairing[("cv", idx, port)])
                      for port in ("lw", "lb", "rw", "rb")},
        })
    mats = [[None] * s.p for _ in range(s.dim + 1)]
    for a, b in s.edges:
        if a[0] == "b" and b[0] == "w":
            mats[a[2]][a[1]] = b[1]
        elif b[0] == "b" and a[0] == "w":
            mats[b[2]][b[1]] = a[1]
    return {
        "dim": s.dim,
        "k": s.p,
        "matchings": mats,     # null where the half-edge meets a chain-vertex
        "chain_vertices": cvs,
        "root": {"black": s.root[0], "color": s.root[1]},
    }


def scheme_from_record(rec: dict) -> Scheme:
    _take(rec, ("dim", "k", "matchings", "chain_vertices", "root"))
    _take(rec["root"], ("black", "color"))
    dim, p = rec["dim"], rec["k"]
    edges = set()
    for c in range(dim + 1):
        for b, w in enumerate(rec["matchings"][c]):
            if w is not None:
                edges.add(tuple(sorted((("b", b, c), ("w", w, c)))))
    kinds = []
    for idx, cv in enumerate(rec["chain_vertices"]):
        _take(cv, ("kind", "left_color", "right_color", "ports"), ("secondary",))
        kinds.append(ChainKind(cv["kind"], cv["left_color"], cv["right_color"],
                               cv.get("secondary")))
        for port, target in cv["ports"].items():
            edges.add(tuple(sorted((("cv", idx, port),
                                    _endpoint_from_record(target)))))
    s = Scheme(dim, p, tuple(sorted(edges)), tuple(kinds),
               (rec["root"]["black"], rec["root"]["color"]))
    return validate_scheme(s)


def decomposition_to_record(d: CoreDecomposition) -> dict:
    slots = []
    for slot, att in zip(d.slots, d.attachments):
        if slot in (ROOT_BLACK_SLOT, ROOT_WHITE_SLOT):
            label = slot
        else:
            label = {"edge": {"black": slot[1][0], "color": slot[1][1]}}
        slots.append({"slot": label,
                      "attachment": None if att is None else pregraph_to_record(att)})
    return {
        "dim": d.dim,
        "core": None if d.core is None else graph_to_record(d.core),
        "slots": slots,
    }


def dump_line(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def load_line(line: str) -> dict:
    return json.loads(line)
