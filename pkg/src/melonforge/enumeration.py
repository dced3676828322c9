"""Exhaustive enumeration: degree count tables, melon-free streams, catalogs.

All searches fix matchings[0] to the identity (quotienting white relabelings)
and root candidate graphs at (black 0, color 0).  Rooted rigidity converts the
scan's labeled counts into rooted-graph counts: with matchings[0] fixed there
are exactly (k-1)! labeled tuples per rooted isomorphism class, so

    rooted count = connected tuple count * k / k!.

The state count (k!)^D is refused above a budget (MELONFORGE_BUDGET or the
``budget`` argument) before any allocation happens.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from . import _scan
from .chains import Scheme, canonical_scheme_encoding, scheme_from_core, scheme_signature
from .errors import SearchTooLarge, UnsupportedDimension
from .graphs import ColoredGraph, canonical_encoding, canonical_form, degree, validate
from .reduction import is_melon_free

DEFAULT_BUDGET = 10 ** 9


def search_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("MELONFORGE_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def _check_budget(dim: int, k: int, budget: int | None):
    states = _scan.state_count(dim, k)
    allowed = search_budget(budget)
    if states > allowed:
        raise SearchTooLarge(states, allowed)


def _run_scan(dim, k, collect, workers=1, backend=None, target_faces=-1):
    t = _scan.tables_for(k)
    if workers <= 1 or t.n < 2 * workers:
        return _scan.scan(dim, k, collect=collect, backend=backend,
                          target_faces=target_faces)
    bounds = np.linspace(0, t.n, workers + 1, dtype=int)
    jobs = [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if a < b]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(
            lambda se: _scan.scan(dim, k, collect=collect, backend=backend,
                                  start1=se[0], stop1=se[1],
                                  target_faces=target_faces), jobs))
    hist = sum(h for h, _ in parts)
    idx = np.sort(np.concatenate([m for _, m in parts])) if collect else parts[0][1]
    return hist, idx


@dataclass(frozen=True)
class DegreeCountTable:
    """Rooted colored graph counts (root color 0) split by degree."""

    dim: int
    k: int
    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def count_rooted(dim: int, k: int, workers: int = 1,
                 budget: int | None = None, backend: str | None = None) -> DegreeCountTable:
    """Exhaustive degree census of rooted graphs with k black vertices."""
    if k == 1:
        return DegreeCountTable(dim, 1, {0: 1})
    _check_budget(dim, k, budget)
    hist, _ = _run_scan(dim, k, _scan.COLLECT_NONE, workers, backend)
    base = dim * (dim - 1) * k // 2 + dim
    counts = {}
    kfac = factorial(k)
    for faces, n in enumerate(hist.tolist()):
        if not n:
            continue
        delta = base - faces
        if n * k % kfac:
            raise AssertionError("tuple count is not a multiple of (k-1)!")
        counts[delta] = counts.get(delta, 0) + n * k // kfac
    return DegreeCountTable(dim, k, dict(sorted(counts.items())))


def _graphs_from_indices(dim, k, indices):
    seen = set()
    for flat in indices.tolist():
        mats = _scan.decode_tuple(flat, dim, k)
        g = ColoredGraph(dim, k, tuple(mats), root=(0, 0))
        enc = canonical_encoding(g)
        if enc in seen:
            continue
        seen.add(enc)
        yield canonical_form(g).graph


def enumerate_rooted(dim: int, k: int, workers: int = 1,
                     budget: int | None = None, backend: str | None = None):
    """Every rooted graph (root color 0) with k black vertices, canonically
    labeled, exactly once per isomorphism class."""
    if k == 1:
        from .graphs import delta_graph
        yield delta_graph(dim)
        return
    _check_budget(dim, k, budget)
    _, idx = _run_scan(dim, k, _scan.COLLECT_CONNECTED, workers, backend)
    yield from _graphs_from_indices(dim, k, idx)


def enumerate_melon_free(dim: int, k_max: int, degree_filter: int | None = None,
                         workers: int = 1, budget: int | None = None,
                         backend: str | None = None):
    """Melon-free rooted graphs (root color 0) with k <= k_max, one per class.

    A degree filter is applied before canonicalization, which keeps catalog
    construction cheap at larger k.
    """
    for k in range(1, k_max + 1):
        if k == 1:
            continue    # the 2-vertex graph is melonic
        _check_budget(dim, k, budget)
        target_faces = -1
        if degree_filter is not None:
            target_faces = dim * (dim - 1) * k // 2 + dim - degree_filter
            if target_faces < 0:
                continue
        _, idx = _run_scan(dim, k, _scan.COLLECT_MELON_FREE, workers, backend,
                           target_faces=target_faces)
        for g in _graphs_from_indices(dim, k, idx):
            if not is_melon_free(g):
                raise AssertionError("scan emitted a graph with a proper melon")
            yield g


D3_DEFAULT_CAP = 6     # empirical catalog horizon for D = 3


@dataclass(frozen=True)
class CatalogEntry:
    encoding: bytes
    scheme: Scheme
    signature: tuple[int, int, int, int, int]
    min_k: int              # size of the smallest melon-free graph seen for it


@dataclass(frozen=True)
class SchemeCatalog:
    dim: int
    delta: int
    k_max: int
    complete: bool
    entries: tuple[CatalogEntry, ...]

    def signatures(self):
        return [e.signature for e in self.entries]


def scheme_catalog(dim: int, delta: int, k_max: int, workers: int = 1,
                   budget: int | None = None, backend: str | None = None,
                   d3_cap: int = D3_DEFAULT_CAP) -> SchemeCatalog:
    """Reduce every melon-free graph of the given degree to its scheme.

    Completeness is guaranteed for D >= 4 once k_max reaches the bound that
    the face-counting inequalities give for 15*delta dipoles; for D = 3 the
    flag just records that the configured empirical horizon was reached.
    """
    found: dict[bytes, CatalogEntry] = {}
    for g in enumerate_melon_free(dim, k_max, degree_filter=delta,
                                  workers=workers, budget=budget, backend=backend):
        if degree(g) != delta:
            continue
        s = scheme_from_core(g)
        enc = canonical_scheme_encoding(s)
        if enc not in found:
            found[enc] = CatalogEntry(enc, s, scheme_signature(s), g.k)
    if dim >= 4:
        complete = k_max >= size_bounds(dim, delta, 15 * delta, 15 * delta).k_bound
    else:
        complete = k_max >= d3_cap
    entries = tuple(sorted(found.values(), key=lambda e: (e.min_k, e.encoding)))
    return SchemeCatalog(dim, delta, k_max, complete, entries)


# -- explicit finiteness bounds (D >= 4) ------------------------------------------


def _alpha(dim: int) -> int:
    if dim == 4:
        return 0
    if dim == 5:
        return 3
    if dim == 6:
        return 6
    return (dim - 3) * (dim - 4) // 2 + 6


@dataclass(frozen=True)
class SizeBounds:
    """Explicit finite bounds on faces and size from the dipole counts.

    ``fp_coefficient(p)`` is the positive coefficient multiplying the number
    of faces of length 2p in the master inequality; ``rhs`` its right side.
    """

    dim: int
    delta: int
    t1: int
    t2: int
    vertex_capacity: int          # D(D+1)/2 - alpha(D), multiplies k from below
    rhs: Fraction
    p_max: int
    k_bound: int

    def fp_coefficient(self, p: int) -> Fraction:
        d = self.dim
        a = _alpha(d)
        return Fraction((d - 1) * (d * (d + 1) - 2 * a) - 4 * a,
                        d * (d + 1) - 2 * a) * p - (d + 1)

    def fp_bound(self, p: int) -> int:
        if p < 2:
            raise ValueError("bounded face lengths start at 2p = 4")
        if self.rhs < 0:
            return 0
        return int(self.rhs / self.fp_coefficient(p))


def size_bounds(dim: int, delta: int, t1: int, t2: int) -> SizeBounds:
    """Evaluate the face-count inequalities into explicit bounds.

    Given the degree and the numbers of (D-1)- and (D-2)-dipoles, every face
    multiplicity, the maximal face length, and the vertex count k admit bounds
    depending on nothing else; this is what makes catalogs provably complete
    for D >= 4.
    """
    if dim < 4:
        raise UnsupportedDimension("explicit size bounds need D >= 4")
    a = _alpha(dim)
    cap = dim * (dim + 1) // 2 - a
    mix = Fraction(4 * a, dim * (dim + 1) - 2 * a)
    dip = t1 * comb(dim - 1, 2) + t2 * comb(dim - 2, 2)
    rhs = (dim + 1) * delta - dim * (dim + 1) + (2 + mix) * dip
    rhs = Fraction(rhs)

    def coeff(p):
        return (dim - 1 - mix) * p - (dim + 1)

    p_max = 1
    p = 2
    while coeff(p) <= rhs:
        p_max = p
        p += 1

    # sum over p >= 2 of p * F_p is at most (2 / coeff(2)) * rhs since
    # p / coeff(p) is maximal at p = 2; feed that through the k inequality.
    if rhs < 0:
        sum_pfp = Fraction(0)
    else:
        sum_pfp = Fraction(2) * rhs / coeff(2)
    k_bound = int((sum_pfp + dip) / cap)
    return SizeBounds(dim, delta, t1, t2, cap, rhs, p_max, k_bound)
