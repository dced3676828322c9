"""Singularity data, the dominant-scheme program, and the double-scaling limit.

Every scheme contribution is singular at u = 1/D with pole order equal to its
broken-chain count b, so the schemes that dominate a fixed degree maximize b.
The maximum is an integer linear program over the loop/junction structure left
after deleting the broken chains; its optimizers are realized explicitly by
binary trees with unbroken loop leaves (case a), rooted trivalent graphs
(case b), or mixtures.  Resumming the case-a family over all degrees gives the
double-scaling series, summable for 3 <= D <= 5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .chains import (
    BROKEN,
    UNBROKEN_DISTINCT,
    ChainKind,
    Scheme,
    SchemeBuilder,
    scheme_degree,
    validate_scheme,
)
from .errors import (
    Infeasible,
    InternalCheckFailed,
    OutsideSummabilityRange,
    SquareRootDomain,
)
from .series import PowerSeries, melonic_series

CASE_A_COEFF_FACTORIAL = "inverse_factorial"
CASE_A_COEFF_CATALAN = "catalan"


@dataclass(frozen=True)
class SingularData:
    """Exact singularity constants of the melonic series for one dimension."""

    dim: int
    z_critical: Fraction          # D^D / (D+1)^(D+1)
    t_critical: Fraction          # T at the critical point, (D+1)/D
    u_critical: Fraction          # z T^(D+1) at the critical point, 1/D
    sqrt_coeff_squared: Fraction  # square of the square-root term, 2(D+1)/D^3


def singular_data(dim: int) -> SingularData:
    if dim < 3:
        raise ValueError("dimension must be >= 3")
    return SingularData(
        dim,
        Fraction(dim ** dim, (dim + 1) ** (dim + 1)),
        Fraction(dim + 1, dim),
        Fraction(1, dim),
        Fraction(2 * (dim + 1), dim ** 3),
    )


# -- the broken-chain maximization --------------------------------------------------


@dataclass(frozen=True)
class LPResult:
    """Maximum of 2x + 3y - 1 over (D-2)x + Dy = delta, x, y >= 0 integers."""

    dim: int
    delta: int
    beta: int | None
    pairs: tuple[tuple[int, int], ...]    # all optimal (x, y)

    @property
    def feasible(self) -> bool:
        return self.beta is not None


def beta(dim: int, delta: int) -> LPResult:
    if delta < 1:
        raise ValueError("degree must be >= 1")
    best = None
    pairs = []
    for x in range(delta // (dim - 2) + 1):
        rest = delta - (dim - 2) * x
        if rest % dim:
            continue
        y = rest // dim
        val = 2 * x + 3 * y - 1
        if best is None or val > best:
            best = val
            pairs = [(x, y)]
        elif val == best:
            pairs.append((x, y))
    return LPResult(dim, delta, best, tuple(sorted(pairs)))


# -- explicit dominant schemes -------------------------------------------------------


def _binary_shapes(leaves: int):
    """Plane binary tree shapes with the given number of leaves."""
    if leaves == 1:
        return ["leaf"]
    out = []
    for nl in range(1, leaves):
        for left in _binary_shapes(nl):
            for right in _binary_shapes(leaves - nl):
                out.append((left, right))
    return out


class _FamilyAssembler:
    """Builds a dominant scheme: regular pairs now, broken chains at the end."""

    def __init__(self, dim: int):
        self.b = SchemeBuilder(dim)
        self.dim = dim
        self.links: list[tuple[tuple[int, int], tuple[int, int]]] = []

    def node_colors(self):
        """Parallel colors of a junction pair: external colors are {1, 2, 3}."""
        return [c for c in range(self.dim + 1) if c not in (1, 2, 3)]

    def root_melon(self) -> tuple[int, int]:
        v = self.b.add_pair([c for c in range(self.dim + 1) if c != 1])
        self.b.set_root(v, 0)
        return (v, 1)

    def junction(self) -> int:
        return self.b.add_pair(self.node_colors())

    def loop_leaf(self) -> tuple[int, int]:
        v = self.junction()
        cv = self.b.add_chain_vertex(ChainKind(UNBROKEN_DISTINCT, 2, 3))
        self.b.connect(("b", v, 2), ("cv", cv, "lw"))
        self.b.connect(("w", v, 2), ("cv", cv, "lb"))
        self.b.connect(("b", v, 3), ("cv", cv, "rw"))
        self.b.connect(("w", v, 3), ("cv", cv, "rb"))
        return (v, 1)

    def subtree(self, shape) -> tuple[int, int]:
        if shape == "leaf":
            return self.loop_leaf()
        v = self.junction()
        left, right = shape
        self.links.append(((v, 2), self.subtree(left)))
        self.links.append(((v, 3), self.subtree(right)))
        return (v, 1)

    def attach_extra_broken(self):
        """One case-b move: a fresh broken chain whose two ends subdivide edges."""
        free_ends = []
        for _ in range(2):
            (a, b) = self.links.pop(0)
            v = self.junction()
            self.links.append((a, (v, 1)))
            self.links.append(((v, 2), b))
            free_ends.append((v, 3))
        self.links.append(tuple(free_ends))

    def finish(self) -> Scheme:
        for (va, ca), (vb, cb) in self.links:
            cv = self.b.add_chain_vertex(ChainKind(BROKEN, ca, cb))
            self.b.connect(("b", va, ca), ("cv", cv, "lw"))
            self.b.connect(("w", va, ca), ("cv", cv, "lb"))
            self.b.connect(("b", vb, cb), ("cv", cv, "rw"))
            self.b.connect(("w", vb, cb), ("cv", cv, "rb"))
        return self.b.build()


def _build_dominant(dim: int, c_plus: int, q: int) -> list[Scheme]:
    schemes = []
    if c_plus > 0:
        shapes = _binary_shapes(c_plus)
    else:
        shapes = [None]
    for shape in shapes:
        asm = _FamilyAssembler(dim)
        rm = asm.root_melon()
        extra = q
        if shape is None:
            # rooted trivalent seed: one junction with a broken loop
            v = asm.junction()
            asm.links.append((rm, (v, 1)))
            asm.links.append(((v, 2), (v, 3)))
            extra = q - 1
        else:
            asm.links.append((rm, asm.subtree(shape)))
        for _ in range(extra):
            asm.attach_extra_broken()
        schemes.append(asm.finish())
    return schemes


@dataclass(frozen=True)
class DominantFamily:
    """Optimal (loops, junction-cycles) pair with explicit small schemes."""

    dim: int
    delta: int
    c_plus: int          # unbroken loop leaves
    q: int               # non-separating broken chains
    broken_count: int    # 2*c_plus + 3*q - 1
    description: str
    schemes: tuple[Scheme, ...]


def dominant_scheme_family(dim: int, delta: int,
                           max_constructed_leaves: int = 4) -> list[DominantFamily]:
    """Explicit maximizers of the broken-chain count for one degree.

    For every optimal (x, y) of the linear program this returns the
    structural description plus constructed schemes: all plane binary tree
    shapes in the pure loop case, one representative otherwise.
    """
    lp = beta(dim, delta)
    if not lp.feasible:
        raise Infeasible(f"no (x, y) >= 0 solves (D-2)x + Dy = {delta} for D={dim}")
    out = []
    for (x, y) in lp.pairs:
        if y == 0:
            desc = (f"binary tree: root melon plus {x} unbroken loop leaves, "
                    f"{x - 1} junction dipoles, {2 * x - 1} broken chains")
        elif x == 0:
            desc = (f"rooted trivalent graph: root melon, {2 * y - 1} junction "
                    f"dipoles, {3 * y - 1} broken chains")
        else:
            desc = (f"binary tree with {x} unbroken loop leaves and {y} extra "
                    f"broken chains attached through junction dipoles")
        if x <= max_constructed_leaves:
            schemes = tuple(_build_dominant(dim, x, y))
        else:
            schemes = ()
        for s in schemes:
            validate_scheme(s)
            b_count = sum(1 for cv in s.chain_vertices if cv.kind == BROKEN)
            if b_count != lp.beta:
                raise InternalCheckFailed("constructed scheme misses the optimum")
            if scheme_degree(s) != delta:
                raise InternalCheckFailed("constructed scheme has the wrong degree")
        out.append(DominantFamily(dim, delta, x, y, lp.beta, desc, schemes))
    return out


def dominant_structure_report(s: Scheme) -> dict:
    """Remove every broken chain-vertex and summarize what is left.

    Dominant schemes leave: the root melon alone in the root component,
    degree-(D-2) components made of one junction dipole with an unbroken
    loop, and bare junction pairs as the degree-0 components.
    """
    from .removal import Workbench
    wb = Workbench(s)
    for idx in sorted(wb.cvs):
        if wb.cvs[idx].kind == BROKEN:
            wb.remove_chain_vertex(idx)
    comps = wb.components()
    root_comp = wb.root_component()
    report = {"root_is_bare_pair": False, "zero_components": 0,
              "zero_all_bare_pairs": True, "positive_degrees": []}
    for comp in comps:
        sub = wb.component_scheme(comp)
        deg = scheme_degree(sub)
        if comp == root_comp:
            report["root_is_bare_pair"] = (sub.p == 1 and not sub.chain_vertices
                                           and deg == 0)
        elif deg == 0:
            report["zero_components"] += 1
            if sub.p != 1 or sub.chain_vertices:
                report["zero_all_bare_pairs"] = False
        else:
            report["positive_degrees"].append(deg)
    return report


# -- case-a contribution and double scaling ------------------------------------------


def case_a_coefficient(n: int, convention: str) -> Fraction:
    if convention == CASE_A_COEFF_FACTORIAL:
        return Fraction(comb(2 * n - 2, n - 1), factorial(n))
    if convention == CASE_A_COEFF_CATALAN:
        return Fraction(comb(2 * n - 2, n - 1), n)
    raise ValueError(f"unknown coefficient convention {convention!r}")


def case_a_contribution(dim: int, n: int, order: int,
                        convention: str = CASE_A_COEFF_FACTORIAL) -> PowerSeries:
    """Series of the binary-tree family at fixed leaf count n, one root color.

    Two coefficient conventions are in circulation (1/n! times a central
    binomial, versus a Catalan number); they agree only at n <= 2, the
    inverse-factorial one stops being an integer at n = 4, and nothing here
    hides the difference: ``convention`` picks a side explicitly.
    """
    if n < 1:
        raise ValueError("the family needs n >= 1")
    t = melonic_series(dim, order)
    u = PowerSeries.x(order) * t.pow(dim + 1)
    one = PowerSeries.one(order)
    du = u * dim
    arm = du * (one - du).reciprocal()            # arbitrary chain factor
    loop = u * (one - u * u).reciprocal()
    coeff = case_a_coefficient(n, convention)
    series = (t * u * dim) * arm.pow(2 * n - 1) * u.pow(2 * n - 1) * loop.pow(n)
    color_factor = comb(dim, 2) ** (n - 1) * comb(dim, 2) ** n
    return series * (coeff * color_factor)


def _evaluate_series_adaptive(dim: int, z: float, rtol: float = 1e-12):
    """(T(z), U(z)) floats from truncations refined until stable."""
    prev = None
    order = 40
    while order <= 2560:
        t = melonic_series(dim, order)
        tv = sum(float(c) * z ** i for i, c in enumerate(t.coeffs))
        uv = z * tv ** (dim + 1)
        if prev is not None and abs(tv - prev) <= rtol * abs(tv):
            return tv, uv
        prev = tv
        order *= 2
    return prev, z * prev ** (dim + 1)


def shifted_critical(dim: int, n_size) -> Fraction:
    """Shifted critical point z1 = z0 (1 - D^2 / (N^(D-2) 2 (D+1)^3))."""
    sd = singular_data(dim)
    shift = Fraction(dim ** 2, 2 * (dim + 1) ** 3) / Fraction(n_size) ** (dim - 2)
    return sd.z_critical * (1 - shift)


def double_scaling(dim: int, n_size, z) -> float:
    """Resummed all-degree series at finite N, evaluated numerically.

    Valid for 3 <= D <= 5 (the family is summable there) and 0 < z < z0 with
    the square-root argument nonnegative; approaches T(z) as N grows.
    """
    if not 3 <= dim <= 5:
        raise OutsideSummabilityRange("double scaling is summable for 3 <= D <= 5")
    sd = singular_data(dim)
    zf = float(z)
    if not 0 < zf < float(sd.z_critical):
        raise ValueError("need 0 < z < the critical point")
    tv, uv = _evaluate_series_adaptive(dim, zf)
    du = dim * uv
    ratio = (1 - du) / (dim * (dim - 1) * uv)
    arg = 1 - 4 * (du / (1 - du)) ** 2 * uv ** 2 * comb(dim, 2) ** 2 \
        * (uv / (1 - uv ** 2)) / float(n_size) ** (dim - 2)
    if arg < 0:
        raise SquareRootDomain(f"square-root argument {arg} < 0 "
                               "(z beyond the shifted critical point)")
    return tv * (1 + ratio - ratio * math.sqrt(arg))
