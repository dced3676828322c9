"""Exact generating-function arithmetic.

Truncated power series over arbitrary-precision rationals, rational
functions in the dipole-counting variable u with integer coefficients, the
melonic tree series T (unique series solution of T = 1 + z T^(D+1)), the ten
chain generating functions, per-scheme contributions, and the assembly of the
fixed-degree series F_delta(z) = T(z) * sum of scheme contributions at
u = z T(z)^(D+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import InternalCheckFailed, UnknownKind


class PowerSeries:
    """Power series truncated at a fixed order, exact rational coefficients."""

    __slots__ = ("var", "coeffs")

    def __init__(self, coeffs, var="z"):
        self.var = var
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n] if 0 <= n <= self.order else Fraction(0)

    def __eq__(self, other):
        return (isinstance(other, PowerSeries) and self.var == other.var
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return f"PowerSeries[{self.var}; {head}{'...' if self.order > 5 else ''}]"

    @classmethod
    def zero(cls, order: int, var="z") -> "PowerSeries":
        return cls([0] * (order + 1), var)

    @classmethod
    def one(cls, order: int, var="z") -> "PowerSeries":
        return cls([1] + [0] * order, var)

    @classmethod
    def x(cls, order: int, var="z") -> "PowerSeries":
        return cls([0, 1] + [0] * (order - 1), var)

    def _check(self, other: "PowerSeries"):
        if self.var != other.var or self.order != other.order:
            raise ValueError("series mismatch: "
                             f"{self.var}^{self.order} vs {other.var}^{other.order}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            coeffs = list(self.coeffs)
            coeffs[0] += other
            return PowerSeries(coeffs, self.var)
        self._check(other)
        return PowerSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-a for a in self.coeffs], self.var)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PowerSeries([a * other for a in self.coeffs], self.var)
        self._check(other)
        n = self.order
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return PowerSeries(out, self.var)

    __rmul__ = __mul__

    def pow(self, m: int) -> "PowerSeries":
        out = PowerSeries.one(self.order, self.var)
        base = self
        while m:
            if m & 1:
                out = out * base
            base = base * base
            m >>= 1
        return out

    def reciprocal(self) -> "PowerSeries":
        if self.coeffs[0] == 0:
            raise ZeroDivisionError("series has no constant term")
        n = self.order
        inv0 = 1 / self.coeffs[0]
        out = [inv0] + [Fraction(0)] * n
        for m in range(1, n + 1):
            acc = Fraction(0)
            for i in range(1, m + 1):
                acc += self.coeffs[i] * out[m - i]
            out[m] = -inv0 * acc
        return PowerSeries(out, self.var)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * Fraction(1, 1) * Fraction(other) ** -1
        return self * other.reciprocal()

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner), requiring inner to have zero constant term."""
        if inner.coeffs[0] != 0:
            raise ValueError("composition needs a zero constant term")
        out = PowerSeries.zero(inner.order, inner.var)
        power = PowerSeries.one(inner.order, inner.var)
        for c in self.coeffs:
            if c:
                out = out + power * c
            power = power * inner
        return out

    def truncate(self, order: int) -> "PowerSeries":
        if order <= self.order:
            return PowerSeries(self.coeffs[:order + 1], self.var)
        return PowerSeries(self.coeffs + (Fraction(0),) * (order - self.order), self.var)

    def evaluate(self, x) -> Fraction:
        """Horner evaluation of the truncated polynomial at a rational point."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


# -- rational functions in u ---------------------------------------------------------


def _poly_trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_add(a, b):
    n = max(len(a), len(b))
    return _poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                       for i in range(n)])


def _poly_scale(a, s):
    return _poly_trim([x * s for x in a])


@dataclass(frozen=True)
class RationalFunctionU:
    """Ratio of integer polynomials in u; denominator has nonzero constant term."""

    num: tuple[int, ...]
    den: tuple[int, ...] = (1,)

    def __post_init__(self):
        object.__setattr__(self, "num", _poly_trim(self.num))
        object.__setattr__(self, "den", _poly_trim(self.den))
        if self.den[0] == 0:
            raise ZeroDivisionError("denominator vanishes at u = 0")

    def __mul__(self, other):
        if isinstance(other, int):
            return RationalFunctionU(_poly_scale(self.num, other), self.den)
        return RationalFunctionU(_poly_mul(self.num, other.num),
                                 _poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, int):
            other = RationalFunctionU((other,))
        return RationalFunctionU(
            _poly_add(_poly_mul(self.num, other.den), _poly_mul(other.num, self.den)),
            _poly_mul(self.den, other.den))

    def __sub__(self, other):
        if isinstance(other, int):
            other = RationalFunctionU((other,))
        return self + RationalFunctionU(_poly_scale(other.num, -1), other.den)

    def pow(self, m: int) -> "RationalFunctionU":
        out = RationalFunctionU((1,))
        for _ in range(m):
            out = out * self
        return out

    def equals(self, other: "RationalFunctionU") -> bool:
        """Equality as rational functions (cross multiplication)."""
        return _poly_mul(self.num, other.den) == _poly_mul(other.num, self.den)

    def series(self, order: int) -> PowerSeries:
        num = PowerSeries(list(self.num) + [0] * max(0, order + 1 - len(self.num)),
                          "u").truncate(order)
        den = PowerSeries(list(self.den) + [0] * max(0, order + 1 - len(self.den)),
                          "u").truncate(order)
        return num * den.reciprocal()

    def evaluate(self, x) -> Fraction:
        num = sum(Fraction(c) * Fraction(x) ** i for i, c in enumerate(self.num))
        den = sum(Fraction(c) * Fraction(x) ** i for i, c in enumerate(self.den))
        return num / den

    def pole_order(self, factor: tuple[int, ...]) -> int:
        """Multiplicity of the given linear factor in the denominator."""
        n = 0
        den = self.den
        while True:
            quot, rem = _poly_divmod(den, factor)
            if rem is None or any(rem):
                break
            den = quot
            n += 1
        # Exact when the numerator does not share the root, which holds for
        # the monomial numerators produced by scheme contributions.
        return n


def _poly_divmod(a, b):
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    if len(a) < len(b):
        return None, a
    quot = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(quot) - 1, -1, -1):
        quot[i] = a[i + len(b) - 1] / lead
        for j, y in enumerate(b):
            a[i + j] -= quot[i] * y
    return _poly_trim(quot), _poly_trim(a)


U = RationalFunctionU((0, 1))
ONE_RF = RationalFunctionU((1,))


# -- melonic series and the chain generating functions -------------------------------


def fuss_catalan(dim: int, k: int) -> Fraction:
    """Number of rooted melonic graphs (one root color) with k black vertices."""
    return Fraction(comb((dim + 1) * k + 1, k), (dim + 1) * k + 1)


def melonic_series(dim: int, order: int) -> PowerSeries:
    """T(z): fixed point of T = 1 + z T^(D+1), cross-checked term by term
    against the closed binomial form."""
    t = PowerSeries.one(order)
    z = PowerSeries.x(order)
    for _ in range(order + 1):
        t = z * t.pow(dim + 1) + 1
    for k in range(order + 1):
        if t[k] != fuss_catalan(dim, k):
            raise InternalCheckFailed(f"melonic coefficient {k} disagrees "
                                      "with the closed form")
    return t


def u_series(dim: int, order: int) -> PowerSeries:
    """U(z) = z T(z)^(D+1); the dipole-counting variable along the tree family."""
    t = melonic_series(dim, order)
    return PowerSeries.x(order) * t.pow(dim + 1)


_CHAIN_GF_BUILDERS = {
    # one unbroken chain per length, two fixed end colors
    "unbroken": lambda d: RationalFunctionU((0, 1), (1, -1)),
    "unbroken_proper": lambda d: RationalFunctionU((0, 0, 1), (1, -1)),
    "unbroken_proper_distinct": lambda d: RationalFunctionU((0, 0, 0, 1), (1, 0, -1)),
    "unbroken_proper_equal": lambda d: RationalFunctionU((0, 0, 1), (1, 0, -1)),
    # arbitrary chains with a fixed left color
    "arbitrary": lambda d: RationalFunctionU((0, d), (1, -d)),
    "arbitrary_proper": lambda d: RationalFunctionU((0, 0, d * d), (1, -d)),
    "arbitrary_equal": lambda d: RationalFunctionU(
        (0, 0, d), _poly_mul((1, 1), (1, -d))),
    "arbitrary_distinct": lambda d: RationalFunctionU(
        (0, 1), _poly_mul((1, 1), (1, -d))),
    # proper broken chains with both end colors fixed
    "broken_proper_equal": lambda d: RationalFunctionU(
        (0, 0, 0, d * (d - 1)), _poly_mul((1, 0, -1), (1, -d))),
    "broken_proper_distinct": lambda d: RationalFunctionU(
        (0, 0, d - 1), _poly_mul((1, 0, -1), (1, -d))),
}


def chain_gf(kind: str, dim: int) -> RationalFunctionU:
    """Generating function of a chain family, by the number of (D-1)-dipoles."""
    try:
        builder = _CHAIN_GF_BUILDERS[kind]
    except KeyError:
        raise UnknownKind(f"no chain family named {kind!r}") from None
    return builder(dim)


def scheme_gf(signature, dim: int) -> RationalFunctionU:
    """Contribution of one reduced scheme, from its signature
    (p, broken_equal, broken_distinct, unbroken_equal, unbroken_distinct)."""
    p, be, bd, ue, ud = signature
    out = RationalFunctionU(tuple([0] * p + [1]))
    out = out * chain_gf("broken_proper_equal", dim).pow(be)
    out = out * chain_gf("broken_proper_distinct", dim).pow(bd)
    out = out * chain_gf("unbroken_proper_equal", dim).pow(ue)
    out = out * chain_gf("unbroken_proper_distinct", dim).pow(ud)

    # Closed monomial form over (1-Du)^b (1-u^2)^(b+c).
    b, c = be + bd, ue + ud
    mono_exp = p + be + ud + 2 * b + 2 * c
    mono = [0] * mono_exp + [dim ** be * (dim - 1) ** b]
    closed_den = _poly_mul(_power((1, -dim), b), _power((1, 0, -1), b + c))
    closed = RationalFunctionU(tuple(mono), closed_den)
    if not out.equals(closed):
        raise InternalCheckFailed("scheme contribution disagrees with its closed form")
    return out


def _power(poly, m):
    out = (1,)
    for _ in range(m):
        out = _poly_mul(out, poly)
    return out


def assemble_degree_series(dim: int, signatures, order: int) -> PowerSeries:
    """F_delta(z) for one root color: T(z) * sum of G_s(z T^(D+1)) over schemes."""
    total_u = PowerSeries.zero(order, "u")
    for sig in signatures:
        total_u = total_u + scheme_gf(sig, dim).series(order)
    t = melonic_series(dim, order)
    u = PowerSeries.x(order) * t.pow(dim + 1)
    return t * total_u.compose(u)


def closed_form_first_degree(dim: int, order: int) -> PowerSeries:
    """Closed form of the degree-(D-2) series for one root color:
    T * (D(D-1)/2) * u^2/(1-u^2) * 1/(1-Du) at u = z T^(D+1)."""
    t = melonic_series(dim, order)
    u = PowerSeries.x(order) * t.pow(dim + 1)
    u2 = u * u
    one = PowerSeries.one(order)
    loop = u2 * (one - u2).reciprocal()
    arm = (one - u * dim).reciprocal()
    return t * loop * arm * Fraction(dim * (dim - 1), 2)
