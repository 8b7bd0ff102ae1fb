"""Exact integer polynomials and factored characteristic polynomials.

``IntPoly`` is a dense univariate polynomial over the integers, constant
term first.  ``FactoredSpectrum`` keeps a product

    x^e * prod (x^2 - rho)^{e_rho} * prod residual^{e}

as exponent bookkeeping so that characteristic polynomials of trees with
millions of vertices can be manipulated without ever being expanded.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from sympy import divisors

# Below this size schoolbook multiplication beats Kronecker packing.
_SCHOOLBOOK_CUTOFF = 24


class NonExactDivision(ArithmeticError):
    """Raised when a polynomial division leaves a nonzero remainder."""

    def __init__(self, remainder: "IntPoly"):
        self.remainder = remainder
        super().__init__(
            f"division is not exact: remainder {remainder} of degree {remainder.degree}"
        )


def _normalize(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _pack(coeffs, nbytes: int) -> int:
    """Signed Kronecker packing at base 2**(8*nbytes)."""
    pos = b"".join((c if c > 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _kronecker_mul(a: tuple[int, ...], b: tuple[int, ...]) -> list[int]:
    bound = min(len(a), len(b)) * max(abs(c) for c in a) * max(abs(c) for c in b)
    nbytes = (bound.bit_length() + 2 + 7) // 8
    m = len(a) + len(b) - 1
    half = 1 << (8 * nbytes - 1)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * m, "little")
    packed = _pack(a, nbytes) * _pack(b, nbytes) + offset
    raw = packed.to_bytes(m * nbytes, "little")
    return [
        int.from_bytes(raw[i:i + nbytes], "little") - half
        for i in range(0, m * nbytes, nbytes)
    ]


def _schoolbook_mul(a: tuple[int, ...], b: tuple[int, ...]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a):
                out[i + j] += ai * bj
    return out


class IntPoly:
    """Dense polynomial with arbitrary-precision integer coefficients.

    Coefficients are stored constant term first with no trailing zeros;
    the zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _normalize(int(c) for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("IntPoly is immutable")

    @classmethod
    def x(cls) -> "IntPoly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: int) -> "IntPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, power: int, coeff: int = 1) -> "IntPoly":
        return cls([0] * power + [coeff])

    @classmethod
    def quadratic(cls, rho: int) -> "IntPoly":
        """The factor ``x^2 - rho``."""
        return cls((-rho, 0, 1))

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> "IntPoly":
        out = cls.constant(1)
        for r in roots:
            out = out * cls((-r, 1))
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lead == 1

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, value: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = IntPoly.constant(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self) -> str:
        return format_poly(self)

    def __neg__(self) -> "IntPoly":
        return IntPoly(-c for c in self.coeffs)

    def __add__(self, other: "IntPoly | int") -> "IntPoly":
        if isinstance(other, int):
            other = IntPoly.constant(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPoly(out)

    __radd__ = __add__

    def __sub__(self, other: "IntPoly | int") -> "IntPoly":
        if isinstance(other, int):
            other = IntPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other: int) -> "IntPoly":
        return IntPoly.constant(other) - self

    def __mul__(self, other: "IntPoly | int") -> "IntPoly":
        if isinstance(other, int):
            return IntPoly(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPoly()
        if min(len(a), len(b)) <= _SCHOOLBOOK_CUTOFF:
            return IntPoly(_schoolbook_mul(a, b))
        return IntPoly(_kronecker_mul(a, b))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "IntPoly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = IntPoly.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def shift(self, k: int) -> "IntPoly":
        """Multiply by ``x**k``."""
        if not self.coeffs:
            return self
        return IntPoly((0,) * k + self.coeffs)

    def divmod(self, divisor: "IntPoly") -> tuple["IntPoly", "IntPoly"]:
        """Division by a divisor whose leading coefficient is +1 or -1."""
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if abs(divisor.lead) != 1:
            raise ValueError("divisor must have unit leading coefficient over Z")
        rem = list(self.coeffs)
        d = divisor.coeffs
        dd = len(d) - 1
        if len(rem) <= dd:
            return IntPoly(), self
        quot = [0] * (len(rem) - dd)
        lead = d[-1]
        for i in range(len(rem) - 1, dd - 1, -1):
            q = rem[i] * lead  # lead is +-1, so this is rem[i] / lead
            if q:
                quot[i - dd] = q
                for j in range(dd + 1):
                    rem[i - dd + j] -= q * d[j]
        return IntPoly(quot), IntPoly(rem[:dd])

    def exact_div(self, divisor: "IntPoly") -> "IntPoly":
        q, r = self.divmod(divisor)
        if not r.is_zero():
            raise NonExactDivision(r)
        return q

    def deflate(self, root: int) -> tuple["IntPoly", int]:
        """Synthetic division by ``x - root``; returns (quotient, remainder)."""
        c = self.coeffs
        if not c:
            return IntPoly(), 0
        out = [0] * (len(c) - 1)
        acc = c[-1]
        for i in range(len(c) - 2, -1, -1):
            out[i] = acc
            acc = acc * root + c[i]
        return IntPoly(out), acc

    def to_list(self) -> list[int]:
        return list(self.coeffs)


def poly_add(a: IntPoly, b: IntPoly) -> IntPoly:
    return a + b


def poly_mul(a: IntPoly, b: IntPoly) -> IntPoly:
    return a * b


def poly_exact_div(a: IntPoly, b: IntPoly) -> IntPoly:
    return a.exact_div(b)


def poly_product(polys: Iterable[IntPoly]) -> IntPoly:
    """Balanced product tree; far cheaper than a left fold for many factors."""
    items = list(polys)
    if not items:
        return IntPoly.constant(1)
    while len(items) > 1:
        nxt = [items[i] * items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def quadratic_power(rho: int, e: int) -> IntPoly:
    """``(x^2 - rho)**e`` by the binomial theorem; ``rho`` must be nonzero."""
    coeffs = [0] * (2 * e + 1)
    term = (-rho) ** e
    for j in range(e + 1):
        coeffs[2 * j] = term
        # move from C(e,j)(-rho)^(e-j) to C(e,j+1)(-rho)^(e-j-1)
        if j < e:
            term = term * (e - j) // ((j + 1) * -rho)
    return IntPoly(coeffs)


def format_poly(p: IntPoly, var: str = "x") -> str:
    """Render as ``c0 + c1*x + c2*x^2 + ...`` with exact decimal integers."""
    if p.is_zero():
        return "0"
    parts = []
    for i, c in enumerate(p.coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


def is_perfect_square(v: int) -> int | None:
    """Exact integer square root of ``v`` if it is a perfect square, else None."""
    if v < 0:
        raise ValueError("is_perfect_square needs a nonnegative integer")
    s = math.isqrt(v)
    return s if s * s == v else None


def integer_root_split(p: IntPoly) -> tuple[list[int], IntPoly]:
    """Split off every integer linear factor of ``p``.

    Returns ``(roots, remainder)`` where ``roots`` is sorted, repeated by
    multiplicity, and ``p == remainder * prod(x - r for r in roots)``.
    The remainder has no integer roots.  Candidates are the divisors of the
    trailing nonzero coefficient, limited by the Cauchy bound.
    """
    if p.is_zero():
        raise ValueError("integer_root_split of the zero polynomial")
    coeffs = p.coeffs
    k = next(i for i, c in enumerate(coeffs) if c)
    roots = [0] * k
    rest = IntPoly(coeffs[k:])
    if rest.degree <= 0:
        return roots, rest
    trailing = abs(rest.coeffs[0])
    lead = abs(rest.lead)
    cauchy = 1 + max(abs(c) for c in rest.coeffs[:-1]) // lead
    for d in divisors(trailing):
        if d > cauchy:
            break
        for cand in (d, -d):
            while rest.degree > 0:
                q, r = rest.deflate(cand)
                if r:
                    break
                roots.append(cand)
                rest = q
        if rest.degree <= 0:
            break
    roots.sort()
    return roots, rest


@dataclass(frozen=True)
class FactoredSpectrum:
    """``x**x_exp * prod (x^2 - rho)**e * prod residual**e``.

    Exponents may be negative while a product is being assembled; only
    the final object needs to be a polynomial.  Radicand 0 is folded into
    ``x_exp``.  Residuals are kept as (IntPoly, exponent) pairs.
    """

    x_exp: int = 0
    quad: Mapping[int, int] = field(default_factory=dict)
    residuals: tuple[tuple[IntPoly, int], ...] = ()

    def __post_init__(self):
        quad = {}
        x_exp = self.x_exp
        for rho, e in self.quad.items():
            if rho < 0:
                raise ValueError(f"negative radicand {rho}")
            if rho == 0:
                x_exp += 2 * e
            elif e:
                quad[rho] = quad.get(rho, 0) + e
        merged: dict[IntPoly, int] = {}
        for poly, e in self.residuals:
            merged[poly] = merged.get(poly, 0) + e
        object.__setattr__(self, "x_exp", x_exp)
        object.__setattr__(self, "quad", dict(sorted(quad.items())))
        object.__setattr__(
            self,
            "residuals",
            tuple((p, e) for p, e in merged.items() if e),
        )

    @classmethod
    def one(cls) -> "FactoredSpectrum":
        return cls()

    @classmethod
    def x_power(cls, e: int) -> "FactoredSpectrum":
        return cls(x_exp=e)

    @classmethod
    def quadratic(cls, rho: int, e: int = 1) -> "FactoredSpectrum":
        return cls(quad={rho: e})

    @classmethod
    def residual(cls, poly: IntPoly, e: int = 1) -> "FactoredSpectrum":
        return cls(residuals=((poly, e),))

    def __mul__(self, other: "FactoredSpectrum") -> "FactoredSpectrum":
        quad = dict(self.quad)
        for rho, e in other.quad.items():
            quad[rho] = quad.get(rho, 0) + e
        return FactoredSpectrum(
            self.x_exp + other.x_exp, quad, self.residuals + other.residuals
        )

    def __truediv__(self, other: "FactoredSpectrum") -> "FactoredSpectrum":
        return self * other ** -1

    def __pow__(self, e: int) -> "FactoredSpectrum":
        return FactoredSpectrum(
            self.x_exp * e,
            {rho: k * e for rho, k in self.quad.items()},
            tuple((p, k * e) for p, k in self.residuals),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactoredSpectrum):
            return NotImplemented
        return (
            self.x_exp == other.x_exp
            and dict(self.quad) == dict(other.quad)
            and dict(self.residuals) == dict(other.residuals)
        )

    def __hash__(self):
        return hash((self.x_exp, tuple(self.quad.items()), frozenset(self.residuals)))

    @property
    def degree(self) -> int:
        return (
            self.x_exp
            + 2 * sum(self.quad.values())
            + sum(p.degree * e for p, e in self.residuals)
        )

    def negative_factor(self) -> str | None:
        """Describe the first factor with a negative exponent, if any."""
        if self.x_exp < 0:
            return f"x^{self.x_exp}"
        for rho, e in self.quad.items():
            if e < 0:
                return f"(x^2 - {rho})^{e}"
        for p, e in self.residuals:
            if e < 0:
                return f"({p})^{e}"
        return None

    def is_expandable(self) -> bool:
        return self.negative_factor() is None

    def support(self) -> list[int]:
        """Radicands with positive exponent; 0 stands for the factor x."""
        out = [0] if self.x_exp > 0 else []
        return out + [rho for rho, e in self.quad.items() if e > 0]

    def power_sums(self) -> tuple[int, int]:
        """Sum of roots and sum of squared roots, counted with multiplicity."""
        p1 = 0
        p2 = 2 * sum(rho * e for rho, e in self.quad.items())
        for poly, e in self.residuals:
            if not poly.is_monic():
                raise ValueError("power sums need monic residuals")
            d = poly.degree
            s1 = -poly.coeff(d - 1)
            s2 = s1 * s1 - 2 * poly.coeff(d - 2)
            p1 += s1 * e
            p2 += s2 * e
        return p1, p2

    def expand(self) -> IntPoly:
        bad = self.negative_factor()
        if bad is not None:
            raise ValueError(f"cannot expand: factor {bad} has a negative exponent")
        factors = [quadratic_power(rho, e) for rho, e in self.quad.items()]
        factors += [p ** e for p, e in self.residuals]
        return poly_product(factors).shift(self.x_exp)

    def __str__(self) -> str:
        return format_factored(self)


def expand(f: FactoredSpectrum) -> IntPoly:
    return f.expand()


def format_factored(f: FactoredSpectrum) -> str:
    """Human-readable product form, e.g. ``x^17 (x^2 - 2)^9 (x^2 - 9)``."""

    def power(base: str, e: int) -> str:
        return base if e == 1 else f"{base}^{e}"

    parts = []
    if f.x_exp:
        parts.append(power("x", f.x_exp))
    parts += [power(f"(x^2 - {rho})", e) for rho, e in f.quad.items()]
    parts += [power(f"({p})", e) for p, e in f.residuals]
    return " ".join(parts) if parts else "1"
