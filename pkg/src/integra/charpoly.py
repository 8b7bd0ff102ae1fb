"""Characteristic polynomials of the tree families, closed-form and brute force.

The closed forms are exponent bookkeeping over ``FactoredSpectrum`` and never
materialize a tree.  ``oracle_charpoly`` works on an explicit tree with the
pendant-deletion recurrence and shares no formula with the closed forms.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

from .poly import FactoredSpectrum, IntPoly, integer_root_split, is_perfect_square
from .trees import CsikvariParams, OddTreeParams, RootedTree

DEFAULT_ORACLE_MAX_VERTICES = 5_000

X = IntPoly.x()
ONE = FactoredSpectrum.one()


def default_oracle_max_vertices() -> int:
    return int(os.environ.get("INTEGRA_ORACLE_MAX", DEFAULT_ORACLE_MAX_VERTICES))


class OracleBudgetExceeded(ValueError):
    def __init__(self, required: int, cap: int):
        self.required = required
        self.cap = cap
        super().__init__(
            f"oracle refuses a tree on {required} vertices (cap {cap}); use the closed form"
        )


class SpectrumMismatch(ArithmeticError):
    """Degree bookkeeping of a factored polynomial disagrees with the tree."""


# --------------------------------------------------------------------------
# joining rooted trees
# --------------------------------------------------------------------------

def charpoly_join(
    p1: IntPoly, p1_root_deleted: IntPoly, p2: IntPoly, p2_root_deleted: IntPoly, n: int
) -> tuple[IntPoly, IntPoly]:
    """Characteristic polynomials of T1 ~ n T2 and of its root-deleted forest."""
    if n < 1:
        raise ValueError("join needs n >= 1")
    p2_pow = p2 ** (n - 1)
    whole = p2_pow * (p1 * p2 - p1_root_deleted * p2_root_deleted * n)
    forest = p1_root_deleted * p2_pow * p2
    return whole, forest


# --------------------------------------------------------------------------
# C(r1, ..., rn)
# --------------------------------------------------------------------------

def _c_chain(p: CsikvariParams) -> list[FactoredSpectrum]:
    """[P_0, P_1, ..., P_n] where P_k = phi(C(r1..rk)).

    P_k = P_{k-1}^(d_k - 1) * P_{k-2}^(d_{k-1}) * ... * P_1^(d_2) * x^(d_1) * (x^2 - r_k)
    for k >= 2, and P_1 = x^(d_1 - 1) (x^2 - r_1).
    """
    d = (0,) + p.gaps  # 1-based
    chain = [FactoredSpectrum.x_power(1)]
    # running product P_{k-2}^{d_{k-1}} * ... * P_1^{d_2}
    tail = ONE
    for k in range(1, p.n + 1):
        rk = FactoredSpectrum.quadratic(p.radii[k - 1])
        if k == 1:
            chain.append(FactoredSpectrum.x_power(d[1] - 1) * rk)
            continue
        if k >= 3:
            tail = tail * chain[k - 2] ** d[k - 1]
        chain.append(chain[k - 1] ** (d[k] - 1) * tail * FactoredSpectrum.x_power(d[1]) * rk)
    return chain


def charpoly_c_factored(p: CsikvariParams) -> FactoredSpectrum:
    """phi(C(r1, ..., rn)) as x^a * prod (x^2 - r_i)^{e_i}."""
    return _c_chain(p)[-1]


def _root_deleted_chain(p: CsikvariParams, chain: list[FactoredSpectrum]) -> list[FactoredSpectrum]:
    # Q_k = P_{k-1}^{d_k} Q_{k-2}, with Q_0 = Q_{-1} = 1
    q = [ONE, ONE]  # Q_{-1}, Q_0
    for k, dk in enumerate(p.gaps, start=1):
        q.append(chain[k - 1] ** dk * q[-2])
    return q[1:]


def charpoly_c_root_deleted(p: CsikvariParams) -> FactoredSpectrum:
    """phi of the forest C'(r1, ..., rn) obtained by deleting the root."""
    return _root_deleted_chain(p, _c_chain(p))[-1]


def _r(p: CsikvariParams, i: int) -> int:
    return 0 if i == 0 else p.radii[i - 1]


def f_of_c(p: CsikvariParams) -> FactoredSpectrum:
    """The cofactor f(C) with phi(C) = x f(C) prod_i (x^2 - r_{n-2i+2}).

    May carry a negative power of x (f(C(1)) = 1/x); callers multiply it
    into a larger product that ends up polynomial.
    """
    if p.n < 1:
        raise ValueError("f(C) needs n >= 1")
    chain = _c_chain(p)
    d = (0,) + p.gaps
    n = p.n
    out = ONE
    for i in range(1, (n + 1) // 2 + 1):
        j = n - 2 * i + 1
        out = out * chain[j] ** d[j + 1] / FactoredSpectrum.quadratic(_r(p, j))
    return out


def top_quadratics(p: CsikvariParams) -> FactoredSpectrum:
    """prod_{i=1}^{ceil(n/2)} (x^2 - r_{n-2i+2}): the factors phi(C) has beyond x f(C)."""
    out = ONE
    for i in range(1, (p.n + 1) // 2 + 1):
        out = out * FactoredSpectrum.quadratic(_r(p, p.n - 2 * i + 2))
    return out


def bottom_quadratics(p: CsikvariParams) -> FactoredSpectrum:
    """prod_{i=1}^{ceil(n/2)} (x^2 - r_{n-2i+1}), with r_0 = 0 giving x^2."""
    out = ONE
    for i in range(1, (p.n + 1) // 2 + 1):
        out = out * FactoredSpectrum.quadratic(_r(p, p.n - 2 * i + 1))
    return out


def distinct_eigenvalues(p: CsikvariParams) -> frozenset[int]:
    """Distinct eigenvalues of C(r1..rn) as radicands: rho stands for +-sqrt(rho), 0 for 0.

    Read off the support of the factored polynomial, so radii whose exponent
    cancels (possible when the last gap is 1) are correctly absent.
    """
    return frozenset(charpoly_c_factored(p).support())


# --------------------------------------------------------------------------
# T(r, r0, r1, ..., rn)
# --------------------------------------------------------------------------

def psi_odd(r: int, r0: int, r1: int, rn: int) -> IntPoly:
    """x^2 (x^2 - r1)(x^2 - rn) - r (x^2 - r0)(x^2 - r1) - x^2 (x^2 - r0)."""
    x2 = X * X
    q = IntPoly.quadratic
    return x2 * q(r1) * q(rn) - q(r0) * q(r1) * r - x2 * q(r0)


def psi_even(r: int, r0: int, r1: int, rn: int) -> IntPoly:
    """(x^2 - r0)(x^2 - rn) - r x^2 - (x^2 - r1)."""
    q = IntPoly.quadratic
    return q(r0) * q(rn) - (X * X) * r - q(r1)


def charpoly_t_factored(p: OddTreeParams) -> FactoredSpectrum:
    """phi(T(r, r0, r1, ..., rn)) in factored form with psi kept as a residual."""
    n, rad = p.n, (None,) + p.radii  # 1-based radii
    f_all = f_of_c(p.u) * f_of_c(p.v) * f_of_c(p.w)
    w_pow = charpoly_c_factored(p.w) ** (p.r - 1)
    quad = FactoredSpectrum.quadratic
    m = n // 2
    out = f_all * w_pow * quad(rad[n])
    if n % 2:
        # every even radius r2, r4, ..., r_{2m} divides out, r2 included
        for i in range(1, m + 1):
            out = out * quad(rad[2 * i])
        for i in range(2, m + 1):
            out = out * quad(rad[2 * i - 1]) ** 2
        psi = psi_odd(p.r, p.r0, rad[1], rad[n])
        out = out * FactoredSpectrum.x_power(1)
    else:
        for i in range(2, m + 1):
            out = out * quad(rad[2 * i - 1])
        for i in range(1, m):
            out = out * quad(rad[2 * i]) ** 2
        psi = psi_even(p.r, p.r0, rad[1], rad[n])
        out = out * FactoredSpectrum.x_power(3)
    return out * FactoredSpectrum.residual(psi)


# --------------------------------------------------------------------------
# brute-force oracle
# --------------------------------------------------------------------------

def _oracle_pairs(t: RootedTree):
    """Yield (vertex, phi(T_v), phi(T_v - v)) bottom-up for every vertex v.

    Each subtree is grown from its root by hanging one child subtree at a
    time.  Hanging a single vertex is the pendant-vertex deletion
    phi(T) = x phi(T - v) - phi(T - v - u); hanging a larger subtree uses the
    same identity across the connecting bridge.
    """
    whole: dict[int, IntPoly] = {}
    cut: dict[int, IntPoly] = {}
    one = IntPoly.constant(1)
    for v in range(t.vertex_count - 1, -1, -1):
        a, b = X, one
        for c in t.children(v):
            ac, bc = whole.pop(c), cut.pop(c)
            a, b = a * ac - b * bc, b * ac
        whole[v], cut[v] = a, b
        yield v, a, b


def _check_oracle_budget(t: RootedTree, max_vertices: int | None) -> None:
    cap = default_oracle_max_vertices() if max_vertices is None else max_vertices
    if t.vertex_count > cap:
        raise OracleBudgetExceeded(t.vertex_count, cap)


def oracle_charpoly(t: RootedTree, max_vertices: int | None = None) -> IntPoly:
    """Exact det(xI - A) of an explicit tree."""
    _check_oracle_budget(t, max_vertices)
    for v, a, _ in _oracle_pairs(t):
        if v == 0:
            return a
    raise AssertionError("unreachable")


def oracle_charpoly_root_deleted(t: RootedTree, max_vertices: int | None = None) -> IntPoly:
    """Exact characteristic polynomial of the forest left after deleting the root."""
    _check_oracle_budget(t, max_vertices)
    for v, _, b in _oracle_pairs(t):
        if v == 0:
            return b
    raise AssertionError("unreachable")


# --------------------------------------------------------------------------
# spectrum reports
# --------------------------------------------------------------------------

@dataclass
class SpectrumReport:
    """Integer eigenvalues with multiplicity, plus whatever did not split over Z."""

    eigenvalues: dict[int, int] = field(default_factory=dict)
    residuals: list[tuple[IntPoly, int]] = field(default_factory=list)
    degree: int = 0

    @property
    def integral(self) -> bool:
        return not self.residuals

    @property
    def total_multiplicity(self) -> int:
        return sum(self.eigenvalues.values()) + sum(p.degree * e for p, e in self.residuals)

    @property
    def distinct(self) -> list[int]:
        return sorted(self.eigenvalues)

    @property
    def non_square_radicands(self) -> list[int]:
        """Radicands rho of leftover (x^2 - rho) residuals."""
        return sorted(
            -p.coeffs[0]
            for p, _ in self.residuals
            if p.degree == 2 and p.coeffs[1] == 0 and p.lead == 1
        )

    def is_symmetric(self) -> bool:
        return all(self.eigenvalues.get(-lam) == m for lam, m in self.eigenvalues.items())

    def second_moment(self) -> int:
        """Sum of squared eigenvalues with multiplicity; equals trace(A^2) = 2|E|."""
        total = sum(lam * lam * m for lam, m in self.eigenvalues.items())
        for p, e in self.residuals:
            d = p.degree
            s1 = -p.coeff(d - 1)
            total += e * (s1 * s1 - 2 * p.coeff(d - 2))
        return total

    def to_json(self) -> dict:
        return {
            "integral": self.integral,
            "eigenvalues": [[lam, self.eigenvalues[lam]] for lam in self.distinct],
            "residuals": [p.to_list() for p, _ in self.residuals],
            "residual_multiplicities": [e for _, e in self.residuals],
            "degree": self.degree,
        }


def spectrum_report(f: FactoredSpectrum, expected_degree: int | None = None) -> SpectrumReport:
    """Resolve a factored characteristic polynomial into integer eigenvalues.

    Square radicands become +-sqrt(rho) pairs, residual polynomials are split
    by exact integer root extraction, and coinciding eigenvalues merge.
    """
    bad = f.negative_factor()
    if bad is not None:
        raise ValueError(f"not a polynomial: factor {bad} has a negative exponent")
    if expected_degree is not None and f.degree != expected_degree:
        raise SpectrumMismatch(
            f"factored degree {f.degree} differs from expected {expected_degree}"
        )
    eig: dict[int, int] = {}
    residuals: dict[IntPoly, int] = {}

    def add(lam: int, m: int) -> None:
        eig[lam] = eig.get(lam, 0) + m

    if f.x_exp:
        add(0, f.x_exp)
    for rho, e in f.quad.items():
        s = is_perfect_square(rho)
        if s is None:
            q = IntPoly.quadratic(rho)
            residuals[q] = residuals.get(q, 0) + e
        else:
            add(s, e)
            add(-s, e)
    for poly, e in f.residuals:
        roots, rest = integer_root_split(poly)
        for lam in roots:
            add(lam, e)
        if rest.degree > 0:
            residuals[rest] = residuals.get(rest, 0) + e
        elif rest != IntPoly.constant(1):
            raise ValueError(f"residual {poly} is not monic")
    report = SpectrumReport(
        eigenvalues=dict(sorted(eig.items())),
        residuals=sorted(
            residuals.items(), key=lambda kv: (kv[0].degree, [-c for c in kv[0].coeffs])
        ),
        degree=f.degree,
    )
    if report.total_multiplicity != report.degree:
        raise SpectrumMismatch("multiplicities do not add up to the degree")
    return report


def spectrum_report_from_poly(p: IntPoly) -> SpectrumReport:
    """Spectrum report of an already expanded characteristic polynomial."""
    return spectrum_report(FactoredSpectrum.residual(p), p.degree)
