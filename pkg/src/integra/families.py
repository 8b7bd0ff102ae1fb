"""Parameter families that yield integral trees of every odd diameter >= 5.

Diameter 4k+1 (n even) uses r0 = 1, r1 = 4k^2, rn = (k^2-1)^2, r = 4k^2-1.
Diameter 4k+3 (n odd) uses r0 = r1 = a^2, r = rn = 4(a-1)^2 where
12a^2 - 20a + 9 is a square; those a come from x^2 - 3y^2 = -2 through
x = |6a - 5|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import count, islice
from typing import Iterator

from .charpoly import SpectrumReport, charpoly_t_factored, spectrum_report
from .poly import is_perfect_square
from .trees import (
    OddTreeParams,
    VertexBudgetExceeded,
    build_t,
    default_max_vertices,
    diameter,
    vertex_count_t,
)

FAMILY_4K1 = "4k+1"
FAMILY_4K3 = "4k+3"


class InfeasibleParameters(ValueError):
    """The requested family member does not exist; ``minimal`` names one that does."""

    def __init__(self, message: str, minimal: int | None = None):
        self.minimal = minimal
        super().__init__(message)


class CertificationError(Exception):
    pass


@dataclass(frozen=True)
class PellSolution:
    x: int
    y: int

    def __post_init__(self):
        if self.x * self.x - 3 * self.y * self.y != -2:
            raise ValueError(f"({self.x}, {self.y}) does not solve x^2 - 3y^2 = -2")

    def next(self) -> "PellSolution":
        return PellSolution(2 * self.x + 3 * self.y, self.x + 2 * self.y)

    def a_value(self) -> int | None:
        """The a with |6a - 5| = x, when it is an integer with |a| >= 3."""
        for num in (self.x + 5, 5 - self.x):
            if num % 6 == 0 and abs(num // 6) >= 3:
                return num // 6
        return None


@dataclass(frozen=True)
class FamilyInstance:
    diameter: int
    params: OddTreeParams
    family: str
    parameter: int

    @property
    def vertex_count(self) -> int:
        return vertex_count_t(self.params)


def iter_pell() -> Iterator[PellSolution]:
    sol = PellSolution(1, 1)
    while True:
        yield sol
        sol = sol.next()


def pell_solutions(count: int) -> list[PellSolution]:
    """First ``count`` positive solutions of x^2 - 3y^2 = -2 by increasing x."""
    if count < 1:
        raise ValueError("count must be at least 1")
    return list(islice(iter_pell(), count))


def is_valid_a(a: int) -> bool:
    return abs(a) >= 3 and is_perfect_square(12 * a * a - 20 * a + 9) is not None


def iter_valid_a() -> Iterator[int]:
    for sol in iter_pell():
        a = sol.a_value()
        if a is not None:
            yield a


def valid_a_values(count: int) -> list[int]:
    """First ``count`` admissible a, ordered by |6a - 5|: 4, -11, 45, -164, ..."""
    if count < 1:
        raise ValueError("count must be at least 1")
    return list(islice(iter_valid_a(), count))


def squares_between(lo: int, hi: int) -> int:
    """How many perfect squares lie strictly inside (lo, hi)."""
    if hi <= lo + 1:
        return 0
    first = math.isqrt(lo) + 1 if lo >= 0 else 0
    return max(0, math.isqrt(hi - 1) - first + 1)


def pick_squares(lo: int, hi: int, count: int) -> list[int]:
    """The ``count`` smallest distinct squares strictly between lo and hi."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    available = squares_between(lo, hi)
    if available < count:
        raise InfeasibleParameters(
            f"need {count} squares strictly inside ({lo}, {hi}), only {available} available"
        )
    first = math.isqrt(lo) + 1 if lo >= 0 else 0
    return [(first + i) ** 2 for i in range(count)]


def _min_k(n: int) -> int:
    for k in count(3):
        if squares_between(4 * k * k, (k * k - 1) ** 2) >= n - 2:
            return k
    raise AssertionError("unreachable")


def family_4k1(k: int, n: int) -> FamilyInstance:
    """Integral tree of diameter 2n + 1 (n even) from the index k."""
    if n < 2 or n % 2:
        raise InfeasibleParameters(f"n must be even and >= 2, got {n}")
    kmin = _min_k(n)
    if k < kmin:
        raise InfeasibleParameters(f"n = {n} requires k >= {kmin}, got k = {k}", kmin)
    r1, rn = 4 * k * k, (k * k - 1) ** 2
    middle = pick_squares(r1, rn, n - 2)
    params = OddTreeParams(4 * k * k - 1, 1, (r1, *middle, rn))
    return FamilyInstance(2 * n + 1, params, FAMILY_4K1, k)


def _a_feasible(a: int, n: int) -> bool:
    return squares_between(a * a, 4 * (a - 1) ** 2) >= n - 2


def family_4k3(a: int, n: int) -> FamilyInstance:
    """Integral tree of diameter 2n + 1 (n odd) from an admissible a."""
    if n < 3 or n % 2 == 0:
        raise InfeasibleParameters(f"n must be odd and >= 3, got {n}")
    if not is_valid_a(a):
        raise InfeasibleParameters(
            f"a = {a} is not admissible: need |a| >= 3 and 12a^2 - 20a + 9 a perfect square"
        )
    if not _a_feasible(a, n):
        amin = next(b for b in iter_valid_a() if _a_feasible(b, n))
        raise InfeasibleParameters(
            f"a = {a} leaves too few squares in ({a * a}, {4 * (a - 1) ** 2}) for n = {n};"
            f" smallest feasible is a = {amin} (|a| >= {abs(amin)})",
            amin,
        )
    sq, top = a * a, 4 * (a - 1) ** 2
    middle = pick_squares(sq, top, n - 2)
    params = OddTreeParams(top, sq, (sq, *middle, top))
    return FamilyInstance(2 * n + 1, params, FAMILY_4K3, a)


def instance_for_diameter(d: int, index: int) -> FamilyInstance:
    """The ``index``-th instance (0-based) of diameter ``d`` in a fixed total order.

    d = 1 mod 4 takes the smallest feasible k plus ``index``; d = 3 mod 4 takes
    the (index + 1)-th admissible a that leaves room for the middle squares.
    """
    if index < 0:
        raise InfeasibleParameters("index must be nonnegative")
    if d < 5 or d % 2 == 0:
        raise InfeasibleParameters(f"diameter must be odd and >= 5, got {d}", 5)
    n = (d - 1) // 2
    if n % 2 == 0:
        return family_4k1(_min_k(n) + index, n)
    feasible = (a for a in iter_valid_a() if _a_feasible(a, n))
    return family_4k3(next(islice(feasible, index, None)), n)


@dataclass
class Certificate:
    instance: FamilyInstance
    spectrum: SpectrumReport
    diameter_checked: bool

    def to_json(self) -> dict:
        p = self.instance.params
        return {
            "diameter": self.instance.diameter,
            "family": self.instance.family,
            "parameter": self.instance.parameter,
            "params": {"r": p.r, "r0": p.r0, "radii": list(p.radii)},
            "vertices": self.instance.vertex_count,
            "diameter_checked": self.diameter_checked,
            "spectrum": self.spectrum.to_json(),
        }


def certify(inst: FamilyInstance, max_vertices: int | None = None) -> Certificate:
    """Exact integrality certificate for a family instance.

    The spectrum is resolved from the factored characteristic polynomial; the
    diameter is measured on the explicit tree when it fits ``max_vertices``.
    """
    p = inst.params
    n_vertices = vertex_count_t(p)
    if inst.diameter != p.diameter:
        raise CertificationError(
            f"declared diameter {inst.diameter} but n = {p.n} gives {p.diameter}"
        )
    report = spectrum_report(charpoly_t_factored(p), n_vertices)
    if not report.integral:
        bad = report.non_square_radicands
        detail = f"non-square radicand {', '.join(map(str, bad))}" if bad else "non-integral residual"
        raise CertificationError(f"{p} is not integral: {detail}")
    if not report.is_symmetric():
        raise CertificationError(f"{p}: spectrum is not symmetric about 0")
    if report.second_moment() != 2 * (n_vertices - 1):
        raise CertificationError(f"{p}: sum of squared eigenvalues is not 2|E|")
    cap = default_max_vertices() if max_vertices is None else max_vertices
    checked = False
    try:
        tree = build_t(p, cap)
    except VertexBudgetExceeded:
        tree = None
    if tree is not None:
        measured = diameter(tree)
        if measured != inst.diameter:
            raise CertificationError(
                f"{p}: BFS diameter {measured}, expected {inst.diameter}"
            )
        checked = True
    return Certificate(inst, report, checked)
