import itertools

import pytest
import sympy
from hypothesis import given, strategies as st

from integra.charpoly import (
    OracleBudgetExceeded,
    SpectrumMismatch,
    bottom_quadratics,
    charpoly_c_factored,
    charpoly_c_root_deleted,
    charpoly_join,
    charpoly_t_factored,
    distinct_eigenvalues,
    f_of_c,
    oracle_charpoly,
    oracle_charpoly_root_deleted,
    psi_even,
    psi_odd,
    spectrum_report,
    top_quadratics,
)
from integra.poly import FactoredSpectrum, IntPoly
from integra.trees import (
    CsikvariParams,
    OddTreeParams,
    RootedTree,
    attach,
    build_c,
    build_t,
    delete_root,
    vertex_count_c,
)
from spectral_checks import check_factored

X = IntPoly.x()
ONE = IntPoly.constant(1)


def C(*radii):
    return CsikvariParams(radii)


def q(rho):
    return IntPoly.quadratic(rho)


def sympy_charpoly(t: RootedTree) -> IntPoly:
    n = t.vertex_count
    a = sympy.zeros(n, n)
    for u, v in t.edges().tolist():
        a[u, v] = a[v, u] = 1
    lam = sympy.Symbol("lam")
    coeffs = a.charpoly(lam).all_coeffs()
    return IntPoly(int(c) for c in reversed(coeffs))


def path(n: int) -> RootedTree:
    return RootedTree.from_edges(n, [(i, i + 1) for i in range(n - 1)])


# -- the oracle itself --------------------------------------------------------

def test_oracle_paths():
    assert oracle_charpoly(path(3)) == IntPoly([0, -2, 0, 1])
    assert oracle_charpoly(path(5)) == IntPoly([0, 3, 0, -4, 0, 1])


@st.composite
def random_trees(draw):
    n = draw(st.integers(1, 12))
    parents = [draw(st.integers(0, v - 1)) for v in range(1, n)]
    return RootedTree.from_edges(n, [(p, v) for v, p in enumerate(parents, start=1)])


@given(random_trees())
def test_oracle_matches_determinant(t):
    assert oracle_charpoly(t) == sympy_charpoly(t)


@given(random_trees())
def test_oracle_root_deleted_is_product_over_components(t):
    expected = ONE
    for sub in delete_root(t):
        expected = expected * oracle_charpoly(sub)
    assert oracle_charpoly_root_deleted(t) == expected


def test_oracle_budget():
    with pytest.raises(OracleBudgetExceeded):
        oracle_charpoly(build_c(C(2, 5, 9)), max_vertices=42)


# -- join -------------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 5])
def test_join_star(m):
    whole, forest = charpoly_join(X, ONE, X, ONE, m)
    assert whole == X ** (m - 1) * q(m)
    assert forest == X ** m


def test_join_five_path():
    whole, _ = charpoly_join(X, ONE, q(1), X, 2)
    assert whole == X * q(1) * q(3) == oracle_charpoly(path(5))


def test_join_four_path():
    k2 = q(1)
    whole, _ = charpoly_join(k2, X, k2, X, 1)
    assert whole == IntPoly([1, 0, -3, 0, 1]) == oracle_charpoly(path(4))


@given(random_trees(), st.integers(1, 3), random_trees())
def test_join_matches_oracle(t1, n, t2):
    whole, forest = charpoly_join(
        oracle_charpoly(t1), oracle_charpoly_root_deleted(t1),
        oracle_charpoly(t2), oracle_charpoly_root_deleted(t2), n,
    )
    t = attach(t1, n, t2)
    assert whole == oracle_charpoly(t)
    assert forest == oracle_charpoly_root_deleted(t)


# -- C family -----------------------------------------------------------------

def test_c_factored_examples():
    assert charpoly_c_factored(C(1)) == FactoredSpectrum(0, {1: 1})
    assert charpoly_c_factored(C(1, 2)) == FactoredSpectrum(1, {2: 1})
    assert charpoly_c_factored(C(2, 5)) == FactoredSpectrum(4, {2: 2, 5: 1})
    assert charpoly_c_factored(C(2, 5, 9)) == FactoredSpectrum(17, {2: 9, 5: 3, 9: 1})


def test_c_root_deleted_examples():
    assert charpoly_c_root_deleted(C(1)) == FactoredSpectrum(1)
    assert charpoly_c_root_deleted(C(1, 3)) == FactoredSpectrum(0, {1: 2})
    assert charpoly_c_root_deleted(C(2, 5)) == FactoredSpectrum(3, {2: 3})


def test_c_examples_against_oracle():
    assert charpoly_c_factored(C(2, 5)).expand() == oracle_charpoly(build_c(C(2, 5)))
    assert charpoly_c_factored(C(1, 2)).expand() == oracle_charpoly(path(3))


def _lemma_ratio_chain(p):
    """phi(C(r1..rn)) from the two-step ratio recursion, checked separately."""
    chain = [FactoredSpectrum(1), FactoredSpectrum(0, {p.radii[0]: 1}) * FactoredSpectrum(p.radii[0] - 1)]
    for k in range(2, p.n + 1):
        dk = p.radii[k - 1] - p.radii[k - 2]
        chain.append(
            chain[k - 1] ** dk * chain[k - 2]
            * FactoredSpectrum.quadratic(p.radii[k - 1]) / FactoredSpectrum.quadratic(p.radii[k - 2])
        )
    return chain[p.n] if p.n else chain[0]


radii = st.lists(st.integers(1, 40), min_size=1, max_size=5, unique=True).map(lambda xs: CsikvariParams(tuple(sorted(xs))))


@given(radii)
def test_product_formula_agrees_with_ratio_recursion(p):
    assert charpoly_c_factored(p) == _lemma_ratio_chain(p)


@given(radii)
def test_c_factored_is_polynomial_of_right_degree(p):
    f = charpoly_c_factored(p)
    assert f.is_expandable() and not f.residuals
    assert f.degree == vertex_count_c(p)
    g = charpoly_c_root_deleted(p)
    assert g.is_expandable() and g.degree == vertex_count_c(p) - 1


def test_f_examples():
    assert f_of_c(C(2, 3)) == FactoredSpectrum(1)
    assert f_of_c(C(1)) == FactoredSpectrum(-1)
    assert f_of_c(C(1, 2, 3)) == FactoredSpectrum(0)


@given(radii)
def test_f_reassembles_both_polynomials(p):
    f = f_of_c(p)
    assert FactoredSpectrum(1) * f * top_quadratics(p) == charpoly_c_factored(p)
    assert f * bottom_quadratics(p) == charpoly_c_root_deleted(p)


def _positive_zeros(f):
    return sorted(r for r, e in f.quad.items() if e > 0)


@given(radii)
def test_f_positive_zeros_when_all_gaps_exceed_one(p):
    if all(d > 1 for d in p.gaps[1:]):
        assert _positive_zeros(f_of_c(p)) == list(p.radii[:-1])


def test_f_zero_vanishes_with_an_inner_unit_gap():
    # last gap is 2, but the unit gap r2 - r1 cancels sqrt(r1) from f
    assert _positive_zeros(f_of_c(C(1, 2, 4))) == [2]
    assert charpoly_c_factored(C(1, 2, 4)).expand() == oracle_charpoly(build_c(C(1, 2, 4)))


def test_distinct_eigenvalues():
    assert distinct_eigenvalues(C(2, 5, 9)) == {0, 2, 5, 9}
    assert distinct_eigenvalues(C(4)) == {0, 4}
    # last gap 1: the radicand 1 cancels
    assert distinct_eigenvalues(C(1, 2)) == {0, 2}


def test_distinct_eigenvalues_follow_theorem_when_last_gap_exceeds_one():
    for n in range(1, 5):
        for combo in itertools.combinations(range(1, 13), n):
            p = CsikvariParams(combo)
            if p.gaps[-1] > 1:
                assert distinct_eigenvalues(p) == {0, *p.radii}, p


# -- psi and T family ------------------------------------------------------------

def test_psi_examples():
    assert psi_even(35, 1, 36, 64) == IntPoly([100, 0, -101, 0, 1]) == q(1) * q(100)
    assert psi_odd(36, 16, 16, 36) == q(16) * IntPoly([576, 0, -73, 0, 1]) == q(16) * q(9) * q(64)
    assert psi_even(1, 1, 2, 3) == IntPoly([5, 0, -6, 0, 1]) == q(1) * q(5)
    assert psi_odd(1, 1, 1, 3) == q(1) * IntPoly([1, 0, -5, 0, 1])


def _t_by_joins(p: OddTreeParams) -> IntPoly:
    """phi(U ~ (V ~ r W)) from oracle pieces and two joins, no closed form."""
    pieces = {}
    for name, cp in (("u", p.u), ("v", p.v), ("w", p.w)):
        t = build_c(cp)
        pieces[name] = (oracle_charpoly(t), oracle_charpoly_root_deleted(t))
    vw = charpoly_join(*pieces["v"], *pieces["w"], p.r)
    return charpoly_join(*pieces["u"], *vw, 1)[0]


def test_t_examples():
    f = charpoly_t_factored(OddTreeParams(1, 1, (2, 3)))
    assert f.expand() == X ** 4 * q(1) * q(3) * q(5)
    f = charpoly_t_factored(OddTreeParams(1, 1, (1, 2, 3)))
    assert f.expand() == X ** 2 * q(1) * q(2) * q(3) * IntPoly([1, 0, -5, 0, 1])


def test_t_erratum_regression():
    # even radii must all divide out in the odd case, including r2
    p = OddTreeParams(1, 1, (1, 2, 3))
    f = charpoly_t_factored(p)
    assert f.quad.get(2, 0) == 1
    assert f.expand() == oracle_charpoly(build_t(p)) == _t_by_joins(p)


def _t_grid(max_param=5, max_r=3, ns=(2, 3, 4)):
    for n in ns:
        for upper in itertools.combinations(range(2, max_param + 1), n - 1):
            for r0, r1 in itertools.product(range(1, upper[0]), repeat=2):
                for r in range(1, max_r + 1):
                    yield OddTreeParams(r, r0, (r1, *upper))


@pytest.mark.parametrize("p", list(_t_grid()), ids=str)
def test_t_closed_form_against_joins(p):
    f = charpoly_t_factored(p)
    assert f.expand() == _t_by_joins(p)
    t = build_t(p)
    check_factored(f, t.vertex_count, t.vertex_count - 1)


def test_t_degree_large():
    p = OddTreeParams(35, 1, (36, 64))
    assert charpoly_t_factored(p).degree == 3314


# -- spectrum reports -----------------------------------------------------------

def test_report_simple():
    r = spectrum_report(FactoredSpectrum(4, {9: 1}), 6)
    assert r.integral and r.eigenvalues == {-3: 1, 0: 4, 3: 1}


def test_report_not_integral():
    r = spectrum_report(charpoly_t_factored(OddTreeParams(1, 1, (1, 2, 3))), 12)
    assert not r.integral
    assert r.non_square_radicands == [2, 3]
    assert (IntPoly([1, 0, -5, 0, 1]), 1) in r.residuals
    assert r.eigenvalues == {-1: 1, 0: 2, 1: 1}


def test_report_merges_coinciding_eigenvalues():
    f = FactoredSpectrum(0, {16: 2}) * FactoredSpectrum.residual(q(16) * q(9))
    r = spectrum_report(f)
    assert r.eigenvalues == {-4: 3, -3: 1, 3: 1, 4: 3}


def test_report_degree_mismatch():
    with pytest.raises(SpectrumMismatch):
        spectrum_report(FactoredSpectrum(4, {9: 1}), 7)


def test_report_rejects_non_polynomial():
    with pytest.raises(ValueError):
        spectrum_report(FactoredSpectrum(-1, {4: 1}))


def test_report_json():
    r = spectrum_report(FactoredSpectrum(1, {2: 1, 4: 1}))
    assert r.to_json() == {
        "integral": False,
        "eigenvalues": [[-2, 1], [0, 1], [2, 1]],
        "residuals": [[-2, 0, 1]],
        "residual_multiplicities": [1],
        "degree": 5,
    }
