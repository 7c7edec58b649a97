from fractions import Fraction

import pytest
import sympy

from hopftr.graphs import WorkLimitExceeded, eo_classes, eo_family, mirror_images, parse_graph
from hopftr.graphs import TaggedGraph
from hopftr.laurent import RatExpr, ZERO, substitute_negate
from hopftr.spectral import (
    CurveModel,
    NonEOGraph,
    bergmann,
    coeff_table,
    delta_prime_terms,
    gbinom,
    phi_eval,
    recursion_kernel,
    s_sequence,
    verify_coproduct_identity,
    vertex_omega,
    w_direct,
    w_graph_sum,
)
from oracles import airy_correlator, to_sympy

AIRY = CurveModel.airy()
QUARTIC = CurveModel.parse("y: 1, 1")  # y = z + z^3
F = Fraction
z, p = RatExpr.var("z"), RatExpr.var("p")


def laurent(expr):
    return {tuple(m): F(c) for m, c in expr.laurent_terms().items()}


# ---------------------------------------------------------------- curve and kernels


def test_curve_parse():
    assert CurveModel.parse("airy") == AIRY
    assert str(QUARTIC) == "y: 1,1"
    assert CurveModel.parse("y: 1/2, 0, 3").y_odd == (F(1, 2), F(0), F(3))
    with pytest.raises(ValueError):
        CurveModel.parse("y: 0, 1")
    with pytest.raises(ValueError):
        CurveModel.parse("x: 1")


def test_bergmann():
    assert bergmann("p1", "p2") == RatExpr.const(1) / ((RatExpr.var("p1") - RatExpr.var("p2")) ** 2)
    assert bergmann("p1", "p2") == bergmann("p2", "p1")
    assert bergmann(("q", 1), ("q", -1)) == RatExpr.const(1) / (4 * RatExpr.var("q") ** 2)
    with pytest.raises(ValueError):
        bergmann("a", "a")


def test_bergmann_has_no_residue_on_the_diagonal():
    p1, p2, t = sympy.symbols("p1 p2 t")
    b = to_sympy(bergmann("p1", "p2")).subs(p1, p2 + t)
    assert sympy.residue(b, t, 0) == 0
    assert sympy.series(b * t ** 2, t, 0, 1).removeO() == 1


def test_vertex_omega():
    assert vertex_omega(AIRY) == 4 * z ** 2
    assert vertex_omega(QUARTIC) == 4 * z ** 2 + 4 * z ** 4
    w = vertex_omega(QUARTIC)
    assert substitute_negate(w, "z") == w and w.valuation("z") == 2


def test_recursion_kernel_closed_form():
    k = recursion_kernel(AIRY, "p")
    assert k == RatExpr.const(1) / (4 * z * (z * z - p * p))
    assert substitute_negate(k, "z") == -k
    assert k.valuation("z") == -1


def test_recursion_kernel_against_integral():
    zs, ps, xi = sympy.symbols("z p xi")
    for c in (AIRY, QUARTIC):
        y = sum(sympy.Rational(str(a)) * zs ** (2 * j + 1) for j, a in enumerate(c.y_odd))
        omega = (y - y.subs(zs, -zs)) * 2 * zs
        ref = sympy.Rational(1, 2) * sympy.integrate(1 / (xi - ps) ** 2, (xi, zs, -zs)) / omega
        got = to_sympy(recursion_kernel(c, "p"))
        # path from z to its conjugate -z
        assert sympy.simplify(got - ref) == 0


# ---------------------------------------------------------------- direct recursion


def test_base_cases():
    assert w_direct(AIRY, -1, 3).value == ZERO
    assert w_direct(AIRY, 0, 1).value == ZERO
    assert w_direct(AIRY, 0, 2).value == bergmann("z0", "z1")
    with pytest.raises(ValueError):
        w_direct(AIRY, 0, 0)


@pytest.mark.parametrize("g,n", [(0, 3), (0, 4), (0, 5), (0, 6), (1, 1), (1, 2), (1, 3), (1, 4),
                                 (2, 1), (2, 2), (3, 1)])
def test_airy_matches_intersection_numbers(g, n):
    assert laurent(w_direct(AIRY, g, n).value) == airy_correlator(g, n)


def test_desk_bound():
    with pytest.raises(WorkLimitExceeded):
        w_direct(AIRY, 4, 1)


@pytest.mark.parametrize("g,n", [(0, 3), (0, 4), (0, 5), (1, 2), (1, 3), (2, 2)])
def test_symmetry(g, n):
    assert w_direct(AIRY, g, n).is_symmetric()
    assert w_direct(QUARTIC, g, n).is_symmetric()


@pytest.mark.parametrize("g,n", [(0, 3), (0, 4), (1, 1), (1, 2), (2, 1)])
def test_airy_pole_structure(g, n):
    for mono in w_direct(AIRY, g, n).value.laurent_terms():
        exps = dict(mono)
        assert len(exps) == n
        assert all(e <= -2 and e % 2 == 0 for e in exps.values())


def test_quartic_differs_from_airy():
    # three-point genus 0 only sees y'(0); higher correlators see the deformation
    assert w_direct(QUARTIC, 0, 3) == w_direct(AIRY, 0, 3)
    assert w_direct(QUARTIC, 0, 4) != w_direct(AIRY, 0, 4)
    # deformation only adds less singular terms
    top = {m: c for m, c in laurent(w_direct(QUARTIC, 1, 1).value).items() if m == (("z0", -4),)}
    assert top == {(("z0", -4),): F(1, 16)}


# ---------------------------------------------------------------- graph sums


@pytest.mark.parametrize("g,n", [(0, 3), (0, 4), (1, 1), (1, 2), (2, 1)])
def test_graph_sum_methods_agree(g, n):
    direct = w_direct(AIRY, g, n)
    assert w_graph_sum(AIRY, g, n, "weighted") == direct
    assert w_graph_sum(AIRY, g, n, "orbit") == direct


@pytest.mark.parametrize("g,n", [(0, 3), (0, 4), (1, 1), (1, 2)])
def test_graph_sum_on_quartic(g, n):
    assert w_graph_sum(QUARTIC, g, n) == w_direct(QUARTIC, g, n)


def test_single_vertex_graph():
    labels = {"p1": "z1", "p2": "z2"}
    one = phi_eval(AIRY, parse_graph("<p1 p2>"), "z0", labels)
    other = phi_eval(AIRY, parse_graph("<p2 p1>"), "z0", labels)
    assert one == other  # mirror invariance
    assert one + other == w_direct(AIRY, 0, 3).value


def test_loop_vertex_graph():
    assert phi_eval(AIRY, parse_graph("<1 2> | 1~2")) == w_direct(AIRY, 1, 1).value


def test_mirror_invariance_over_families():
    for k, g in ((3, 0), (1, 1), (2, 1)):
        for cl in eo_classes(k, g):
            vals = {phi_eval(AIRY, G).__str__() for G in cl.representatives}
            assert len(vals) <= 1, cl.key


def test_eo_family_weights_positive():
    for k, g in ((2, 0), (3, 0), (1, 1), (0, 2)):
        assert all(w > 0 for _, w in eo_family(k, g))


def test_non_eo_graph():
    g = TaggedGraph(((0, "p1"), (0, "p2")))  # loop across two branches
    with pytest.raises(NonEOGraph):
        phi_eval(AIRY, g)


def test_mirror_images_count():
    assert len(set(mirror_images((("a", "b"), "c")))) == 4


def test_phi_label_mismatch():
    with pytest.raises(KeyError):
        phi_eval(AIRY, parse_graph("<a b>"), "z0", {"a": "z1"})


# ---------------------------------------------------------------- coefficients


def test_s_sequence():
    assert [s_sequence(m) for m in (1, 2, 3)] == [1, 5, 60]
    with pytest.raises(ValueError):
        s_sequence(0)


def test_gbinom():
    assert gbinom(5, 2) == 10
    assert gbinom(F(1, 2), 2) == F(-1, 8)
    assert gbinom(3, -1) == 0


def test_formula_tables():
    assert coeff_table(0, 2, "statement").a(0, 1) == F(1, 2) == coeff_table(0, 2, "proof").a(0, 1)
    assert coeff_table(0, 4, "statement").a(0, 2) == F(1, 15)
    assert coeff_table(0, 4, "proof").a(0, 2) == F(1, 30)
    # at genus 1 the two handle formulas coincide
    assert coeff_table(1, 1, "statement").b() == F(1, 4) == coeff_table(1, 1, "proof").b()
    assert coeff_table(2, 0, "statement").b() == F(1, 6)
    assert coeff_table(2, 0, "proof").b() == F(1, 12)
    # half-integer binomials make the genus-1 statement values negative
    assert coeff_table(1, 2, "statement").a(0, 1) == F(-1, 4)


BRUTE = {
    (0, 2): {("a", 0, 1): F(1, 2)},
    (0, 3): {("a", 0, 1): F(1, 6), ("a", 0, 2): F(1, 6)},
    (0, 4): {("a", 0, 1): F(1, 10), ("a", 0, 2): F(1, 30), ("a", 0, 3): F(1, 10)},
    (1, 1): {("a", 0, 1): F(1, 4), ("a", 1, 0): F(1, 4), ("b", 0, 2): F(1, 8)},
    (1, 2): {("a", 0, 1): F(1, 7), ("a", 0, 2): F(1, 14), ("a", 1, 0): F(1, 14), ("a", 1, 1): F(1, 7),
             ("b", 0, 3): F(3, 56)},
    (2, 0): {("a", 1, 0): F(1, 18), ("b", 1, 1): F(1, 27)},
}


@pytest.mark.parametrize("g,k", sorted(BRUTE))
def test_brute_tables(g, k):
    t = coeff_table(g, k, "brute")
    assert {(e.kind, e.m, e.i): e.value for e in t.entries} == BRUTE[(g, k)]
    assert all(e.provenance == "brute" for e in t.entries)


def test_brute_violation_is_reported():
    t = coeff_table(1, 2, "brute")
    assert [(e.kind, e.value) for e in t.violations] == [("b", F(3, 56))]


def test_table_bounds():
    with pytest.raises(WorkLimitExceeded):
        coeff_table(3, 0, "brute")
    with pytest.raises(ValueError):
        coeff_table(0, 2, "guess")


def test_delta_prime_terms_split_or_glue():
    for t in delta_prime_terms(2, 1):
        if t.glued:
            assert t.right.is_empty and t.source.n_loops >= 1
        else:
            assert not t.left.is_empty and not t.right.is_empty


@pytest.mark.parametrize("g,k", [(0, 2), (0, 3), (1, 1)])
def test_identity_holds(g, k):
    rep = verify_coproduct_identity(AIRY, g, k)
    assert rep.equal and rep.violations == []
    assert rep.lhs == rep.rhs == w_direct(AIRY, g, k + 1).value


def test_identity_detects_wrong_table():
    rep = verify_coproduct_identity(AIRY, 0, 3, coeff_table(0, 3, "statement"))
    assert not rep.equal
    assert rep.violations and "differs" in rep.violations[0]


def test_identity_reports_missing_coefficients():
    rep = verify_coproduct_identity(AIRY, 1, 1, coeff_table(1, 1, "statement"))
    assert not rep.equal
    assert any("no coefficient" in v for v in rep.violations)
