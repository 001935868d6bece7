"""Root data, reflection actions, and the invariant-class solver."""

import random
from fractions import Fraction

import pytest

from spincoh import idealred
from spincoh.idealred import IdealSpec
from spincoh.modp_poly import GradedPoly, LinearSubstitution
from spincoh.symfun import SymClassTable, t_ring
from spincoh.weyl import (
    PARAMETER_COUNTS,
    XBAR_DEGREES,
    InvariantProblem,
    RootSystem,
    classify_degree,
    invariance_ideal,
    invariance_residue,
    reflection_from_root,
    solve_phi1_invariants,
    spin6_ring,
    stated_products,
    variant_residue,
    verify_xbar_invariance,
    xbar,
    xbar_in_t,
)
from spincoh import weyl


BASE = IdealSpec.c1_t7_squared()


def reflect_vector(v, root):
    norm = sum(c * c for c in root)
    coef = Fraction(2) * sum(a * b for a, b in zip(v, root)) / norm
    return tuple(a - coef * b for a, b in zip(v, root))


def c_product(tab, spec):
    """Product of c classes from a list of (index, power) pairs."""
    f = tab.ring.one()
    for idx, e in spec:
        for _ in range(e):
            f = f * tab.c(idx)
    return f


def reduced_c_product(tab, spec):
    """Same product pushed to reduced form factor by factor.

    Reducing between factors keeps the torus expansion from blowing up;
    the drop ideal is monomial, so the result is the same normal form.
    """
    f = idealred.u_ring(tab.p).one()
    for idx, e in spec:
        cu = idealred.reduce(tab.c(idx), BASE)
        for _ in range(e):
            f = idealred.reduce(f * cu, BASE)
    return f


# --- root data --------------------------------------------------------------

def test_cartan_matrix_matches_diagram():
    rs = RootSystem()
    cartan = rs.cartan_matrix()
    edges = {frozenset(e) for e in ((1, 3), (3, 4), (2, 4), (4, 5), (5, 6), (6, 7))}
    for i in range(7):
        assert cartan[i][i] == 2
        for j in range(7):
            if i == j:
                continue
            want = -1 if frozenset((i + 1, j + 1)) in edges else 0
            assert cartan[i][j] == want
            assert cartan[i][j] == cartan[j][i]


def test_root_system_rejects_wrong_roots():
    roots = list(RootSystem().simple_roots)
    broken = list(roots[3])
    broken[0] += 1
    roots[3] = tuple(broken)
    with pytest.raises(ValueError):
        RootSystem(roots)
    with pytest.raises(ValueError):
        RootSystem(roots[:5])


def test_first_reflection_shifts_by_quarter_sum():
    rs = RootSystem()
    for p in (5, 7):
        phi1 = rs.reflection(1, p)
        tab = SymClassTable(p)
        shift = tab.c(1).scale(Fraction(-1, 4))
        for nm in t_ring(p).names:
            assert phi1.images[nm] == t_ring(p).var(nm) + shift


def test_reflections_are_involutions():
    rs = RootSystem()
    tab = SymClassTable(5)
    probe = tab.c(2) + tab.ring.var("t3", 2)
    for i in range(1, 8):
        phi = rs.reflection(i, 5)
        assert phi(phi(probe)) == probe


def test_higher_reflections_fix_invariant_classes():
    rs = RootSystem()
    tab = SymClassTable(5)
    t7 = tab.ring.var("t7")
    for i in range(2, 8):
        phi = rs.reflection(i, 5)
        for k in range(1, 6):
            assert phi(tab.pclass(k)) == tab.pclass(k)
        assert phi(tab.e6()) == tab.e6()
        assert phi(t7) == t7
    phi4 = rs.reflection(4, 7)
    tab7 = SymClassTable(7)
    assert phi4(tab7.pclass(3)) == tab7.pclass(3)


def test_reflection_rejects_zero_root():
    with pytest.raises(ValueError):
        reflection_from_root((0,) * 8, 5)
    with pytest.raises(ValueError):
        reflection_from_root((1, 0, 0), 5)


def test_reflection_from_orbit_roots_randomized():
    rng = random.Random(20260818)
    simples = RootSystem().simple_roots
    count = 0
    while count < 200:
        root = simples[rng.randrange(7)]
        for _ in range(rng.randrange(5)):
            root = reflect_vector(root, simples[rng.randrange(7)])
        p = 5 if count % 2 else 7
        sub = reflection_from_root(root, p)
        tab = SymClassTable(p)
        assert sub(tab.q(1)) == tab.q(1)
        t3 = t_ring(p).var("t3")
        assert sub(sub(t3)) == t3
        count += 1


# --- the catalog ------------------------------------------------------------

def test_xbar_catalog_values():
    assert xbar(4, 5) == spin6_ring(5).var("p1")
    assert xbar(20, 7) == spin6_ring(7).parse("p5 - p2*e6")
    for p in (5, 7):
        coeff = xbar(24, p).coefficient_of((0, 3, 0, 0, 0, 0))
        assert coeff == (-pow(36, -1, p)) % p
        cube = xbar(36, p).coefficient_of((0, 3, 0, 0, 0, 1))
        assert cube == pow(2, -1, p)
        for name in XBAR_DEGREES:
            f = xbar(name, p)
            assert f.is_homogeneous() and f.topdegree() == name
    with pytest.raises(KeyError):
        xbar(8, 5)


def test_xbar_in_t_expansion():
    assert xbar_in_t(4, 5) == SymClassTable(5).pclass(1)
    f = xbar_in_t(12, 7)
    assert f.is_homogeneous() and f.topdegree() == 12
    phi7 = RootSystem().reflection(7, 7)
    assert phi7(f) == f


def test_invariance_ideal_shapes():
    assert not invariance_ideal(12).has_qpower()
    assert invariance_ideal(20).q_exponent() == 2
    assert invariance_ideal(24).q_exponent() == 2
    assert invariance_ideal(28).q_exponent() == 1
    assert invariance_ideal(36).q_exponent() == 1
    with pytest.raises(KeyError):
        invariance_ideal(40)


# --- closed forms for the reflection action ---------------------------------

def test_phi_c_closed_form():
    for p in (5, 7):
        rs = RootSystem()
        phi1 = rs.reflection(1, p)
        tab = SymClassTable(p)
        assert phi1(tab.c(1)) == tab.c(1).scale(-1)
        assert phi1(tab.c(2)) == tab.c(2)
        square = IdealSpec.aug_power(2, ("u1",))
        for i in range(3, 9):
            delta = phi1(tab.c(i)) - tab.c(i) + (
                tab.c(i - 1) * tab.c(1)
            ).scale(Fraction(9 - i, 4))
            nf = idealred.reduce(idealred.to_u_coords(delta), square)
            assert nf.is_zero()


def test_phi_q_closed_form():
    d_specs = {
        2: [(Fraction(3, 2), [(3, 1)])],
        3: [(Fraction(-5, 2), [(5, 1)]), (Fraction(-1, 2), [(3, 1), (2, 1)])],
        4: [
            (Fraction(7, 2), [(7, 1)]),
            (Fraction(3, 2), [(5, 1), (2, 1)]),
            (Fraction(-1, 2), [(4, 1), (3, 1)]),
        ],
        5: [
            (Fraction(-5, 2), [(7, 1), (2, 1)]),
            (Fraction(3, 2), [(6, 1), (3, 1)]),
            (Fraction(-1, 2), [(5, 1), (4, 1)]),
        ],
        6: [
            (Fraction(-5, 2), [(8, 1), (3, 1)]),
            (Fraction(3, 2), [(7, 1), (4, 1)]),
            (Fraction(-1, 2), [(6, 1), (5, 1)]),
        ],
        7: [(Fraction(3, 2), [(8, 1), (5, 1)]), (Fraction(-1, 2), [(7, 1), (6, 1)])],
    }
    # Modulo the square of the first class the shifted action is its own
    # first order Taylor expansion, so the congruence for q_i comes down to
    # the derivation sum: -1/4 sum_j dq_i/dt_j = d_i mod (c1).  The two
    # cheap degrees check that reformulation against actual substitution.
    for p in (5, 7):
        phi1 = RootSystem().reflection(1, p)
        tab = SymClassTable(p)
        line = IdealSpec.aug_power(1, ("u1",))
        square = IdealSpec.aug_power(2, ("u1",))
        ones = {nm: 1 for nm in tab.ring.names}
        for i, spec in d_specs.items():
            d = tab.ring.zero()
            for coeff, parts in spec:
                d = d + c_product(tab, parts).scale(coeff)
            taylor = tab.q(i).derive(ones).scale(Fraction(-1, 4)) - d
            assert idealred.reduce(idealred.to_u_coords(taylor), line).is_zero()
            if i <= 3:
                delta = phi1(tab.q(i)) - tab.q(i) - d * tab.c(1)
                nf = idealred.reduce(idealred.to_u_coords(delta), square)
                assert nf.is_zero()


def test_phi1_residue_formula_oracle_randomized():
    rng = random.Random(7129)
    for case in range(200):
        p = 5 if case % 2 else 7
        ring = idealred.u_ring(p)
        phi = weyl._phi1_u(p)
        terms = {}
        for _ in range(rng.randrange(1, 6)):
            degree = 2 * rng.randrange(2, 8)
            slot = rng.randrange(3)
            left = degree // 2 - (1 if slot else 0)
            exps = [0] * 7
            if slot == 1:
                exps[0] = 1
            elif slot == 2:
                exps[6] = 1
            for _ in range(left):
                exps[1 + rng.randrange(5)] += 1
            terms[tuple(exps)] = rng.randrange(1, p)
        f = GradedPoly(ring, terms)
        fast = weyl._phi1_residue_nf(f)
        slow = idealred.reduce(phi(f) - f, BASE)
        assert fast == slow


def test_phi1_residue_rejects_unreduced():
    ring = idealred.u_ring(5)
    with pytest.raises(ValueError):
        weyl._phi1_residue_nf(ring.var("u1", 2))


# --- invariance of the catalog ----------------------------------------------

def test_verify_xbar_invariance_all_degrees():
    for p in (5, 7):
        for name in XBAR_DEGREES:
            assert verify_xbar_invariance(name, p)


def test_xbar20_needs_the_q_part():
    for p in (5, 7):
        assert not verify_xbar_invariance(20, p, ideal=BASE)


def test_variant_residues():
    tab5, tab7 = SymClassTable(5), SymClassTable(7)
    assert variant_residue(12, 5).is_zero()
    r7 = variant_residue(12, 7)
    want = reduced_c_product(tab7, [(5, 1), (1, 1)]).scale(30)
    assert r7 == want
    for p, tab in ((5, tab5), (7, tab7)):
        r20 = variant_residue(20, p)
        built = reduced_c_product(tab, [(6, 1), (3, 1), (1, 1)]).scale(3) - \
            reduced_c_product(tab, [(5, 1), (4, 1), (1, 1)])
        assert not r20.is_zero()
        assert idealred.congruent(r20, built, invariance_ideal(20))
        assert not variant_residue(36, p).is_zero()
    with pytest.raises(KeyError):
        variant_residue(16, 5)


# --- the solver -------------------------------------------------------------

def test_invariant_problem_shapes():
    prob = InvariantProblem(5, 12, invariance_ideal(12))
    assert set(prob.labels()) == {"e6", "q3", "q1*q2", "q1^3"}
    big = InvariantProblem(5, 36, invariance_ideal(36), skip_q1_multiples=True)
    assert len(big.ansatz) == 10
    assert all(m[0] == 0 for m in big.ansatz)
    full = InvariantProblem(5, 20, invariance_ideal(20))
    assert len(full.ansatz) == 9
    with pytest.raises(ValueError):
        InvariantProblem(5, 2, invariance_ideal(12))
    with pytest.raises(ValueError):
        InvariantProblem(5, 12, IdealSpec.q_power(1))


def test_solver_degree_4():
    for p in (5, 7):
        space = solve_phi1_invariants(InvariantProblem(p, 4, invariance_ideal(4)))
        assert space.dimension == 1
        assert space.basis == ((1,),)


RESIDUE_TABLES = {
    12: (
        None,
        {
            (0, 0, 1, 0, 0, 0): [(Fraction(-5, 2), [(5, 1)]), (Fraction(-1, 2), [(3, 1), (2, 1)])],
            (1, 1, 0, 0, 0, 0): [(-3, [(3, 1), (2, 1)])],
            (3, 0, 0, 0, 0, 0): [],
            (0, 0, 0, 0, 0, 1): [(Fraction(-1, 4), [(5, 1)])],
        },
    ),
    16: (
        None,
        {
            (0, 0, 0, 1, 0, 0): [
                (Fraction(3, 2), [(5, 1), (2, 1)]),
                (Fraction(-1, 2), [(4, 1), (3, 1)]),
            ],
            (0, 2, 0, 0, 0, 0): [(6, [(4, 1), (3, 1)]), (3, [(3, 1), (2, 2)])],
            (2, 1, 0, 0, 0, 0): [(6, [(3, 1), (2, 2)])],
            (1, 0, 0, 0, 0, 1): [(Fraction(1, 2), [(5, 1), (2, 1)])],
        },
    ),
    20: (
        None,
        {
            (0, 0, 0, 0, 1, 0): [
                (Fraction(3, 2), [(6, 1), (3, 1)]),
                (Fraction(-1, 2), [(5, 1), (4, 1)]),
            ],
            (0, 1, 1, 0, 0, 0): [
                (-3, [(6, 1), (3, 1)]),
                (-5, [(5, 1), (4, 1)]),
                (-4, [(4, 1), (3, 1), (2, 1)]),
                (Fraction(3, 2), [(3, 3)]),
            ],
            (1, 2, 0, 0, 0, 0): [(-12, [(4, 1), (3, 1), (2, 1)])],
            (0, 1, 0, 0, 0, 1): [
                (Fraction(3, 2), [(6, 1), (3, 1)]),
                (Fraction(-1, 2), [(5, 1), (4, 1)]),
            ],
        },
    ),
    24: (
        None,
        {
            (0, 1, 0, 1, 0, 0): [
                (3, [(6, 1), (3, 1), (2, 1)]),
                (3, [(5, 1), (4, 1), (2, 1)]),
                (-3, [(5, 1), (3, 2)]),
                (Fraction(1, 2), [(4, 2), (3, 1)]),
            ],
            (1, 1, 1, 0, 0, 0): [
                (6, [(6, 1), (3, 1), (2, 1)]),
                (10, [(5, 1), (4, 1), (2, 1)]),
                (-3, [(3, 3), (2, 1)]),
            ],
            (0, 3, 0, 0, 0, 0): [(18, [(4, 2), (3, 1)])],
            (0, 0, 1, 0, 0, 1): [
                (-2, [(6, 1), (5, 1)]),
                (Fraction(-1, 2), [(6, 1), (3, 1), (2, 1)]),
                (Fraction(1, 2), [(5, 1), (4, 1), (2, 1)]),
                (Fraction(-1, 4), [(5, 1), (3, 2)]),
            ],
            (1, 1, 0, 0, 0, 1): [
                (-3, [(6, 1), (3, 1), (2, 1)]),
                (1, [(5, 1), (4, 1), (2, 1)]),
            ],
            (0, 0, 0, 0, 0, 2): [(Fraction(-1, 2), [(6, 1), (5, 1)])],
        },
    ),
    28: (
        None,
        {
            (0, 1, 0, 0, 1, 0): [
                (Fraction(3, 2), [(5, 2), (3, 1)]),
                (-1, [(5, 1), (4, 2)]),
            ],
            (0, 2, 1, 0, 0, 0): [
                (-12, [(6, 1), (4, 1), (3, 1)]),
                (-10, [(5, 1), (4, 2)]),
                (6, [(4, 1), (3, 3)]),
            ],
            (0, 0, 0, 1, 0, 1): [
                (Fraction(-1, 2), [(6, 1), (4, 1), (3, 1)]),
                (Fraction(1, 2), [(5, 2), (3, 1)]),
                (Fraction(-1, 4), [(5, 1), (4, 2)]),
            ],
            (0, 2, 0, 0, 0, 1): [
                (6, [(6, 1), (4, 1), (3, 1)]),
                (-1, [(5, 1), (4, 2)]),
            ],
        },
    ),
    36: (
        None,
        {
            (0, 2, 0, 0, 1, 0): [
                (-6, [(6, 1), (4, 2), (3, 1)]),
                (6, [(5, 2), (4, 1), (3, 1)]),
                (-2, [(5, 1), (4, 3)]),
            ],
            (0, 3, 1, 0, 0, 0): [
                (-36, [(6, 1), (4, 2), (3, 1)]),
                (-20, [(5, 1), (4, 3)]),
                (18, [(4, 2), (3, 3)]),
            ],
            (0, 1, 0, 1, 0, 1): [
                (-3, [(6, 1), (5, 1), (3, 2)]),
                (Fraction(1, 2), [(6, 1), (4, 2), (3, 1)]),
                (1, [(5, 2), (4, 1), (3, 1)]),
                (Fraction(-1, 2), [(5, 1), (4, 3)]),
            ],
            (0, 0, 2, 0, 0, 1): [
                (9, [(6, 2), (5, 1)]),
                (-4, [(6, 1), (5, 1), (3, 2)]),
                (Fraction(-1, 4), [(5, 1), (3, 4)]),
            ],
            (0, 0, 1, 0, 0, 2): [
                (Fraction(-3, 2), [(6, 2), (5, 1)]),
                (Fraction(-1, 2), [(6, 1), (5, 1), (3, 2)]),
            ],
            (0, 3, 0, 0, 0, 1): [
                (18, [(6, 1), (4, 2), (3, 1)]),
                (-2, [(5, 1), (4, 3)]),
            ],
            (0, 0, 0, 0, 0, 3): [(Fraction(-3, 4), [(6, 2), (5, 1)])],
        },
    ),
}


@pytest.mark.parametrize("degree", sorted(RESIDUE_TABLES))
def test_solver_residues_match_displayed_tables(degree):
    _, table = RESIDUE_TABLES[degree]
    for p in (5, 7):
        tab = SymClassTable(p)
        ideal = invariance_ideal(degree)
        c1 = idealred.reduce(tab.c(1), BASE)
        for exps, combo in table.items():
            r = weyl._phi1_residue_nf(weyl._ansatz_form(p, exps))
            built = c1.ring.zero()
            for coeff, parts in combo:
                built = built + idealred.reduce(
                    reduced_c_product(tab, parts) * c1, BASE
                ).scale(coeff)
            assert idealred.congruent(r, built, ideal)


def test_classification_all_degrees():
    for p in (5, 7):
        for degree in XBAR_DEGREES:
            out = classify_degree(p, degree)
            assert out.parameter_count == PARAMETER_COUNTS[degree]
            assert out.span_matches
            assert out.catalog_inside
            assert out.passed


def test_q1_multiples_are_automatic_solutions():
    prob = InvariantProblem(5, 20, invariance_ideal(20))
    space = solve_phi1_invariants(prob)
    for i, exps in enumerate(prob.ansatz):
        if exps[0] >= 2:
            unit = [0] * len(prob.ansatz)
            unit[i] = 1
            assert space.contains(unit)
    prob28 = InvariantProblem(7, 28, invariance_ideal(28))
    space28 = solve_phi1_invariants(prob28)
    for i, exps in enumerate(prob28.ansatz):
        if exps[0] >= 1:
            unit = [0] * len(prob28.ansatz)
            unit[i] = 1
            assert space28.contains(unit)


def test_solution_vectors_satisfy_condition():
    tab = SymClassTable(5)
    phi1 = RootSystem().reflection(1, 5)
    classes = [tab.q(i) for i in range(1, 6)] + [tab.e6()]

    def check(prob, v):
        f = tab.ring.zero()
        for exps, coeff in zip(prob.ansatz, v):
            if not coeff:
                continue
            mono = tab.ring.one()
            for cls, e in zip(classes, exps):
                for _ in range(e):
                    mono = mono * cls
            f = f + mono.scale(coeff)
        nf = idealred.reduce(phi1(f) - f, prob.ideal)
        assert idealred.member_graded(nf, prob.ideal)

    prob12 = InvariantProblem(5, 12, invariance_ideal(12))
    for v in solve_phi1_invariants(prob12).basis:
        check(prob12, v)

    # q1^2 multiples sit in the ideal outright; expanding their torus
    # polynomials is slow and checks nothing, so take the other vectors.
    prob20 = InvariantProblem(5, 20, invariance_ideal(20))
    space20 = solve_phi1_invariants(prob20)
    picked = 0
    for v in space20.basis:
        if all(not c or prob20.ansatz[i][0] < 2 for i, c in enumerate(v)):
            check(prob20, v)
            picked += 1
    assert picked == 2


def test_custom_reflection_paths():
    prob = InvariantProblem(5, 12, invariance_ideal(12),
                            reflection=RootSystem().reflection(1, 5))
    direct = solve_phi1_invariants(prob)
    default = solve_phi1_invariants(InvariantProblem(5, 12, invariance_ideal(12)))
    assert direct.basis == default.basis

    fixing = InvariantProblem(5, 12, invariance_ideal(12),
                              reflection=RootSystem().reflection(3, 5))
    space = solve_phi1_invariants(fixing)
    assert space.dimension == len(fixing.ansatz)


def test_stated_products_consistent():
    for degree in XBAR_DEGREES:
        prods = stated_products(degree, 5)
        assert len(prods) == PARAMETER_COUNTS[degree]
        for f in prods:
            assert f.topdegree() == degree


def test_invariance_residue_rejects_inhomogeneous():
    spin = spin6_ring(5)
    with pytest.raises(ValueError):
        invariance_residue(spin.parse("p1 + p2"), invariance_ideal(12))
