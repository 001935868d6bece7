"""P^1 tests: the Wu formula against the z-derivation oracle, plus Cartan."""

import random

from spincoh.modp_poly import coefficient_of
from spincoh.steenrod import (
    SteenrodOp,
    p1_euler,
    p1_on_t_ring,
    p1_spin,
    p1_wu,
    p1_z,
    p_class_ring,
    spin_p1_op,
    weighted_tuples,
    wu_in_spin,
)
from spincoh.symfun import SpinElement, SpinRing, SymClassTable, t_ring


def spin_monomial_element(spin, even_z):
    return SpinElement(spin, even_z, spin.zring.zero())


def random_spin_poly(rng, spin, max_exp=2, nterms=3):
    ring = spin.ring
    out = ring.zero()
    for _ in range(nterms):
        exps = tuple(rng.randrange(max_exp + 1) for _ in range(ring.nvars))
        out = out + ring.monomial(exps, rng.randrange(1, ring.p))
    return out


def test_weighted_tuples():
    tups = list(weighted_tuples(4, 3))
    assert all(sum((j + 1) * t[j] for j in range(3)) == 4 for t in tups)
    assert len(tups) == len(set(tups)) == 4
    assert list(weighted_tuples(0, 3)) == [(0, 0, 0)]


def test_wu_spot_values():
    ring = p_class_ring(6, 5)
    assert coefficient_of(p1_wu(1, 6, 5), ring.var("p3")) == 1
    assert coefficient_of(p1_wu(4, 6, 5), ring.var("p5") * ring.var("p1")) == 3
    assert p1_wu(1, 6, 5) == ring.parse("p3 - p2*p1 + 2*p1^3")


def test_wu_matches_z_derivation_oracle():
    for p in (5, 7):
        for m in range(3, 7):
            spin = SpinRing(m, p)
            elem = spin.z_elementaries()
            for n in range(1, m + 1):
                free = wu_in_spin(n, spin)
                oracle = p1_z(spin_monomial_element(spin, elem[n]))
                assert spin.to_z(free) == oracle, (p, m, n)


def test_euler_images():
    spin5 = SpinRing(6, 5)
    assert p1_euler(6, 5) == spin5.parse("p1^2*e6 - 2*p2*e6")
    spin7 = SpinRing(6, 7)
    assert p1_euler(6, 7) == spin7.parse("p1^3*e6 - 3*p1*p2*e6 + 3*p3*e6")


def test_euler_rule_consistent_with_wu_at_top():
    # P^1(e_m^2) computed by Leibniz from the Euler rule must equal the
    # Wu expansion of P^1 p_m.
    for p in (5, 7):
        for m in (3, 4, 5, 6):
            spin = SpinRing(m, p)
            e = spin.var(spin.euler_name)
            assert p1_spin(e * e, spin) == wu_in_spin(m, spin), (p, m)


def test_spin_p1_spot_value():
    spin = SpinRing(8, 7)
    f = spin.parse("p7*p3")
    img = p1_spin(f, spin)
    assert coefficient_of(img, spin.parse("p7*p6")) == 2


def test_p1_is_a_derivation():
    rng = random.Random(11)
    cases = 0
    for p, m in ((5, 3), (5, 4), (7, 3), (7, 4)):
        spin = SpinRing(m, p)
        for _ in range(50):
            f = random_spin_poly(rng, spin)
            g = random_spin_poly(rng, spin)
            lhs = p1_spin(f * g, spin)
            rhs = p1_spin(f, spin) * g + f * p1_spin(g, spin)
            assert lhs == rhs
            cases += 1
    assert cases >= 200


def test_degree_shift():
    for p in (5, 7):
        spin = SpinRing(6, p)
        op = spin_p1_op(spin)
        for name in spin.ring.names:
            v = spin.var(name)
            img = op(v)
            assert img.is_zero() or (
                img.is_homogeneous() and img.topdegree() == v.topdegree() + 2 * (p - 1)
            )


def test_t_ring_action():
    for p in (5, 7):
        table = SymClassTable(p)
        ring = table.ring
        ts = [ring.var("t%d" % i) for i in range(1, 8)] + [ring.var("t7")]
        expected = ring.zero()
        for t in ts:
            expected = expected + (t ** (p + 1)).scale(2)
        assert p1_on_t_ring(table.q(1)) == expected


def test_t_ring_naturality_under_t7_kill():
    # Setting t7 = 0 commutes with the derivation t -> t^p.
    rng = random.Random(23)
    for p in (5, 7):
        ring = t_ring(p)
        kill = {"t7": ring.zero()}
        for _ in range(30):
            f = ring.zero()
            for _ in range(4):
                exps = tuple(rng.randrange(3) for _ in range(7))
                f = f + ring.monomial(exps, rng.randrange(1, p))
            a = p1_on_t_ring(f).substitute(kill)
            b = p1_on_t_ring(f.substitute(kill))
            assert a == b


def test_oracle_on_spin_monomials():
    # Every free-basis monomial of low degree maps the same way along both
    # routes: derivation on generators versus the z-side derivation.
    caps = {3: 48, 4: 44, 5: 36, 6: 24}
    checked = 0
    for p in (5, 7):
        for m, top in caps.items():
            spin = SpinRing(m, p)
            ring = spin.ring
            for mono in monomials_up_to(ring.degrees, top):
                f = ring.monomial(mono, 1)
                assert spin.to_z(p1_spin(f, spin)) == p1_z(spin.to_z(f)), (p, m, mono)
                checked += 1
    assert checked > 400


def monomials_up_to(degs, top):
    def rec(i, room):
        if i == len(degs):
            yield ()
            return
        for e in range(room // degs[i] + 1):
            for rest in rec(i + 1, room - e * degs[i]):
                yield (e,) + rest

    yield from rec(0, top)


def test_steenrod_op():
    op = SteenrodOp(5, 2)
    assert op.degree_shift == 16
    spin = SpinRing(6, 5)
    f = spin.parse("p2")
    once = p1_spin(f, spin)
    assert op.apply_spin(f, spin) == p1_spin(once, spin)
    assert SteenrodOp(5, 0).apply_spin(f, spin) == f
    try:
        SteenrodOp(2)
    except ValueError:
        pass
    else:
        raise AssertionError("p = 2 accepted")
    try:
        op.apply_spin(f, SpinRing(6, 7))
    except ValueError:
        pass
    else:
        raise AssertionError("prime mismatch accepted")


def test_z_route_on_odd_part():
    # Oracle handles the e_m-odd component: P^1(e) = D(1)*e + 1*(s e).
    spin = SpinRing(4, 5)
    one = spin.zring.one()
    el = SpinElement(spin, spin.zring.zero(), one)
    img = p1_z(el)
    assert img.even.is_zero()
    zs = [spin.zring.var(nm) for nm in spin.zring.names]
    s = spin.zring.zero()
    for z in zs:
        s = s + z ** 2
    assert img.odd == s
