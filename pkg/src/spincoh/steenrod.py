"""The mod p reduced power P^1 on torus and Spin classifying space rings.

On the torus ring P^1 is the derivation t -> t^p.  On z = t^2 variables it is
z -> 2 z^((p+1)/2), and on H*(BSpin(2m)) it is computed two independent ways:
the closed Wu formula for P^1 p_n together with P^1 e_m = e_m s_{(p-1)/2}(z),
and the z-derivation oracle.  Tests require the two to agree everywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .modp_poly import RingSpec, coeff_from_rational
from .symfun import SpinElement, SpinRing, power_sum_in_p


def p_class_ring(m, p):
    """Z/p[p1..pm] with deg p_i = 4i (p_m standing for e_m^2)."""
    return RingSpec(p, ["p%d" % i for i in range(1, m + 1)], [4 * i for i in range(1, m + 1)])


def weighted_tuples(total, parts):
    """All (i_1, ..., i_parts) >= 0 with sum j*i_j = total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    j = parts
    for i_j in range(total // j, -1, -1):
        for rest in weighted_tuples(total - j * i_j, parts - 1):
            yield rest + (i_j,)


def wu_coefficient(n, p, tup):
    """Exact coefficient of p_1^{i_1} ... p_m^{i_m} in P^1 p_n.

    Writing s = sum i_j and T = sum_{j=1}^{n-1} (2n+p-1-2j) i_j, the
    coefficient is

        (-1)^{s+(p+1)/2} [(2n+p-1)(s-1)! - (s-2)! T] / prod(i_j!)

    as an exact rational, then reduced mod p.  Two boundary notes, both
    forced by the z-derivation P^1 z = 2 z^{(p+1)/2} that this formula
    expands:

    * the leading factor is 2n+p-1, congruent to 2n-1 mod p; the distinction
      only matters when (s-1)!/prod(i_j!) is not p-integral (first at the
      tuple p_1^5 for n=3, p=5, where 2n+p-1 gives exactly 0);
    * for s = 1 the (s-2)! factor is (-1)!, but the single allowed tuple
      concentrates its index at position n+(p-1)/2 > n-1, so T = 0
      identically and the term (s-2)! T is taken to be 0, leaving
      (-1)^{1+(p+1)/2} (2n+p-1).
    """
    s = sum(tup)
    if s == 0:
        raise ValueError("empty tuple")
    T = 0
    for j in range(1, n):
        if j <= len(tup):
            T += (2 * n + p - 1 - 2 * j) * tup[j - 1]
    sign = -1 if (s + (p + 1) // 2) % 2 else 1
    if s == 1:
        assert T == 0, "degenerate Wu tuple with nonzero inner sum"
        value = Fraction(2 * n + p - 1)
    else:
        num = factorial(s - 1) * (2 * n + p - 1) - factorial(s - 2) * T
        den = 1
        for i in tup:
            den *= factorial(i)
        value = Fraction(num, den)
    value *= sign
    return coeff_from_rational(value.numerator, value.denominator, p)


def p1_wu(n, m, p):
    """P^1 p_n in H*(BSpin(2m)), as a polynomial in p_1..p_m."""
    if not 1 <= n <= m:
        raise ValueError("need 1 <= n <= m")
    ring = p_class_ring(m, p)
    weight = n + (p - 1) // 2
    terms = {}
    for tup in weighted_tuples(weight, m):
        c = wu_coefficient(n, p, tup)
        if c:
            terms[tup] = c
    return ring.from_terms(terms)


def wu_in_spin(n, spin):
    """p1_wu(n, m, p) rewritten in the free basis, with p_m -> e_m^2."""
    m, p = spin.m, spin.p
    ring = spin.ring
    e = ring.var(spin.euler_name)
    wu = p1_wu(n, m, p)
    img = ring.zero()
    for mono, c in wu.terms.items():
        exps = [0] * ring.nvars
        for i in range(m - 1):
            exps[i] = mono[i]
        body = ring.monomial(tuple(exps), c)
        if mono[m - 1]:
            body = body * e ** (2 * mono[m - 1])
        img = img + body
    return img


def p1_euler(m, p):
    """P^1 e_m = e_m s_{(p-1)/2}(z), in the free basis of SpinRing(m, p)."""
    s = power_sum_in_p((p - 1) // 2, m, p)
    spin = SpinRing(m, p)
    f = spin.ring.from_terms(s.terms)  # same shape of ring
    return spin.var(spin.euler_name) * f


def p1_on_t_ring(f):
    """P^1 on a torus ring: the derivation t -> t^p."""
    ring = f.ring
    return f.derive({nm: ring.var(nm) ** ring.p for nm in ring.names})


class _SpinP1:
    """Cached P^1 generator images for one SpinRing."""

    def __init__(self, spin):
        self.spin = spin
        m = spin.m
        images = {"p%d" % n: wu_in_spin(n, spin) for n in range(1, m)}
        eul = p1_euler(m, spin.p)
        images[spin.euler_name] = spin.ring.from_terms(eul.terms)
        self.images = images

    def __call__(self, f):
        return f.derive(self.images)


_spin_p1_cache = {}


def spin_p1_op(spin):
    key = (spin.m, spin.p)
    if key not in _spin_p1_cache:
        _spin_p1_cache[key] = _SpinP1(spin)
    op = _spin_p1_cache[key]
    return op


def p1_spin(f, spin):
    """P^1 of a free-basis element of H*(BSpin(2m)); a derivation there."""
    if f.ring != spin.ring:
        raise ValueError("element not in %r" % spin)
    return spin_p1_op(spin)(f)


def p1_z(el):
    """Oracle: P^1 on a SpinElement via the z-derivation and the Euler rule."""
    spin = el.spin
    p = spin.p
    zr = spin.zring
    half = (p + 1) // 2
    images = {nm: zr.var(nm, half).scale(2) for nm in zr.names}
    zs = [zr.var(nm) for nm in zr.names]
    s = zr.zero()
    for z in zs:
        s = s + z ** ((p - 1) // 2)
    even = el.even.derive(images)
    odd = el.odd.derive(images) + el.odd * s
    return SpinElement(spin, even, odd)


class SteenrodOp:
    """An iterate (P^1)^k at an odd prime; shifts degree by 2(p-1) each step."""

    __slots__ = ("p", "k")

    def __init__(self, p, k=1):
        if p % 2 == 0 or p < 3:
            raise ValueError("odd prime required")
        if k < 0:
            raise ValueError("iterate must be nonnegative")
        self.p = p
        self.k = k

    @property
    def degree_shift(self):
        return 2 * (self.p - 1) * self.k

    def apply_spin(self, f, spin):
        if spin.p != self.p:
            raise ValueError("prime mismatch")
        for _ in range(self.k):
            f = p1_spin(f, spin)
        return f

    def apply_t(self, f):
        if f.ring.p != self.p:
            raise ValueError("prime mismatch")
        for _ in range(self.k):
            f = p1_on_t_ring(f)
        return f

    def apply_z(self, el):
        for _ in range(self.k):
            el = p1_z(el)
        return el

    def __repr__(self):
        return "SteenrodOp(p=%d, k=%d)" % (self.p, self.k)
