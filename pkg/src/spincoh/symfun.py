"""Symmetric function tables and the cohomology of BSpin(2m) mod p.

Two models of H*(BSpin(2m); Z/p) are used.  The free model is the polynomial
ring on p_1, ..., p_{m-1}, e_m (degrees 4i and 2m), with p_m understood as
e_m^2.  The z-form writes an element as A + B*e_m where A, B are symmetric
polynomials in z_i = t_i^2; it is the computational back end for oracles,
since the Steenrod action is a plain derivation there.
"""

from __future__ import annotations

from .modp_poly import GradedPoly, RingSpec


class NotSymmetric(ValueError):
    pass


def t_ring(p, nvars=7):
    """The E7 maximal torus ring: t1..t7 in degree 2, with t8 := t7."""
    return RingSpec(p, ["t%d" % i for i in range(1, nvars + 1)], [2] * nvars)


def z_ring(p, m):
    """Z/p[z1..zm] with z_i in degree 4 (z_i plays t_i^2)."""
    return RingSpec(p, ["z%d" % i for i in range(1, m + 1)], [4] * m)


def elementary(values, k, ring=None):
    """e_k of an explicit list of ring elements (repeats allowed)."""
    if ring is None:
        ring = values[0].ring
    if k < 0 or k > len(values):
        return ring.zero()
    dp = [ring.one()] + [ring.zero()] * k
    for v in values:
        for j in range(min(k, len(dp) - 1), 0, -1):
            dp[j] = dp[j] + dp[j - 1] * v
    return dp[k]


def power_sum(values, k, ring=None):
    """s_k of an explicit list of ring elements."""
    if ring is None:
        ring = values[0].ring
    out = ring.zero()
    for v in values:
        out = out + v ** k
    return out


class SymClassTable:
    """Expansions of the classes c_i, q_i, p_i, e6 in the 7-variable t-ring.

    The alphabet is t1, ..., t8 subject to t8 = t7, so c_i is the i-th
    elementary symmetric polynomial of the eight t's, q_i of their squares,
    while p_i and e6 only see t1..t6 (the Spin(12) classes).
    """

    def __init__(self, p):
        self.p = p
        self.ring = t_ring(p)
        ts = [self.ring.var("t%d" % i) for i in range(1, 8)]
        self._eight = ts + [ts[6]]
        self._six = ts[:6]
        self._cache = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def c(self, i):
        """Elementary symmetric of t1..t8 (t8 = t7); zero outside 0..8."""
        return self._get(("c", i), lambda: elementary(self._eight, i, self.ring))

    def q(self, i):
        """Elementary symmetric of t1^2..t8^2 (t8 = t7)."""
        return self._get(
            ("q", i), lambda: elementary([t * t for t in self._eight], i, self.ring)
        )

    def pclass(self, i):
        """Elementary symmetric of t1^2..t6^2 (the Spin(12) Pontryagin class)."""
        return self._get(
            ("p", i), lambda: elementary([t * t for t in self._six], i, self.ring)
        )

    def e6(self):
        def build():
            out = self.ring.one()
            for t in self._six:
                out = out * t
            return out

        return self._get(("e6",), build)

    def s(self, k, alphabet=8):
        """Power sum of squares: s_k of t_i^2 over the first `alphabet` slots."""
        vals = self._eight if alphabet == 8 else self._six[:alphabet]
        return self._get(
            ("s", k, alphabet), lambda: power_sum([t * t for t in vals], k, self.ring)
        )


def q_from_c(table, i):
    """The quadratic c-expression for q_i, expanded in the t-ring.

    q_i = c_i^2 - 2 c_{i-1} c_{i+1} + 2 c_{i-2} c_{i+2} - ... +- 2 c_0 c_{2i},
    with c_0 = 1 and c_j = 0 for j > 8.
    """
    if not 1 <= i <= 8:
        raise ValueError("need 1 <= i <= 8")
    out = table.c(i) * table.c(i)
    sign = -1
    for j in range(1, i + 1):
        lo, hi = i - j, i + j
        term = (table.c(lo) * table.c(hi)).scale(2 * sign)
        out = out + term
        sign = -sign
    return out


def elementary_basis_ring(p, n, degree_scale):
    return RingSpec(
        p, ["e%d" % i for i in range(1, n + 1)], [degree_scale * i for i in range(1, n + 1)]
    )


def to_elementary_basis(f, n=None):
    """Rewrite a symmetric polynomial in the elementary basis e1..en.

    Works by repeated subtraction of the leading elementary monomial in
    graded-lex order; raises NotSymmetric when the input is not symmetric in
    its ring's variables.
    """
    ring = f.ring
    if n is None:
        n = ring.nvars
    if n != ring.nvars:
        raise ValueError("variable count mismatch")
    if len(set(ring.degrees)) > 1:
        raise ValueError("alphabet must be equigraded")
    scale = ring.degrees[0] if ring.degrees else 2
    out_ring = elementary_basis_ring(ring.p, n, scale)
    evs = [ring.var(nm) for nm in ring.names]
    elem_cache = {}

    def elem(k):
        if k not in elem_cache:
            elem_cache[k] = elementary(evs, k, ring)
        return elem_cache[k]

    out = out_ring.zero()
    work = f
    while not work.is_zero():
        lead = work.leading_monomial()
        c = work.terms[lead]
        if any(lead[j] < lead[j + 1] for j in range(n - 1)):
            raise NotSymmetric(
                "leading monomial %r is not weakly decreasing" % (lead,)
            )
        mults = [0] * n
        prod = ring.one()
        for j in range(n):
            nxt = lead[j + 1] if j + 1 < n else 0
            k = lead[j] - nxt
            if k:
                mults[j] = k
                prod = prod * elem(j + 1) ** k
        work = work - prod.scale(c)
        out = out + out_ring.monomial(tuple(mults), c)
    return out


class SpinRing:
    """H*(BSpin(2m); Z/p) as the free ring on p1..p_{m-1}, e_m."""

    def __init__(self, m, p):
        self.m = m
        self.p = p
        names = ["p%d" % i for i in range(1, m)] + ["e%d" % m]
        degrees = [4 * i for i in range(1, m)] + [2 * m]
        self.ring = RingSpec(p, names, degrees)
        self.zring = z_ring(p, m)
        self._z_elem = None

    def __repr__(self):
        return "SpinRing(m=%d, p=%d)" % (self.m, self.p)

    @property
    def euler_name(self):
        return "e%d" % self.m

    def parse(self, text):
        return self.ring.parse(text)

    def var(self, name):
        return self.ring.var(name)

    def z_elementaries(self):
        if self._z_elem is None:
            zs = [self.zring.var(nm) for nm in self.zring.names]
            self._z_elem = [
                elementary(zs, k, self.zring) for k in range(self.m + 1)
            ]
        return self._z_elem

    # --- conversions -------------------------------------------------------

    def to_z(self, f):
        """Free-basis polynomial -> SpinElement (A, B) with f = A + B e_m."""
        if f.ring != self.ring:
            raise ValueError("polynomial not in %r" % self)
        elem = self.z_elementaries()
        top = elem[self.m]
        even = self.zring.zero()
        odd = self.zring.zero()
        e_idx = self.ring.index(self.euler_name)
        for mono, c in f.terms.items():
            body = self.zring.const(c)
            for i in range(self.m - 1):
                e = mono[i]
                if e:
                    body = body * elem[i + 1] ** e
            k = mono[e_idx]
            body = body * top ** (k // 2)
            if k % 2:
                odd = odd + body
            else:
                even = even + body
        return SpinElement(self, even, odd)

    def from_z(self, el):
        """SpinElement -> free-basis polynomial (reduction to elementaries)."""
        out = self.ring.zero()
        for part, e_power in ((el.even, 0), (el.odd, 1)):
            if part.is_zero():
                continue
            reduced = to_elementary_basis(part)
            for mono, c in reduced.terms.items():
                exps = [0] * self.ring.nvars
                for i in range(self.m - 1):
                    exps[i] = mono[i]
                e_idx = self.ring.index(self.euler_name)
                exps[e_idx] = 2 * mono[self.m - 1] + e_power
                out = out + self.ring.monomial(tuple(exps), c)
        return out

    def zero_element(self):
        return SpinElement(self, self.zring.zero(), self.zring.zero())


class SpinElement:
    """A + B e_m with A, B symmetric polynomials of the z-ring."""

    __slots__ = ("spin", "even", "odd")

    def __init__(self, spin, even, odd):
        self.spin = spin
        self.even = even
        self.odd = odd

    def __eq__(self, other):
        return (
            isinstance(other, SpinElement)
            and self.spin is other.spin
            and self.even == other.even
            and self.odd == other.odd
        ) or (
            isinstance(other, SpinElement)
            and self.spin.m == other.spin.m
            and self.spin.p == other.spin.p
            and self.even == other.even
            and self.odd == other.odd
        )

    def __hash__(self):
        return hash((self.spin.m, self.spin.p, self.even, self.odd))

    def is_zero(self):
        return self.even.is_zero() and self.odd.is_zero()

    def __add__(self, other):
        return SpinElement(self.spin, self.even + other.even, self.odd + other.odd)

    def __sub__(self, other):
        return SpinElement(self.spin, self.even - other.even, self.odd - other.odd)

    def __neg__(self):
        return SpinElement(self.spin, -self.even, -self.odd)

    def scale(self, c):
        return SpinElement(self.spin, self.even.scale(c), self.odd.scale(c))

    def __mul__(self, other):
        return spin_mul(self, other)

    def __repr__(self):
        return "<(%s) + (%s)*%s>" % (self.even, self.odd, self.spin.euler_name)


def spin_mul(x, y):
    """(A + B e)(C + D e) = (AC + BD z1...zm) + (AD + BC) e."""
    spin = x.spin
    top = spin.z_elementaries()[spin.m]
    even = x.even * y.even + (x.odd * y.odd) * top
    odd = x.even * y.odd + x.odd * y.even
    return SpinElement(spin, even, odd)


def power_sum_in_p(k, m, p):
    """s_k(z) written in the free basis p1..p_{m-1}, e_m via Newton's identity."""
    spin = SpinRing(m, p)
    ring = spin.ring
    e_name = spin.euler_name

    def gen(i):
        if i < m:
            return ring.var("p%d" % i)
        if i == m:
            return ring.var(e_name) ** 2
        return ring.zero()

    s = {0: ring.const(m)}
    for j in range(1, k + 1):
        acc = ring.zero()
        sign = 1
        for i in range(1, j):
            acc = acc + (gen(i) * s[j - i]).scale(sign)
            sign = -sign
        acc = acc + gen(j).scale(sign * j)
        s[j] = acc
    return s[k]
