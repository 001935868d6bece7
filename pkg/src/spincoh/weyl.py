"""Root data and reflection-invariant classes for the rank seven group.

Simple roots live in the dual of an eight dimensional ambient space whose
last two torus coordinates are identified.  Only the first simple reflection
acts nontrivially on the even invariant classes; the solver below classifies
its invariants degree by degree and compares them with the catalog of
generators written in Pontryagin and Euler coordinates.
"""

from fractions import Fraction

from . import idealred
from .idealred import IdealSpec, SparseEchelon
from .modp_poly import (
    GradedPoly,
    LinearSubstitution,
    RingSpec,
    monomials_of_degree,
)
from .symfun import SpinRing, SymClassTable, t_ring

# --- root data ------------------------------------------------------------

_DIAGRAM_EDGES = frozenset(
    frozenset(e) for e in ((1, 3), (3, 4), (2, 4), (4, 5), (5, 6), (6, 7))
)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _e7_simple_roots():
    half = Fraction(1, 2)
    zero = Fraction(0)
    first = tuple(half if i in (0, 7) else -half for i in range(8))
    second = (Fraction(1), Fraction(1)) + (zero,) * 6
    roots = [first, second]
    for i in range(3, 8):
        v = [zero] * 8
        v[i - 2] = Fraction(1)
        v[i - 3] = Fraction(-1)
        roots.append(tuple(v))
    return tuple(roots)


class RootSystem:
    """Seven simple roots in eight ambient coordinates, diagram checked."""

    def __init__(self, simple_roots=None):
        if simple_roots is None:
            simple_roots = _e7_simple_roots()
        roots = tuple(
            tuple(Fraction(c) for c in root) for root in simple_roots
        )
        if len(roots) != 7 or any(len(root) != 8 for root in roots):
            raise ValueError("expected seven simple roots of eight coordinates")
        self.simple_roots = roots
        self._check_diagram()

    def cartan_matrix(self):
        """The integer matrix 2(a_i, a_j) / (a_j, a_j)."""
        roots = self.simple_roots
        out = []
        for a in roots:
            row = []
            for b in roots:
                val = 2 * _dot(a, b) / _dot(b, b)
                if val.denominator != 1:
                    raise ValueError("Cartan pairing is not integral")
                row.append(int(val))
            out.append(tuple(row))
        return tuple(out)

    def _check_diagram(self):
        cartan = self.cartan_matrix()
        for i in range(7):
            for j in range(7):
                if i == j:
                    want = 2
                elif frozenset((i + 1, j + 1)) in _DIAGRAM_EDGES:
                    want = -1
                else:
                    want = 0
                if cartan[i][j] != want:
                    raise ValueError(
                        "simple roots do not form the expected diagram"
                    )

    def reflection(self, i, p):
        """The i-th simple reflection on the mod p torus ring."""
        if not 1 <= i <= len(self.simple_roots):
            raise ValueError("no simple root numbered %d" % i)
        return reflection_from_root(self.simple_roots[i - 1], p)


def reflection_from_root(root, p):
    """Reflection through a root, as a substitution on the torus ring.

    The torus coordinates embed as t1 = -e1 and ti = ei for 2 <= i <= 7; the
    eighth coordinate is folded onto the seventh afterwards.  Rejects the
    zero root, and any root whose folded action fails to be an involution.
    """
    root = tuple(Fraction(c) for c in root)
    if len(root) != 8:
        raise ValueError("expected an eight coordinate root")
    norm = _dot(root, root)
    if norm == 0:
        raise ValueError("cannot reflect through the zero root")
    ring = t_ring(p)
    images = {}
    for i, nm in enumerate(ring.names):
        vec = [Fraction(0)] * 8
        vec[i] = Fraction(-1) if i == 0 else Fraction(1)
        coef = 2 * _dot(vec, root) / norm
        w = [vc - coef * rc for vc, rc in zip(vec, root)]
        img = ring.var("t1").scale(-w[0])
        for j in range(1, 7):
            img = img + ring.var(ring.names[j]).scale(w[j])
        img = img - ring.var("t7").scale(w[7])
        images[nm] = img
    sub = LinearSubstitution(ring, images, involution=True)
    for nm in ring.names:
        if sub(images[nm]) != ring.var(nm):
            raise ValueError("folded reflection is not an involution")
    return sub


# --- the catalog classes ----------------------------------------------------

_XBAR_TEXT = {
    4: "p1",
    12: "p2*p1 - 6*p3 + 60*e6",
    16: "12*p4 + p2^2 - 1/2*p2*p1^2 - 36*p1*e6",
    20: "p5 - p2*e6",
    24: "p4*p2 - 1/36*p2^3 - 12*p3*e6 + 3*p2*p1*e6 + 48*e6^2",
    28: "p5*p2 - 3*p4*e6 - 1/4*p2^2*e6",
    36: "p5*p2^2 - 6*p4*p2*e6 + 36*p3*e6^2 + 1/2*p2^3*e6 - 72*e6^3",
}

XBAR_DEGREES = tuple(sorted(_XBAR_TEXT))

# Sign variants of three catalog classes.  None of them is reflection
# invariant modulo its degree's ideal; their residues are reported rather
# than asserted.  The degree 36 variant flips the Euler cube cofactor, the
# other two flip the plain Euler term.
_VARIANT_TEXT = {
    12: "p2*p1 - 6*p3 - 60*e6",
    20: "p5 + p2*e6",
    36: "p5*p2^2 - 6*p4*p2*e6 + 36*p3*e6^2 - 1/2*p2^3*e6 - 72*e6^3",
}

_spin6 = {}
_tables = {}
_xbar_polys = {}


def spin6_ring(p):
    """The free model on p1..p5 and e6 (the image of the torus invariants)."""
    if p not in _spin6:
        _spin6[p] = SpinRing(6, p)
    return _spin6[p]


def _table(p):
    if p not in _tables:
        _tables[p] = SymClassTable(p)
    return _tables[p]


def xbar(name, p):
    """Catalog generator of one topological degree in Pontryagin-Euler form."""
    text = _XBAR_TEXT.get(name)
    if text is None:
        raise KeyError("no catalog class in degree %r" % (name,))
    key = (name, p)
    if key not in _xbar_polys:
        _xbar_polys[key] = spin6_ring(p).parse(text)
    return _xbar_polys[key]


def xbar_in_t(name, p):
    """The catalog class expanded in torus coordinates."""
    tab = _table(p)
    mapping = {"p%d" % i: tab.pclass(i) for i in range(1, 6)}
    mapping["e6"] = tab.e6()
    return xbar(name, p).substitute(mapping, target=tab.ring)


def invariance_ideal(degree):
    """The ideal modulo which the degree's catalog class is invariant."""
    if degree not in _XBAR_TEXT:
        raise KeyError("no catalog class in degree %r" % (degree,))
    ideal = IdealSpec.c1_t7_squared()
    if degree in (20, 24):
        ideal = ideal + IdealSpec.q_power(2)
    elif degree in (28, 36):
        ideal = ideal + IdealSpec.q_power(1)
    return ideal


# --- reduced forms and the first reflection --------------------------------

_form_cache = {}
_monomial_forms = {}


def _class_forms(p):
    """Reduced u-coordinate forms of q1..q5 and the six variable Euler class."""
    forms = _form_cache.get(p)
    if forms is None:
        tab = _table(p)
        base = IdealSpec.c1_t7_squared()
        forms = {"q%d" % i: idealred.reduce(tab.q(i), base) for i in range(1, 6)}
        forms["e6"] = idealred.reduce(tab.e6(), base)
        _form_cache[p] = forms
    return forms


def _ansatz_form(p, exps):
    """Reduced form of the monomial q1^a1 .. q5^a5 e6^b."""
    key = (p, exps)
    nf = _monomial_forms.get(key)
    if nf is None:
        forms = _class_forms(p)
        base = IdealSpec.c1_t7_squared()
        acc = None
        for i, e in enumerate(exps):
            cls = forms["e6" if i == 5 else "q%d" % (i + 1)]
            for _ in range(e):
                acc = cls if acc is None else idealred.reduce(acc * cls, base)
        if acc is None:
            acc = idealred.u_ring(p).one()
        _monomial_forms[key] = nf = acc
    return nf


def _eval_nf(f):
    """Reduced u-coordinate form of a Pontryagin-Euler class.

    Pontryagin generators are replaced by the matching q classes; the two
    differ by a multiple of t7^2, which the base ideal absorbs.
    """
    p = f.ring.p
    out = idealred.u_ring(p).zero()
    for m, c in f.terms.items():
        out = out + _ansatz_form(p, m).scale(c)
    return out


def _phi1_residue_nf(f):
    """phi1(f) - f for an element reduced modulo the squared pair ideal.

    The first reflection negates u1 and shifts every other coordinate by
    -u1/4, so on reduced forms only first order u1 terms survive: a Leibniz
    derivative of the constant slice plus sign flips on the linear slices.
    """
    ring = f.ring
    i1 = ring.index("u1")
    i7 = ring.index("u7")
    a = {}
    b = {}
    c = {}
    for m, coeff in f.terms.items():
        if m[i1] + m[i7] >= 2:
            raise ValueError("element is not reduced")
        if m[i1]:
            b[m[:i1] + (0,) + m[i1 + 1:]] = coeff
        elif m[i7]:
            c[m[:i7] + (0,)] = coeff
        else:
            a[m] = coeff
    inner = {nm: 1 for nm in ring.names[1:-1]}
    da = GradedPoly(ring, a).derive(inner)
    quarter = Fraction(-1, 4)
    r = da.scale(quarter) + GradedPoly(ring, b).scale(-2) + GradedPoly(ring, c).scale(quarter)
    return ring.var("u1") * r


def _phi1_u(p):
    """The first reflection as a substitution on the u-coordinate ring."""
    ring = idealred.u_ring(p)
    u1 = ring.var("u1")
    images = {"u1": u1.scale(-1)}
    shift = u1.scale(Fraction(-1, 4))
    for nm in ring.names[1:]:
        images[nm] = ring.var(nm) + shift
    return LinearSubstitution(ring, images, involution=True)


def invariance_residue(f, ideal):
    """Canonical residue of phi1(f) - f modulo the ideal.

    f is a homogeneous Pontryagin-Euler class; the result is a reduced
    u-coordinate element, zero exactly when f is invariant mod the ideal.
    """
    if not f.is_homogeneous():
        raise ValueError("invariance needs a homogeneous class")
    p = f.ring.p
    r = _phi1_residue_nf(_eval_nf(f))
    if r.is_zero() or not ideal.has_qpower():
        return r
    ech = idealred._slice_echelon(ideal, idealred.u_ring(p), f.topdegree())
    return GradedPoly(r.ring, ech.reduce_vector(r.terms))


def verify_xbar_invariance(name, p, ideal=None):
    """Whether a catalog class is first reflection invariant mod its ideal."""
    if ideal is None:
        ideal = invariance_ideal(name)
    return invariance_residue(xbar(name, p), ideal).is_zero()


def variant_residue(degree, p):
    """Residue of the sign flipped twin of a catalog class, for reporting.

    The twins fail invariance in general; their residues are informational
    output, not asserted facts.
    """
    text = _VARIANT_TEXT.get(degree)
    if text is None:
        raise KeyError("no sign flipped twin in degree %r" % (degree,))
    f = spin6_ring(p).parse(text)
    return invariance_residue(f, invariance_ideal(degree))


# --- the invariant solver ---------------------------------------------------

_ansatz_rings = {}


def _ansatz_ring(p):
    if p not in _ansatz_rings:
        _ansatz_rings[p] = RingSpec(
            p,
            ("q1", "q2", "q3", "q4", "q5", "e6"),
            (4, 8, 12, 16, 20, 12),
        )
    return _ansatz_rings[p]


class InvariantProblem:
    """One degree's monomial ansatz against one ideal.

    The ansatz runs over every monomial of the topological degree in the
    classes q1..q5 and the six variable Euler class; when the ideal carries
    a power of q1 the matching multiples can be omitted, since they are
    invariant for free.
    """

    def __init__(self, p, degree, ideal, skip_q1_multiples=False, reflection=None):
        if not any(kind == idealred.C1T7SQ for kind, _ in ideal.parts):
            raise ValueError("solver ideals must contain the squared pair ideal")
        self.p = p
        self.degree = degree
        self.ideal = ideal
        self.reflection = reflection
        bound = None
        if skip_q1_multiples:
            bound = ideal.q_exponent() if ideal.has_qpower() else 1
        monomials = monomials_of_degree(_ansatz_ring(p), degree)
        if bound is not None:
            monomials = [m for m in monomials if m[0] < bound]
        if not monomials:
            raise ValueError("empty ansatz in degree %d" % degree)
        self.ansatz = tuple(monomials)

    def monomial_label(self, exps):
        ring = _ansatz_ring(self.p)
        return ring.monomial(exps).render()

    def labels(self):
        return tuple(self.monomial_label(m) for m in self.ansatz)


class SolutionSpace:
    """Solutions of one problem as echelonized coefficient vectors mod p."""

    def __init__(self, problem, basis):
        self.problem = problem
        self.basis = tuple(tuple(v) for v in basis)
        self._ech = SparseEchelon(problem.p)
        for v in self.basis:
            self._ech.insert({i: c for i, c in enumerate(v) if c})

    @property
    def dimension(self):
        return len(self.basis)

    def contains(self, coeffs):
        """Membership of a coefficient vector over the problem's ansatz."""
        p = self.problem.p
        vec = {}
        for i, c in enumerate(coeffs):
            c %= p
            if c:
                vec[i] = c
        return self._ech.contains(vec)

    def spin_polys(self):
        """Basis vectors as classes of the free model, i.e. modulo (t7)."""
        ring = spin6_ring(self.problem.p).ring
        out = []
        for v in self.basis:
            terms = {m: c for m, c in zip(self.problem.ansatz, v) if c}
            out.append(GradedPoly(ring, terms))
        return out


def _combine(vec, row, mult, p):
    out = dict(vec)
    for k, c in row.items():
        v = (out.get(k, 0) - mult * c) % p
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _nullspace(columns, p):
    """Kernel basis of the map sending unit vector j to columns[j]."""
    rows = {}
    nulls = []
    for j, col in enumerate(columns):
        vec = {}
        for k, c in col.items():
            c %= p
            if c:
                vec[k] = c
        tag = {j: 1}
        while vec:
            k = min(vec)
            stored = rows.get(k)
            if stored is None:
                inv = pow(vec[k], -1, p)
                vec = {kk: cc * inv % p for kk, cc in vec.items()}
                tag = {kk: cc * inv % p for kk, cc in tag.items()}
                rows[k] = (vec, tag)
                tag = None
                break
            mult = vec[k]
            vec = _combine(vec, stored[0], mult, p)
            tag = _combine(tag, stored[1], mult, p)
        if tag is not None:
            nulls.append(tag)
    return nulls


def _rref(vectors, width, p):
    """Reduced row echelon form of sparse vectors over indices 0..width-1."""
    ech = SparseEchelon(p)
    for v in vectors:
        ech.insert(v)
    pivots = sorted(ech.rows)
    rows = [dict(ech.rows[k]) for k in pivots]
    for i in range(len(rows) - 1, -1, -1):
        for j in range(i + 1, len(rows)):
            c = rows[i].get(pivots[j])
            if c:
                rows[i] = _combine(rows[i], rows[j], c, p)
    return [tuple(row.get(i, 0) for i in range(width)) for row in rows]


def _is_phi1(reflection, p):
    if reflection is None:
        return True
    ring = reflection.ring
    if ring == t_ring(p):
        c1 = _table(p).c(1).scale(Fraction(-1, 4))
        return all(
            reflection.images[nm] == ring.var(nm) + c1 for nm in ring.names
        )
    if ring == idealred.u_ring(p):
        return all(
            reflection.images[nm] == _phi1_u(p).images[nm] for nm in ring.names
        )
    return False


def _general_residues(problem):
    """Residues by direct torus expansion, for an arbitrary reflection."""
    tab = _table(problem.p)
    classes = [tab.q(i) for i in range(1, 6)] + [tab.e6()]
    out = []
    for exps in problem.ansatz:
        mono = tab.ring.one()
        for cls, e in zip(classes, exps):
            for _ in range(e):
                mono = mono * cls
        image = problem.reflection(mono)
        out.append(idealred.reduce(image - mono, problem.ideal))
    return out


def solve_phi1_invariants(problem):
    """Coefficient vectors a with phi1(sum a_M M) - sum a_M M in the ideal.

    Residues of the ansatz monomials are reduced to canonical u-coordinate
    form; with a q1 power in the ideal they are further cut down by the
    echelonized span of the matching graded slice, and the kernel of the
    resulting linear map is the solution space.
    """
    p = problem.p
    if _is_phi1(problem.reflection, p):
        residues = [
            _phi1_residue_nf(_ansatz_form(p, m)) for m in problem.ansatz
        ]
    else:
        residues = _general_residues(problem)
    if problem.ideal.has_qpower():
        ech = idealred._slice_echelon(
            problem.ideal, idealred.u_ring(p), problem.degree
        )
        vectors = [ech.reduce_vector(r.terms) for r in residues]
    else:
        vectors = [dict(r.terms) for r in residues]
    nulls = _nullspace(vectors, p)
    basis = _rref(nulls, len(problem.ansatz), p)
    return SolutionSpace(problem, basis)


# --- degree classifications -------------------------------------------------

PARAMETER_COUNTS = {4: 1, 12: 2, 16: 3, 20: 2, 24: 3, 28: 2, 36: 4}

_CONCLUSION_P1 = {4: 0, 12: 0, 16: 0, 20: 2, 24: 2, 28: 1, 36: 1}

_STATED_PRODUCTS = {
    4: ((4,),),
    12: ((12,), (4, 4, 4)),
    16: ((16,), (12, 4), (4, 4, 4, 4)),
    20: ((20,), (16, 4)),
    24: ((24,), (20, 4), (12, 12)),
    28: ((28,), (16, 12)),
    36: ((36,), (24, 12), (20, 16), (12, 12, 12)),
}


def stated_products(degree, p):
    """Catalog products allowed in one degree's classification."""
    out = []
    for names in _STATED_PRODUCTS[degree]:
        f = xbar(names[0], p)
        for nm in names[1:]:
            f = f * xbar(nm, p)
        out.append(f)
    return out


def _truncated_echelon(polys, k, p):
    """Echelon span of free model classes with p1 powers >= k dropped."""
    ech = SparseEchelon(p)
    vectors = []
    for f in polys:
        vec = {m: c for m, c in f.terms.items() if k == 0 or m[0] < k}
        vectors.append(vec)
        ech.insert(vec)
    return ech, vectors


class DegreeClassification:
    """Solution space of one degree compared with the catalog span."""

    __slots__ = (
        "p",
        "degree",
        "space",
        "parameter_count",
        "span_matches",
        "catalog_inside",
    )

    def __init__(self, p, degree, space, parameter_count, span_matches, catalog_inside):
        self.p = p
        self.degree = degree
        self.space = space
        self.parameter_count = parameter_count
        self.span_matches = span_matches
        self.catalog_inside = catalog_inside

    @property
    def passed(self):
        return (
            self.catalog_inside
            and self.span_matches
            and self.parameter_count == PARAMETER_COUNTS[self.degree]
        )

    def __repr__(self):
        return (
            "DegreeClassification(degree=%d, p=%d, parameters=%d, "
            "span_matches=%r, catalog_inside=%r)"
            % (
                self.degree,
                self.p,
                self.parameter_count,
                self.span_matches,
                self.catalog_inside,
            )
        )


def classify_degree(p, degree):
    """Solve one degree and compare against the stated catalog span.

    The solution space and the span of catalog products are both pushed to
    the free model and truncated by the degree's p1 power; the comparison
    asks for equal spans there, and for every catalog product to sit inside
    the solution space before truncation.
    """
    ideal = invariance_ideal(degree)
    skip = degree in (28, 36)
    problem = InvariantProblem(p, degree, ideal, skip_q1_multiples=skip)
    space = solve_phi1_invariants(problem)

    index = {m: i for i, m in enumerate(problem.ansatz)}
    inside = True
    stated = stated_products(degree, p)
    for f in stated:
        coeffs = [0] * len(problem.ansatz)
        ok = True
        for m, c in f.terms.items():
            i = index.get(m)
            if i is None:
                if skip and m[0] >= 1:
                    continue
                ok = False
                break
            coeffs[i] = c
        inside = inside and ok and space.contains(coeffs)

    k = _CONCLUSION_P1[degree]
    sol_ech, _ = _truncated_echelon(space.spin_polys(), k, p)
    cat_ech, cat_vecs = _truncated_echelon(stated, k, p)
    matches = cat_ech.rank == sol_ech.rank and all(
        sol_ech.contains(v) for v in cat_vecs
    )
    return DegreeClassification(p, degree, space, sol_ech.rank, matches, inside)
