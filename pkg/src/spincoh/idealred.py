"""Normal forms and membership tests modulo the structured ideals in use.

Every congruence computed downstream happens modulo an ideal built from a
handful of rigid shapes, and this module knows exactly those shapes: variable
substitutions (t7 -> 0, p4 -> -3*p2^2), powers I^k of the ideal spanned by
named free generators, the square (c1,t7)^2 of the seven-variable torus ring
handled through an exact u-coordinate change, and a principal piece (q1^n)
that is settled by graded linear algebra instead of a normal form.  There is
deliberately no Groebner machinery here: reduce projects onto representative
monomials, member_graded row-reduces a single graded slice, and
theta_stability_report certifies that a reduced power applied to a class
known only modulo an ideal cannot leak into chosen target monomials.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations_with_replacement

from .modp_poly import GradedPoly, RingMismatch, RingSpec, monomials_of_degree
from .symfun import SpinElement, SpinRing, SymClassTable, t_ring

SUBSTITUTION = "substitution"
C1T7SQ = "c1t7sq"
QPOWER = "qpower"
AUGPOWER = "augpower"

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PLAIN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_POWER = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\^([0-9]+)$")


class BasisError(ValueError):
    """An augmentation power was applied outside a free generator basis."""


class IdealSpec:
    """A reduction ideal, stored as an ordered sum of primitive parts.

    kind is 'substitution', 'c1t7sq', 'qpower', 'augpower', or 'sum' once
    parts have been added together.  Substitution rules must be triangular:
    replacements may mention other substituted generators but never in a
    cycle, and the composed rules are applied in one pass so that reduce is
    idempotent.  The (q1^n) part is invisible to reduce; congruence modulo
    an ideal containing it is decided by member_graded on the difference.
    """

    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = tuple(parts)
        if not self.parts:
            raise ValueError("ideal needs at least one part")

    # --- constructors ------------------------------------------------------

    @classmethod
    def substitution(cls, rules):
        """Rules {name: replacement}; replacement 0 just kills the generator."""
        items = tuple(
            (nm, _canon_replacement(r)) for nm, r in sorted(rules.items())
        )
        _substitution_order(items)
        return cls(((SUBSTITUTION, items),))

    @classmethod
    def vanishing(cls, *names):
        """The ideal (names...), reducing by generator -> 0."""
        return cls.substitution({nm: 0 for nm in names})

    @classmethod
    def c1_t7_squared(cls):
        return cls(((C1T7SQ, None),))

    @classmethod
    def q_power(cls, n):
        if n < 1:
            raise ValueError("need a positive power of q1")
        return cls(((QPOWER, n),))

    @classmethod
    def aug_power(cls, k, names=None):
        """I^k for I the ideal of the named generators (all variables if None)."""
        if k < 1:
            raise ValueError("need a positive augmentation power")
        return cls(((AUGPOWER, (None if names is None else tuple(names), k)),))

    def __add__(self, other):
        if not isinstance(other, IdealSpec):
            return NotImplemented
        return IdealSpec(self.parts + other.parts)

    # --- structure ----------------------------------------------------------

    @property
    def kind(self):
        return self.parts[0][0] if len(self.parts) == 1 else "sum"

    def has_qpower(self):
        return any(kind == QPOWER for kind, _ in self.parts)

    def q_exponent(self):
        ns = [data for kind, data in self.parts if kind == QPOWER]
        if len(ns) != 1:
            raise ValueError("expected exactly one (q1^n) part")
        return ns[0]

    def __eq__(self, other):
        return isinstance(other, IdealSpec) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return "IdealSpec(%s)" % self.text()

    def text(self):
        """Canonical CLI syntax, e.g. (p1)+I^3 or (c1,t7)^2+(q1^2)."""
        chunks = []
        for kind, data in self.parts:
            if kind == SUBSTITUTION:
                gens = []
                for nm, repl in data:
                    if _repl_is_zero(repl):
                        gens.append(nm)
                    else:
                        gens.append("%s-(%s)" % (nm, _repl_text(repl)))
                chunks.append("(%s)" % ",".join(gens))
            elif kind == C1T7SQ:
                chunks.append("(c1,t7)^2")
            elif kind == QPOWER:
                chunks.append("(q1^%d)" % data if data > 1 else "(q1)")
            else:
                names, k = data
                if names is None:
                    chunks.append("I^%d" % k)
                elif len(names) == 1:
                    chunks.append(
                        "(%s)" % names[0] if k == 1 else "(%s^%d)" % (names[0], k)
                    )
                else:
                    body = "(%s)" % ",".join(names)
                    chunks.append(body if k == 1 else "%s^%d" % (body, k))
        return "+".join(chunks)


# --- substitution rule handling ---------------------------------------------

def _canon_replacement(repl):
    if isinstance(repl, (GradedPoly, int, Fraction)):
        return repl
    if isinstance(repl, str):
        return repl.strip()
    raise TypeError("replacement must be an int, Fraction, text, or GradedPoly")


def _repl_is_zero(repl):
    if isinstance(repl, GradedPoly):
        return repl.is_zero()
    if isinstance(repl, str):
        return repl == "0"
    return repl == 0


def _repl_text(repl):
    if isinstance(repl, GradedPoly):
        return repl.render()
    return str(repl)


def _replacement_names(repl):
    if isinstance(repl, GradedPoly):
        used = set()
        for mono in repl.terms:
            for i, e in enumerate(mono):
                if e:
                    used.add(repl.ring.names[i])
        return used
    if isinstance(repl, str):
        return set(_NAME.findall(repl))
    return set()


def _substitution_order(items):
    """Dependency-first order of the rule names; rejects cyclic rule sets."""
    deps = {nm: _replacement_names(repl) for nm, repl in items}
    if len(deps) != len(items):
        raise ValueError("conflicting substitution rules for one generator")
    order = []
    state = {}

    def visit(nm, trail):
        mark = state.get(nm)
        if mark == "done":
            return
        if mark == "open":
            raise ValueError(
                "substitution rules are not triangular: %s"
                % " -> ".join(trail + [nm])
            )
        state[nm] = "open"
        for dep in sorted(deps[nm] & deps.keys()):
            visit(dep, trail + [nm])
        state[nm] = "done"
        order.append(nm)

    for nm, _ in items:
        visit(nm, [])
    return order


_mapping_cache = {}


def _resolved_mapping(items, ring):
    """Compose triangular rules into a single substitution map for the ring."""
    key = (items, ring)
    mapping = _mapping_cache.get(key)
    if mapping is not None:
        return mapping
    repls = dict(items)
    mapping = {}
    for nm in _substitution_order(items):
        i = ring.index(nm)
        f = _as_poly(repls[nm], ring)
        if mapping:
            f = f.substitute(mapping)
        if not f.is_zero() and (
            not f.is_homogeneous() or f.topdegree() != ring.degrees[i]
        ):
            raise ValueError(
                "replacement of %s must be homogeneous of degree %d"
                % (nm, ring.degrees[i])
            )
        mapping[nm] = f
    _mapping_cache[key] = mapping
    return mapping


def _as_poly(repl, ring):
    if isinstance(repl, GradedPoly):
        if repl.ring != ring:
            raise RingMismatch("replacement lives in a different ring")
        return repl
    if isinstance(repl, str):
        return ring.parse(repl)
    return ring.const(repl)


# --- the u-coordinate change -------------------------------------------------

_u_rings = {}


def u_ring(p):
    """Z/p[u1..u7] in degree 2, with u1 = c1 and u_i = t_i for i >= 2."""
    if p not in _u_rings:
        _u_rings[p] = RingSpec(p, ["u%d" % i for i in range(1, 8)], [2] * 7)
    return _u_rings[p]


def _is_t_ring(ring):
    return ring == t_ring(ring.p)


def _is_u_ring(ring):
    return ring == u_ring(ring.p)


def to_u_coords(f):
    """Rewrite a torus-ring element in u-coordinates (exact and invertible)."""
    ring = f.ring
    if not _is_t_ring(ring):
        raise ValueError("u-coordinates are defined on the 7-variable torus ring")
    ur = u_ring(ring.p)
    us = {nm: ur.var("u" + nm[1:]) for nm in ring.names}
    t1 = us["t1"]
    for nm in ("t2", "t3", "t4", "t5", "t6"):
        t1 = t1 - us[nm]
    t1 = t1 - us["t7"].scale(2)
    mapping = dict(us)
    mapping["t1"] = t1
    return f.substitute(mapping, target=ur)


def from_u_coords(g):
    """Inverse of to_u_coords."""
    ring = g.ring
    if not _is_u_ring(ring):
        raise ValueError("expected a u-coordinate element")
    tr = t_ring(ring.p)
    ts = {nm: tr.var("t" + nm[1:]) for nm in ring.names}
    c1 = ts["u7"].scale(2)
    for nm in ("u1", "u2", "u3", "u4", "u5", "u6"):
        c1 = c1 + ts[nm]
    mapping = {"u%d" % i: ts["u%d" % i] for i in range(2, 8)}
    mapping["u1"] = c1
    return g.substitute(mapping, target=tr)


# --- reduce -------------------------------------------------------------------

def _free_form(f):
    if isinstance(f, SpinElement):
        return f.spin.from_z(f)
    if isinstance(f, GradedPoly):
        return f
    raise TypeError("expected a GradedPoly or SpinElement")


def _combined_substitution(ideal):
    items = {}
    for kind, data in ideal.parts:
        if kind != SUBSTITUTION:
            continue
        for nm, repl in data:
            if nm in items and items[nm] != repl:
                raise ValueError("conflicting substitution rules for %r" % nm)
            items[nm] = repl
    return tuple(sorted(items.items()))


def _apply_homs(f, ideal):
    items = _combined_substitution(ideal)
    if items:
        f = f.substitute(_resolved_mapping(items, f.ring))
    if any(kind == C1T7SQ for kind, _ in ideal.parts):
        if _is_t_ring(f.ring):
            f = to_u_coords(f)
        elif not _is_u_ring(f.ring):
            raise ValueError("(c1,t7)^2 reduction needs the torus ring")
    return f


def _apply_drops(f, ideal):
    ring = f.ring
    kept = dict(f.terms)
    for kind, data in ideal.parts:
        if kind == C1T7SQ:
            i1, i7 = ring.index("u1"), ring.index("u7")
            kept = {m: c for m, c in kept.items() if m[i1] + m[i7] < 2}
        elif kind == AUGPOWER:
            names, k = data
            if names is None:
                idx = range(ring.nvars)
            else:
                have = set(ring.names)
                missing = [nm for nm in names if nm not in have]
                if missing:
                    raise BasisError(
                        "generator %s is not a free variable of %r"
                        % (missing[0], ring)
                    )
                idx = [ring.index(nm) for nm in names]
            kept = {m: c for m, c in kept.items() if sum(m[i] for i in idx) < k}
    return GradedPoly(ring, kept)


def reduce(f, ideal):
    """Normal form of f modulo the ideal.

    SpinElements are first rewritten in the free generator basis.  The
    result lives in f's own ring unless the ideal has a (c1,t7)^2 part, in
    which case normal forms are u-coordinate polynomials carrying at most
    one factor from {u1, u7}.  (q1^n) parts are ignored here; use
    member_graded or congruent when they matter.
    """
    return _apply_drops(_apply_homs(_free_form(f), ideal), ideal)


def congruent(f, g, ideal):
    """Whether f and g agree modulo the ideal."""
    f = _free_form(f)
    g = _free_form(g)
    if ideal.has_qpower():
        diff = f - g
        return diff.is_zero() or member_graded(diff, ideal)
    return reduce(f, ideal) == reduce(g, ideal)


# --- graded membership ---------------------------------------------------------

class SparseEchelon:
    """Incremental echelon basis of sparse Z/p vectors.

    Vectors are dicts keyed by orderable column labels; a vector's pivot is
    its smallest label, every pivot row is normalized, and elimination runs
    in ascending label order, so results do not depend on insertion order
    beyond the span itself.
    """

    __slots__ = ("p", "rows")

    def __init__(self, p):
        self.p = p
        self.rows = {}

    def reduce_vector(self, vec):
        """Remainder of vec after elimination by the stored rows."""
        p = self.p
        work = {}
        for k, c in vec.items():
            c %= p
            if c:
                work[k] = c
        remainder = {}
        while work:
            k = min(work)
            c = work.pop(k)
            row = self.rows.get(k)
            if row is None:
                remainder[k] = c
                continue
            for kk, cc in row.items():
                if kk == k:
                    continue
                v = (work.get(kk, 0) - c * cc) % p
                if v:
                    work[kk] = v
                else:
                    work.pop(kk, None)
        return remainder

    def insert(self, vec):
        """Absorb vec; returns True when it enlarged the span."""
        rem = self.reduce_vector(vec)
        if not rem:
            return False
        k = min(rem)
        inv = pow(rem[k], -1, self.p)
        self.rows[k] = {kk: cc * inv % self.p for kk, cc in rem.items()}
        return True

    def contains(self, vec):
        return not self.reduce_vector(vec)

    @property
    def rank(self):
        return len(self.rows)


_tables = {}


def _class_table(p):
    if p not in _tables:
        _tables[p] = SymClassTable(p)
    return _tables[p]


def _q1_poly(ring):
    if "q1" in ring.names:
        return ring.var("q1")
    if _is_t_ring(ring):
        return _class_table(ring.p).q(1)
    if _is_u_ring(ring):
        return to_u_coords(_class_table(ring.p).q(1))
    raise ValueError("no class q1 available in %r" % ring)


def _representative_monomials(ideal, ring, degree):
    """Normal-form monomials of the degree slice, as exponent tuples."""
    preds = []
    have = set(ring.names)
    for kind, data in ideal.parts:
        if kind == SUBSTITUTION:
            idx = [ring.index(nm) for nm, _ in data if nm in have]
            if idx:
                preds.append(lambda m, idx=idx: all(m[i] == 0 for i in idx))
        elif kind == C1T7SQ:
            i1, i7 = ring.index("u1"), ring.index("u7")
            preds.append(lambda m, i1=i1, i7=i7: m[i1] + m[i7] < 2)
        elif kind == AUGPOWER:
            names, k = data
            idx = list(range(ring.nvars)) if names is None else [
                ring.index(nm) for nm in names
            ]
            preds.append(lambda m, idx=idx, k=k: sum(m[i] for i in idx) < k)
    return [
        m
        for m in monomials_of_degree(ring, degree)
        if all(pred(m) for pred in preds)
    ]


_slice_cache = {}


def _slice_echelon(ideal, ring, degree):
    """Echelonized span of the reduced multiples {monomial * q1^n} in a slice."""
    key = (ideal, ring, degree)
    ech = _slice_cache.get(key)
    if ech is not None:
        return ech
    n = ideal.q_exponent()
    qnf = reduce(_q1_poly(ring) ** n, ideal)
    nring = qnf.ring
    ech = SparseEchelon(ring.p)
    if not qnf.is_zero():
        cofactor_degree = degree - 4 * n
        for m in _representative_monomials(ideal, nring, cofactor_degree):
            col = _apply_drops(nring.monomial(m) * qnf, ideal)
            if not col.is_zero():
                ech.insert(col.terms)
    _slice_cache[key] = ech
    return ech


def member_graded(f, ideal):
    """Exact membership test for one graded slice.

    f must be homogeneous.  It is reduced by every part except (q1^n); the
    remainder is then tested against the span of the reduced multiples
    {monomial * q1^n} of the same degree by sparse row reduction over Z/p.
    Without a (q1^n) part, membership is a zero normal form.
    """
    f = _free_form(f)
    if f.is_zero():
        return True
    if not f.is_homogeneous():
        raise ValueError("member_graded needs a homogeneous element")
    nf = reduce(f, ideal)
    if nf.is_zero():
        return True
    if not ideal.has_qpower():
        return False
    ech = _slice_echelon(ideal, f.ring, f.topdegree())
    return ech.contains(nf.terms)


# --- generators and the stability report ---------------------------------------

def ideal_generators(ideal, ring):
    """Explicit ring elements generating the ideal (aug powers expanded).

    Augmentation-power products divisible by a vanished variable are
    dropped; the linear generator already spans them.
    """
    gens = []
    killed = set()
    for kind, data in ideal.parts:
        if kind == SUBSTITUTION:
            mapping = _resolved_mapping(data, ring)
            for nm, _ in data:
                if mapping[nm].is_zero():
                    killed.add(nm)
    for kind, data in ideal.parts:
        if kind == SUBSTITUTION:
            mapping = _resolved_mapping(data, ring)
            for nm, _ in data:
                gens.append(ring.var(nm) - mapping[nm])
        elif kind == C1T7SQ:
            if not _is_t_ring(ring):
                raise ValueError("(c1,t7)^2 lives in the torus ring")
            c1 = _class_table(ring.p).c(1)
            t7 = ring.var("t7")
            gens.extend([c1 * c1, c1 * t7, t7 * t7])
        elif kind == QPOWER:
            gens.append(_q1_poly(ring) ** data)
        else:
            names, k = data
            if names is None:
                names = ring.names
            have = set(ring.names)
            missing = [nm for nm in names if nm not in have]
            if missing:
                raise BasisError(
                    "generator %s is not a free variable of %r" % (missing[0], ring)
                )
            for combo in combinations_with_replacement(names, k):
                if killed.intersection(combo):
                    continue
                g = ring.one()
                for nm in combo:
                    g = g * ring.var(nm)
                gens.append(g)
    return gens


class ThetaStabilityReport:
    """Outcome of the ambiguity check for one ideal, operation, and target set.

    entries pairs each ideal generator (rendered) with its witnesses; a
    witness (cofactor, target, coefficient) shows how applying the operation
    to generator*cofactor reaches a target monomial after reduction.  passed
    means no generator produced a witness, so coefficient extraction at the
    targets is well defined for classes known only modulo the ideal.
    """

    __slots__ = ("ideal_text", "op", "targets", "entries")

    def __init__(self, ideal_text, op, targets, entries):
        self.ideal_text = ideal_text
        self.op = op
        self.targets = tuple(targets)
        self.entries = tuple(entries)

    @property
    def passed(self):
        return all(not wit for _, wit in self.entries)

    def lines(self):
        out = [
            "theta stability %s: %s under %r at targets %s"
            % (
                "PASS" if self.passed else "FAIL",
                self.ideal_text,
                self.op,
                ", ".join(self.targets),
            )
        ]
        clean = sum(1 for _, wit in self.entries if not wit)
        out.append(
            "  %d of %d generators contribute nothing" % (clean, len(self.entries))
        )
        for gen, wit in self.entries:
            for cof, tgt, c in wit:
                out.append(
                    "  %s * (%s) reaches %s with coefficient %d" % (gen, cof, tgt, c)
                )
        return out

    def __repr__(self):
        return "<ThetaStabilityReport %s>" % ("PASS" if self.passed else "FAIL")


def _op_applier(op, ring):
    if _is_t_ring(ring):
        if ring.p != op.p:
            raise ValueError("prime mismatch between ring and operation")
        return op.apply_t
    m = ring.nvars
    spin = SpinRing(m, ring.p)
    if spin.ring == ring:
        return lambda f: op.apply_spin(f, spin)
    raise ValueError("no reduced-power action known on %r" % ring)


def theta_stability_report(ideal, op, targets, source=None):
    """Certify coefficient extraction at the targets against ideal ambiguity.

    targets are monomials of one common ring and degree, written in the
    ideal's normal-form coordinates.  For every ideal generator g and every
    monomial cofactor h of the complementary degree, op(g*h) is reduced
    modulo the ideal and any surviving target coefficient is reported.

    source, when given, restricts the perturbations to its own generators;
    use it when a class is known modulo a smaller ideal than the one the
    extraction reduces by.
    """
    polys = list(targets)
    if not polys:
        raise ValueError("no target monomials")
    for t in polys:
        if not isinstance(t, GradedPoly) or len(t.terms) != 1:
            raise ValueError("targets must be single monomials")
    tring = polys[0].ring
    if any(t.ring != tring for t in polys):
        raise ValueError("targets live in different rings")
    degrees = {t.topdegree() for t in polys}
    if len(degrees) != 1:
        raise ValueError("targets must share one degree")
    opring = t_ring(tring.p) if _is_u_ring(tring) else tring
    apply_op = _op_applier(op, opring)
    class_degree = degrees.pop() - op.degree_shift
    entries = []
    for g in ideal_generators(ideal if source is None else source, opring):
        witnesses = []
        hdeg = class_degree - g.topdegree()
        if not g.is_zero() and hdeg >= 0:
            for m in monomials_of_degree(opring, hdeg):
                red = reduce(apply_op(g * opring.monomial(m)), ideal)
                if red.is_zero():
                    continue
                if red.ring != tring:
                    raise ValueError(
                        "targets must be written in the reduced coordinates %r"
                        % red.ring
                    )
                for t in polys:
                    c = red.coefficient_of(t)
                    if c:
                        witnesses.append(
                            (opring.monomial(m).render(), t.render(), c)
                        )
        entries.append((g.render(signed=True), tuple(witnesses)))
    text = ideal.text()
    if source is not None:
        text = "%s into %s" % (source.text(), text)
    return ThetaStabilityReport(text, op, [t.render() for t in polys], entries)


# --- CLI ideal text -------------------------------------------------------------

def _split_top(text, sep):
    chunks = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced parentheses in ideal text")
        elif ch == sep and depth == 0:
            chunks.append(text[start:i])
            start = i + 1
    if depth:
        raise ValueError("unbalanced parentheses in ideal text")
    chunks.append(text[start:])
    return chunks


def _parse_group(body, power):
    gens = [g.strip() for g in _split_top(body, ",")]
    if any(not g for g in gens):
        raise ValueError("empty generator in ideal text")
    if power is not None:
        if set(gens) == {"c1", "t7"} and power == 2:
            return IdealSpec.c1_t7_squared()
        if all(_PLAIN.match(g) for g in gens):
            if gens == ["q1"]:
                return IdealSpec.q_power(power)
            return IdealSpec.aug_power(power, gens)
        raise ValueError("a powered group must list plain generator names")
    rules = {}
    extra = []
    for gen in gens:
        if _PLAIN.match(gen):
            if gen == "q1":
                extra.append(IdealSpec.q_power(1))
            else:
                rules[gen] = 0
            continue
        mpow = _POWER.match(gen)
        if mpow:
            nm, k = mpow.group(1), int(mpow.group(2))
            if nm == "q1":
                extra.append(IdealSpec.q_power(k))
            else:
                extra.append(IdealSpec.aug_power(k, (nm,)))
            continue
        lead = _NAME.match(gen)
        if not lead or gen[lead.end()] not in "+-":
            raise ValueError("cannot read ideal generator %r" % gen)
        nm = lead.group(0)
        sign, rest = gen[lead.end()], gen[lead.end() + 1 :].strip()
        rules[nm] = rest if sign == "-" else "-(%s)" % rest
    out = IdealSpec.substitution(rules) if rules else None
    for part in extra:
        out = part if out is None else out + part
    if out is None:
        raise ValueError("empty ideal text")
    return out


def parse_ideal(text):
    """Parse CLI ideal syntax: (t7), (p1)+I^3, (c1,t7)^2+(q1^2), (p1,p4+3*p2^2,e6)."""
    text = re.sub(r"\s+", "", text)
    total = None
    for chunk in _split_top(text, "+"):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError("empty summand in ideal text")
        maug = re.match(r"^I\^([0-9]+)$", chunk)
        if maug:
            part = IdealSpec.aug_power(int(maug.group(1)))
        else:
            mgrp = re.match(r"^\((.*)\)(?:\^([0-9]+))?$", chunk, re.S)
            if not mgrp:
                raise ValueError("cannot read ideal summand %r" % chunk)
            inner, pw = mgrp.group(1), mgrp.group(2)
            part = _parse_group(inner, int(pw) if pw else None)
        total = part if total is None else total + part
    if total is None:
        raise ValueError("empty ideal text")
    return total
