"""Exact arithmetic over Z/p and sparse graded multivariate polynomials.

Polynomials are stored as dicts mapping exponent tuples to nonzero canonical
residues.  Every operation is pure; values are never mutated after
construction.  Term order is graded lexicographic (weighted by the declared
generator degrees, ties broken by the exponent tuple with the first variable
most significant), so printed output is byte-stable.
"""

from __future__ import annotations

from fractions import Fraction

EXPONENT_LIMIT = 1 << 8


class RingMismatch(ValueError):
    pass


class DenominatorVanishes(ZeroDivisionError):
    pass


class SubstitutionIncomplete(KeyError):
    pass


class DerivationDegreeError(ValueError):
    pass


class ExponentOverflow(OverflowError):
    pass


class ParseError(ValueError):
    pass


def coeff_from_rational(numerator, denominator, p):
    """Reduce numerator/denominator mod p, exactly.

    The fraction is reduced first, so (35, 35, 5) is fine while (1, 35, 5)
    raises DenominatorVanishes.
    """
    if denominator == 0:
        raise DenominatorVanishes("division by zero")
    q = Fraction(numerator, denominator)
    if q.denominator % p == 0:
        raise DenominatorVanishes(
            "denominator of %d/%d vanishes mod %d" % (numerator, denominator, p)
        )
    return q.numerator * pow(q.denominator, -1, p) % p


class RingSpec:
    """A graded polynomial ring Z/p[names] with declared generator degrees."""

    __slots__ = ("p", "names", "degrees", "_index")

    def __init__(self, p, names, degrees):
        names = tuple(names)
        degrees = tuple(degrees)
        if len(names) != len(set(names)):
            raise ValueError("duplicate variable names")
        if len(names) != len(degrees):
            raise ValueError("need one degree per variable")
        if any(d <= 0 or d % 2 for d in degrees):
            raise ValueError("degrees must be positive even integers")
        self.p = p
        self.names = names
        self.degrees = degrees
        self._index = {nm: i for i, nm in enumerate(names)}

    def __eq__(self, other):
        return (
            isinstance(other, RingSpec)
            and self.p == other.p
            and self.names == other.names
            and self.degrees == other.degrees
        )

    def __hash__(self):
        return hash((self.p, self.names, self.degrees))

    def __repr__(self):
        return "RingSpec(p=%d, %s)" % (self.p, ",".join(self.names))

    @property
    def nvars(self):
        return len(self.names)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise KeyError("unknown variable %r in %r" % (name, self)) from None

    def monomial_degree(self, exps):
        return sum(e * d for e, d in zip(exps, self.degrees))

    def zero(self):
        return GradedPoly(self, {})

    def one(self):
        return self.const(1)

    def const(self, c):
        c = self._coeff(c)
        if c == 0:
            return self.zero()
        return GradedPoly(self, {(0,) * self.nvars: c})

    def _coeff(self, c):
        if isinstance(c, Fraction):
            return coeff_from_rational(c.numerator, c.denominator, self.p)
        return c % self.p

    def var(self, name, power=1):
        exps = [0] * self.nvars
        exps[self.index(name)] = power
        return self.monomial(tuple(exps))

    def monomial(self, exps, coeff=1):
        exps = tuple(exps)
        if len(exps) != self.nvars:
            raise ValueError("exponent vector has wrong length")
        _check_exps(exps)
        c = self._coeff(coeff)
        if c == 0:
            return self.zero()
        return GradedPoly(self, {exps: c})

    def from_terms(self, terms):
        out = {}
        for exps, c in terms.items():
            exps = tuple(exps)
            _check_exps(exps)
            c = self._coeff(c)
            if c:
                out[exps] = c
        return GradedPoly(self, out)

    def parse(self, text):
        return _parse(self, text)


def _check_exps(exps):
    for e in exps:
        if e < 0:
            raise ValueError("negative exponent")
        if e >= EXPONENT_LIMIT:
            raise ExponentOverflow("exponent %d exceeds limit %d" % (e, EXPONENT_LIMIT))


class GradedPoly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # --- basic structure -------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def support(self):
        return self.terms.keys()

    def coefficient_of(self, monomial):
        """Stored coefficient of a monomial (exponent tuple or monomial poly)."""
        if isinstance(monomial, GradedPoly):
            if len(monomial.terms) != 1:
                raise ValueError("not a monomial")
            (monomial,) = monomial.terms
        return self.terms.get(tuple(monomial), 0)

    def topdegree(self):
        """Largest topological degree among the terms (-1 for zero)."""
        if not self.terms:
            return -1
        deg = self.ring.monomial_degree
        return max(deg(m) for m in self.terms)

    def is_homogeneous(self):
        if not self.terms:
            return True
        deg = self.ring.monomial_degree
        it = iter(self.terms)
        d = deg(next(it))
        return all(deg(m) == d for m in it)

    def homogeneous_part(self, d):
        deg = self.ring.monomial_degree
        return GradedPoly(
            self.ring, {m: c for m, c in self.terms.items() if deg(m) == d}
        )

    def grlex_key(self, exps):
        return (self.ring.monomial_degree(exps), exps)

    def leading_monomial(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.grlex_key)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.grlex_key(t[0]), reverse=True)

    # --- arithmetic ------------------------------------------------------

    def _need_same_ring(self, other):
        if self.ring != other.ring:
            raise RingMismatch("%r vs %r" % (self.ring, other.ring))

    def __eq__(self, other):
        if isinstance(other, GradedPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, int):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        self._need_same_ring(other)
        p = self.ring.p
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = (out.get(m, 0) + c) % p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return GradedPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return GradedPoly(self.ring, {m: p - c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = self.ring._coeff(c)
        if c == 0:
            return self.ring.zero()
        if c == 1:
            return self
        p = self.ring.p
        return GradedPoly(self.ring, {m: c * v % p for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        self._need_same_ring(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        p = self.ring.p
        out = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                v = (out.get(m, 0) + ca * cb) % p
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        for m in out:
            _check_exps(m)
        return GradedPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base0 = base
            k >>= 1
            if k:
                base = base0 * base0
        return result

    # --- substitution and derivation -------------------------------------

    def substitute(self, mapping, target=None):
        """Ring map sending some variables to polynomials of the target ring.

        Variables absent from the mapping are sent to the same-named variable
        of the target ring (which defaults to this polynomial's own ring).
        """
        ring = self.ring
        out_ring = target if target is not None else ring
        images = []
        for i, nm in enumerate(ring.names):
            if nm in mapping:
                img = mapping[nm]
                if isinstance(img, (int, Fraction)):
                    img = out_ring.const(img)
                if img.ring != out_ring:
                    raise RingMismatch("substitution image in wrong ring")
                images.append(img)
            else:
                images.append(out_ring.var(nm))
        pow_cache = [dict() for _ in range(ring.nvars)]

        def power(i, k):
            cache = pow_cache[i]
            if k not in cache:
                cache[k] = images[i] ** k
            return cache[k]

        total = out_ring.zero()
        for m, c in self.terms.items():
            term = out_ring.const(c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            total = total + term
        return total

    def derive(self, images):
        """Extend variable images to a derivation (Leibniz rule) and apply it.

        Unlisted variables are sent to zero.  Nonzero images must all shift
        the topological degree by the same amount.
        """
        ring = self.ring
        imgs = {}
        shift = None
        for nm, img in images.items():
            i = ring.index(nm)
            if isinstance(img, (int, Fraction)):
                img = ring.const(img)
            if img.ring != ring:
                raise RingMismatch("derivation image in wrong ring")
            if img.is_zero():
                continue
            if not img.is_homogeneous():
                raise DerivationDegreeError("image of %s is inhomogeneous" % nm)
            s = img.topdegree() - ring.degrees[i]
            if shift is None:
                shift = s
            elif s != shift:
                raise DerivationDegreeError(
                    "images shift degree by both %d and %d" % (shift, s)
                )
            imgs[i] = img
        p = ring.p
        out = ring.zero()
        for m, c in self.terms.items():
            for i, img in imgs.items():
                e = m[i]
                if not e:
                    continue
                lowered = list(m)
                lowered[i] = e - 1
                cof = ring.monomial(tuple(lowered), c * e % p)
                out = out + cof * img
        return out

    # --- printing ---------------------------------------------------------

    def render(self, signed=False):
        if not self.terms:
            return "0"
        p = self.ring.p
        names = self.ring.names
        parts = []
        for m, c in self.sorted_terms():
            if signed and c > p // 2:
                sign, mag = "-", p - c
            else:
                sign, mag = "+", c
            factors = []
            for nm, e in zip(names, m):
                if e == 1:
                    factors.append(nm)
                elif e > 1:
                    factors.append("%s^%d" % (nm, e))
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += " %s %s" % (sign, body)
        return text

    def __str__(self):
        return self.render()

    def __repr__(self):
        return "<%s>" % self.render()


# --- the spec's functional aliases ---------------------------------------

def poly_add(a, b):
    return a + b


def poly_mul(a, b):
    return a * b


def poly_scale(a, c):
    return a.scale(c)


def coefficient_of(f, monomial):
    return f.coefficient_of(monomial)


def monomials_of_degree(ring, topdegree):
    """Exponent tuples of every ring monomial in one topological degree.

    Enumerated in lexicographic order of the exponent tuple; degree zero
    yields just the constant monomial, negative degrees nothing.
    """
    if topdegree < 0:
        return []
    n = ring.nvars
    if n == 0:
        return [()] if topdegree == 0 else []
    degs = ring.degrees
    out = []
    exps = [0] * n

    def walk(i, remaining):
        d = degs[i]
        if i == n - 1:
            if remaining % d == 0 and remaining // d < EXPONENT_LIMIT:
                exps[i] = remaining // d
                out.append(tuple(exps))
                exps[i] = 0
            return
        for e in range(min(remaining // d, EXPONENT_LIMIT - 1) + 1):
            exps[i] = e
            walk(i + 1, remaining - e * d)
        exps[i] = 0

    walk(0, topdegree)
    return out


class LinearSubstitution:
    """A ring endomorphism determined by degree-2 variable images.

    Intended for reflection actions on rings whose generators all live in
    degree 2; apply with apply_substitution or by calling the object.
    """

    __slots__ = ("ring", "images", "involution")

    def __init__(self, ring, images, involution=False):
        self.ring = ring
        imgs = {}
        for nm, f in images.items():
            ring.index(nm)
            if isinstance(f, (int, Fraction)):
                f = ring.const(f)
            if f.ring != ring:
                raise RingMismatch("image in wrong ring")
            if not f.is_zero() and (
                not f.is_homogeneous() or f.topdegree() != ring.degrees[ring.index(nm)]
            ):
                raise ValueError("image of %s must be homogeneous of its degree" % nm)
            imgs[nm] = f
        self.images = imgs
        self.involution = involution

    def __call__(self, f):
        return apply_substitution(f, self)


def apply_substitution(f, s):
    if f.ring != s.ring:
        raise RingMismatch("polynomial and substitution disagree on the ring")
    missing = [nm for nm in f.ring.names if nm not in s.images]
    for m in f.terms:
        for i, e in enumerate(m):
            if e and f.ring.names[i] in missing:
                raise SubstitutionIncomplete(f.ring.names[i])
    return f.substitute(s.images)


def apply_derivation(f, images):
    return f.derive(images)


# --- single-divisor division ----------------------------------------------

def divmod_single(f, g):
    """Divide by one polynomial in graded-lex order; returns (quotient, rem).

    The remainder contains no monomial divisible by the leading monomial of
    g.  Since a single generator is a Groebner basis of the principal ideal
    it generates, rem == 0 is equivalent to membership in (g).
    """
    if f.ring != g.ring:
        raise RingMismatch("division across rings")
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    ring = f.ring
    p = ring.p
    lm = g.leading_monomial()
    lc_inv = pow(g.terms[lm], -1, p)
    quot = {}
    rem = {}
    work = dict(f.terms)
    key = f.grlex_key
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        q = tuple(a - b for a, b in zip(m, lm))
        if any(e < 0 for e in q):
            rem[m] = c
            continue
        factor = c * lc_inv % p
        quot[q] = (quot.get(q, 0) + factor) % p
        if quot[q] == 0:
            del quot[q]
        for gm, gc in g.terms.items():
            if gm == lm:
                continue  # cancelled exactly by construction
            mm = tuple(a + b for a, b in zip(q, gm))
            v = (work.get(mm, 0) - factor * gc) % p
            if v:
                work[mm] = v
            else:
                work.pop(mm, None)
    return GradedPoly(ring, quot), GradedPoly(ring, rem)


def exact_div(f, g):
    """Quotient f/g when g divides f exactly, else None."""
    q, r = divmod_single(f, g)
    return q if r.is_zero() else None


# --- parsing ---------------------------------------------------------------

def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ParseError("unexpected character %r at position %d" % (ch, i))
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, ring, text):
        self.ring = ring
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.take()
        if tok[0] != kind:
            raise ParseError("expected %s at position %d" % (kind, tok[2]))
        return tok

    def parse(self):
        f = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError("trailing input at position %d" % tok[2])
        return f

    def expr(self):
        sign = 1
        while self.peek()[0] in ("+", "-"):
            if self.take()[0] == "-":
                sign = -sign
        f = self.term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            sign = 1
            while self.peek()[0] in ("+", "-"):
                if self.take()[0] == "-":
                    sign = -sign
            f = f + self.term().scale(sign)
        return f

    def term(self):
        f = self.factor()
        while True:
            kind = self.peek()[0]
            if kind == "*":
                self.take()
                f = f * self.factor()
            elif kind in ("int", "name", "("):
                f = f * self.factor()
            else:
                return f

    def factor(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.expect("int")
            base = base ** tok[1]
        return base

    def atom(self):
        tok = self.take()
        if tok[0] == "int":
            num = tok[1]
            if self.peek()[0] == "/":
                self.take()
                den = self.expect("int")[1]
                return self.ring.const(Fraction(num, den))
            return self.ring.const(num)
        if tok[0] == "name":
            try:
                return self.ring.var(tok[1])
            except KeyError:
                raise ParseError(
                    "unknown variable %r at position %d" % (tok[1], tok[2])
                ) from None
        if tok[0] == "(":
            f = self.expr()
            self.expect(")")
            return f
        raise ParseError("unexpected token at position %d" % tok[2])


def _parse(ring, text):
    return _Parser(ring, text).parse()
