"""Exact multivariate polynomials over the Gaussian rationals Q(i).

Coefficients are :class:`GaussianRational` values stored as an integer
triple ``(a, b, d)`` meaning ``(a + b i) / d`` with ``d > 0`` and
``gcd(a, b, d) == 1``.  Polynomials are sparse maps from exponent tuples to
nonzero coefficients; the canonical order is graded-lex with z1 > z2 > ...
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

Exponent = Tuple[int, ...]


class ParseError(ValueError):
    """Malformed polynomial text; ``position`` is a 0-based character index."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NotDivisible(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# Gaussian rationals


class GaussianRational:
    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        re, im = Fraction(re), Fraction(im)
        d = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        g = math.gcd(math.gcd(a, b), d)
        if g != 1:
            a, b, d = a // g, b // g, d // g
        self._a, self._b, self._d = a, b, d

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "GaussianRational":
        obj = cls.__new__(cls)
        if d < 0:
            a, b, d = -a, -b, -d
        obj._set(a, b, d)
        return obj

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)) or isinstance(x, Rational):
            return cls._raw(int(Fraction(x).numerator), 0, int(Fraction(x).denominator))
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, float):
            return cls(Fraction(x))
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_real(self) -> bool:
        return self._b == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self._a, -self._b, self._d)

    def abs2(self) -> Fraction:
        """|x|^2 as an exact rational."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def __complex__(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    def to_mpc(self):
        import mpmath
        return mpmath.mpc(mpmath.mpf(self._a) / self._d, mpmath.mpf(self._b) / self._d)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        if self._d == o._d:
            return GaussianRational._raw(self._a + o._a, self._b + o._b, self._d)
        return GaussianRational._raw(self._a * o._d + o._a * self._d,
                                     self._b * o._d + o._b * self._d, self._d * o._d)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            return self + (-GaussianRational.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational._raw(self._a * o._a - self._b * o._b,
                                     self._a * o._b + self._b * o._a, self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self._a * self._a + self._b * self._b
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        # d (a - b i) / (a^2 + b^2)
        return GaussianRational._raw(self._d * self._a, -self._d * self._b, n)

    def __truediv__(self, other):
        try:
            return self * GaussianRational.coerce(other).inverse()
        except TypeError:
            return NotImplemented

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE_Q, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        re_, im_ = self.re, self.im
        if im_ == 0:
            return str(re_)
        mag = "i" if abs(im_) == 1 else f"{abs(im_)}*i"
        if re_ == 0:
            return mag if im_ > 0 else f"-{mag}"
        sign = "+" if im_ > 0 else "-"
        return f"({re_} {sign} {mag})"


ONE_Q = GaussianRational._raw(1, 0, 1)
ZERO_Q = GaussianRational._raw(0, 0, 1)
I_Q = GaussianRational._raw(0, 1, 1)


def _is_exact(x) -> bool:
    return isinstance(x, (GaussianRational, int, Fraction))


# ---------------------------------------------------------------------------
# term orders (only grlex is needed here; the ideal module has the full set)


def grlex_key(e: Exponent):
    return (sum(e), e)


# ---------------------------------------------------------------------------
# polynomials


class MultiPolynomial:
    """Immutable sparse polynomial in ``dim`` variables z1..z_dim."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Exponent, object] | None = None):
        if dim < 1:
            raise ValueError("dimension must be at least 1")
        self.dim = dim
        clean: Dict[Exponent, GaussianRational] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != dim or any(x < 0 for x in e):
                raise ValueError(f"bad exponent {e} for dimension {dim}")
            c = GaussianRational.coerce(c)
            if not c.is_zero():
                clean[e] = clean[e] + c if e in clean else c
                if clean[e].is_zero():
                    del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def _from_clean(cls, dim: int, terms: Dict[Exponent, GaussianRational]) -> "MultiPolynomial":
        obj = cls.__new__(cls)
        obj.dim = dim
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "MultiPolynomial":
        return cls._from_clean(dim, {})

    @classmethod
    def constant(cls, dim: int, c) -> "MultiPolynomial":
        c = GaussianRational.coerce(c)
        return cls._from_clean(dim, {} if c.is_zero() else {(0,) * dim: c})

    @classmethod
    def variable(cls, dim: int, j: int) -> "MultiPolynomial":
        """The coordinate z_j (1-based)."""
        if not 1 <= j <= dim:
            raise ValueError(f"variable z{j} out of range for dimension {dim}")
        e = [0] * dim
        e[j - 1] = 1
        return cls._from_clean(dim, {tuple(e): ONE_Q})

    @classmethod
    def monomial(cls, e: Sequence[int], c=1) -> "MultiPolynomial":
        return cls(len(e), {tuple(e): c})

    # basic queries --------------------------------------------------------
    @property
    def terms(self) -> Dict[Exponent, GaussianRational]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Exponent, GaussianRational]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, e: Sequence[int]) -> GaussianRational:
        return self._terms.get(tuple(e), ZERO_Q)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def constant_term(self) -> GaussianRational:
        return self._terms.get((0,) * self.dim, ZERO_Q)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, j: int) -> int:
        """Degree in z_j (1-based); -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(e[j - 1] for e in self._terms)

    def variables(self) -> frozenset:
        """1-based indices of variables that actually occur."""
        out = set()
        for e in self._terms:
            out.update(i + 1 for i, x in enumerate(e) if x)
        return frozenset(out)

    def leading(self, key=grlex_key) -> Tuple[Exponent, GaussianRational]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=key)
        return e, self._terms[e]

    def monic(self, key=grlex_key) -> "MultiPolynomial":
        if not self._terms:
            return self
        _, lc = self.leading(key)
        if lc == ONE_Q:
            return self
        return self.scale(lc.inverse())

    def sorted_terms(self, key=grlex_key) -> list:
        return sorted(self._terms.items(), key=lambda t: key(t[0]), reverse=True)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "MultiPolynomial":
        if isinstance(other, MultiPolynomial):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        return MultiPolynomial.constant(self.dim, other)

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            if e in out:
                s = out[e] + c
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return MultiPolynomial._from_clean(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPolynomial._from_clean(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            return self + (-self._coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "MultiPolynomial":
        c = GaussianRational.coerce(c)
        if c.is_zero():
            return MultiPolynomial.zero(self.dim)
        return MultiPolynomial._from_clean(self.dim, {e: v * c for e, v in self._terms.items()})

    def shift(self, e: Exponent, c=ONE_Q) -> "MultiPolynomial":
        """Multiply by the term c * z^e."""
        c = GaussianRational.coerce(c)
        if c.is_zero():
            return MultiPolynomial.zero(self.dim)
        return MultiPolynomial._from_clean(
            self.dim, {tuple(a + b for a, b in zip(k, e)): v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPolynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        o = self._coerce(other)
        out: Dict[Exponent, GaussianRational] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                if e in out:
                    out[e] = out[e] + p
                else:
                    out[e] = p
        return MultiPolynomial._from_clean(self.dim, {e: c for e, c in out.items() if not c.is_zero()})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = MultiPolynomial.constant(self.dim, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, MultiPolynomial):
            return self.dim == other.dim and self._terms == other._terms
        try:
            return self == MultiPolynomial.constant(self.dim, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def conjugate_coefficients(self) -> "MultiPolynomial":
        return MultiPolynomial._from_clean(self.dim, {e: c.conjugate() for e, c in self._terms.items()})

    def reflect(self, degrees: Sequence[int] | None = None) -> "MultiPolynomial":
        """z^n conj(P(1/conj z)) with n the multidegree (or ``degrees``)."""
        if degrees is None:
            degrees = [self.degree_in(j) for j in range(1, self.dim + 1)]
        out = {}
        for e, c in self._terms.items():
            out[tuple(n - x for n, x in zip(degrees, e))] = c.conjugate()
        return MultiPolynomial._from_clean(self.dim, out)

    # structure ------------------------------------------------------------
    def coefficients_in(self, j: int) -> Dict[int, "MultiPolynomial"]:
        """Write P = sum_k c_k z_j^k; returns {k: c_k} (c_k free of z_j)."""
        groups: Dict[int, Dict[Exponent, GaussianRational]] = {}
        for e, c in self._terms.items():
            k = e[j - 1]
            e2 = e[: j - 1] + (0,) + e[j:]
            groups.setdefault(k, {})[e2] = c
        return {k: MultiPolynomial._from_clean(self.dim, t) for k, t in groups.items()}

    def substitute(self, j: int, value) -> "MultiPolynomial":
        """Exact substitution z_j := value (value in Q(i)); dimension is kept."""
        value = GaussianRational.coerce(value)
        out: Dict[Exponent, GaussianRational] = {}
        powers = {}
        for e, c in self._terms.items():
            k = e[j - 1]
            if k not in powers:
                powers[k] = value ** k
            v = c * powers[k]
            if v.is_zero():
                continue
            e2 = e[: j - 1] + (0,) + e[j:]
            out[e2] = out[e2] + v if e2 in out else v
        return MultiPolynomial._from_clean(self.dim, {e: c for e, c in out.items() if not c.is_zero()})

    def restrict(self, keep: Sequence[int]) -> "MultiPolynomial":
        """Re-index onto the variables ``keep`` (others must not occur)."""
        idx = [k - 1 for k in keep]
        out = {}
        for e, c in self._terms.items():
            if any(x for i, x in enumerate(e) if i not in idx):
                raise ValueError("polynomial involves a dropped variable")
            out[tuple(e[i] for i in idx)] = c
        return MultiPolynomial._from_clean(len(idx), out)

    def embed(self, dim: int, positions: Sequence[int]) -> "MultiPolynomial":
        """Inverse of :meth:`restrict`: variable k goes to z_{positions[k]}."""
        out = {}
        for e, c in self._terms.items():
            full = [0] * dim
            for k, x in zip(positions, e):
                full[k - 1] = x
            out[tuple(full)] = c
        return MultiPolynomial._from_clean(dim, out)

    def univariate_coefficients(self) -> list:
        """Dense ascending coefficient list for a polynomial in one variable."""
        vs = self.variables()
        if len(vs) > 1:
            raise ValueError("not univariate")
        if not self._terms:
            return []
        j = next(iter(vs)) if vs else 1
        deg = self.degree_in(j)
        out = [ZERO_Q] * (deg + 1)
        for e, c in self._terms.items():
            out[e[j - 1]] = c
        return out

    # display --------------------------------------------------------------
    def __repr__(self):
        return f"MultiPolynomial({self.dim}, {to_text(self)!r})"

    def __str__(self):
        return to_text(self)


# ---------------------------------------------------------------------------
# parsing and printing

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+[eE][-+]?\d+)|(\d+)|(z\d*)|([iI])|(\*\*|[-+*/^()]))")


def parse(text: str, dim: int) -> MultiPolynomial:
    """Parse a polynomial over Q(i) in variables z1..z_dim.

    Grammar: sums, products, ``^`` or ``**`` with integer exponents, integer and
    rational literals (``3/2``), the imaginary unit ``i``.  Division is only
    allowed by nonzero constants.  Floating-point literals are rejected.
    """
    text = text.replace("−", "-")
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", len(text) - len(text[pos:].lstrip()))
        start = m.start(m.lastindex)
        if m.group(1):
            raise ParseError("floating-point literal not allowed; use a rational like 3/2", start)
        if m.group(2):
            tokens.append(("num", int(m.group(2)), start))
        elif m.group(3):
            name = m.group(3)
            if name == "z":
                if dim != 1:
                    raise ParseError("bare 'z' is only allowed in one variable", start)
                k = 1
            else:
                k = int(name[1:])
            if not 1 <= k <= dim:
                raise ParseError(f"variable {name} out of range for dimension {dim}", start)
            tokens.append(("var", k, start))
        elif m.group(4):
            tokens.append(("i", None, start))
        else:
            op = m.group(5)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    parser = _Parser(tokens, dim)
    out = parser.expr()
    if parser.peek()[0] != "end":
        raise ParseError("unexpected token", parser.peek()[2])
    return out


class _Parser:
    def __init__(self, tokens, dim):
        self.tokens = tokens
        self.i = 0
        self.dim = dim

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def is_op(self, *ops):
        t = self.peek()
        return t[0] == "op" and t[1] in ops

    def expr(self):
        out = self.term()
        while self.is_op("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.unary()
        while self.is_op("*", "/") or self.peek()[0] in ("num", "var", "i") or self.is_op("("):
            if self.is_op("*", "/"):
                _, op, at = self.take()
            else:
                op, at = "*", self.peek()[2]
            rhs = self.unary()
            if op == "*":
                out = out * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise ParseError("division only by a nonzero constant", at)
                out = out.scale(rhs.constant_term().inverse())
        return out

    def unary(self):
        if self.is_op("-"):
            self.take()
            return -self.unary()
        if self.is_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.is_op("^"):
            self.take()
            t = self.take()
            if t[0] != "num":
                raise ParseError("exponent must be a nonnegative integer", t[2])
            return base ** t[1]
        return base

    def atom(self):
        kind, val, at = self.take()
        if kind == "num":
            return MultiPolynomial.constant(self.dim, val)
        if kind == "var":
            return MultiPolynomial.variable(self.dim, val)
        if kind == "i":
            return MultiPolynomial.constant(self.dim, I_Q)
        if kind == "op" and val == "(":
            out = self.expr()
            t = self.take()
            if not (t[0] == "op" and t[1] == ")"):
                raise ParseError("expected ')'", t[2])
            return out
        if kind == "end":
            raise ParseError("unexpected end of input", at)
        raise ParseError(f"unexpected token {val!r}", at)


def _monomial_text(e: Exponent) -> str:
    parts = []
    for j, x in enumerate(e, start=1):
        if x == 1:
            parts.append(f"z{j}")
        elif x > 1:
            parts.append(f"z{j}^{x}")
    return "*".join(parts)


def to_text(P: MultiPolynomial) -> str:
    """Human-readable form that :func:`parse` reads back exactly."""
    if P.is_zero():
        return "0"
    chunks = []
    for e, c in P.sorted_terms():
        mono = _monomial_text(e)
        cs = str(c)
        if "/" in cs and not cs.startswith("("):
            cs = f"({cs})"
        if not mono:
            chunks.append(cs)
        elif c == ONE_Q:
            chunks.append(mono)
        elif c == -ONE_Q:
            chunks.append(f"-{mono}")
        else:
            chunks.append(f"{cs}*{mono}")
    out = chunks[0]
    for ch in chunks[1:]:
        out += f" - {ch[1:]}" if ch.startswith("-") else f" + {ch}"
    return out


def _frac_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def serialize(P: MultiPolynomial) -> list:
    """Canonical term list: ``"re_num/re_den/im_num/im_den:e1,...,ed"``, grlex descending."""
    return [f"{_frac_text(c.re)}/{_frac_text(c.im)}:{','.join(map(str, e))}"
            for e, c in P.sorted_terms()]


def deserialize(terms: Iterable[str], dim: int) -> MultiPolynomial:
    out = {}
    for s in terms:
        coeff, _, exps = s.partition(":")
        a, b, c, d = (int(x) for x in coeff.split("/"))
        e = tuple(int(x) for x in exps.split(",")) if exps else ()
        if len(e) != dim:
            raise ValueError(f"term {s!r} does not match dimension {dim}")
        out[e] = GaussianRational(Fraction(a, b), Fraction(c, d))
    return MultiPolynomial(dim, out)


# ---------------------------------------------------------------------------
# evaluation and derivatives


def evaluate(P: MultiPolynomial, point: Sequence):
    """Horner evaluation.  Exact inputs give a GaussianRational; otherwise the
    numeric type of the inputs (complex, mpmath.mpc, ...) is used."""
    if len(point) != P.dim:
        raise ValueError(f"point has {len(point)} coordinates, expected {P.dim}")
    exact = all(_is_exact(x) for x in point)
    if exact:
        pt = [GaussianRational.coerce(x) for x in point]
        conv = lambda c: c
    else:
        pt = list(point)
        if any(type(x).__module__.startswith("mpmath") for x in pt):
            conv = GaussianRational.to_mpc
        else:
            conv = complex
    return _horner(list(P.items()), pt, 0, conv, ZERO_Q if exact else 0)


def _horner(terms, pt, j, conv, zero):
    if j == len(pt):
        return conv(terms[0][1]) if terms else zero
    groups: Dict[int, list] = {}
    for e, c in terms:
        groups.setdefault(e[j], []).append((e, c))
    if not groups:
        return zero
    top = max(groups)
    acc = zero
    for k in range(top, -1, -1):
        acc = acc * pt[j]
        if k in groups:
            acc = acc + _horner(groups[k], pt, j + 1, conv, zero)
    return acc


def derivative(P: MultiPolynomial, var: int, order: int = 1) -> MultiPolynomial:
    """Partial derivative d^order / dz_var^order."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if not 1 <= var <= P.dim:
        raise ValueError(f"variable z{var} out of range")
    if order == 0:
        return P
    out = {}
    j = var - 1
    for e, c in P.items():
        k = e[j]
        if k < order:
            continue
        f = math.perm(k, order)
        out[e[:j] + (k - order,) + e[j + 1:]] = c * f
    return MultiPolynomial._from_clean(P.dim, out)


# ---------------------------------------------------------------------------
# division


def _coeff_in(P: MultiPolynomial, j: int) -> Dict[int, MultiPolynomial]:
    return P.coefficients_in(j)


def _lead_in(P: MultiPolynomial, j: int) -> Tuple[int, MultiPolynomial]:
    cs = P.coefficients_in(j)
    k = max(cs)
    return k, cs[k]


def divide_exact(P: MultiPolynomial, D: MultiPolynomial) -> MultiPolynomial:
    """Quotient Q with P = Q * D; raises :class:`NotDivisible` otherwise."""
    if D.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if P.dim != D.dim:
        raise ValueError("dimension mismatch")
    if P.is_zero():
        return P
    if D.is_constant():
        return P.scale(D.constant_term().inverse())
    # multivariate division with respect to grlex; exact iff remainder vanishes
    ld, lc = D.leading()
    lc_inv = lc.inverse()
    rem = dict(P._terms)
    quot: Dict[Exponent, GaussianRational] = {}
    dterms = list(D.items())
    while rem:
        e = max(rem, key=grlex_key)
        if any(a < b for a, b in zip(e, ld)):
            raise NotDivisible(f"{to_text(D)} does not divide {to_text(P)}")
        shift = tuple(a - b for a, b in zip(e, ld))
        c = rem[e] * lc_inv
        quot[shift] = c
        for de, dc in dterms:
            t = tuple(a + b for a, b in zip(de, shift))
            v = rem.get(t, ZERO_Q) - dc * c
            if v.is_zero():
                rem.pop(t, None)
            else:
                rem[t] = v
    return MultiPolynomial._from_clean(P.dim, quot)


def divides(D: MultiPolynomial, P: MultiPolynomial) -> bool:
    try:
        divide_exact(P, D)
        return True
    except NotDivisible:
        return False


def pseudo_remainder(A: MultiPolynomial, B: MultiPolynomial, j: int) -> MultiPolynomial:
    """prem_{z_j}(A, B) = lc(B)^(deg A - deg B + 1) A mod B, as polynomials in z_j."""
    n, lcb = _lead_in(B, j)
    m = A.degree_in(j)
    if m < n:
        return A
    e = m - n + 1
    R = A
    unit = [0] * A.dim
    while not R.is_zero() and R.degree_in(j) >= n:
        k, lcr = _lead_in(R, j)
        unit[j - 1] = k - n
        R = lcb * R - (lcr * B).shift(tuple(unit))
        e -= 1
    return R * (lcb ** e) if e > 0 else R


# ---------------------------------------------------------------------------
# gcd


def content(P: MultiPolynomial, j: int) -> MultiPolynomial:
    """gcd of the coefficients of P viewed as a polynomial in z_j."""
    g = MultiPolynomial.zero(P.dim)
    for c in sorted(P.coefficients_in(j).values(), key=len):
        g = _gcd(g, c)
        if g.is_constant() and not g.is_zero():
            return MultiPolynomial.constant(P.dim, 1)
    return g


def primitive_part(P: MultiPolynomial, j: int) -> MultiPolynomial:
    return divide_exact(P, content(P, j))


def _gcd(P: MultiPolynomial, Q: MultiPolynomial) -> MultiPolynomial:
    if P.is_zero():
        return Q
    if Q.is_zero():
        return P
    one = MultiPolynomial.constant(P.dim, 1)
    if P.is_constant() or Q.is_constant():
        return one
    vp, vq = P.variables(), Q.variables()
    x = max(vp | vq)
    if x not in vp:
        return _gcd(P, content(Q, x))
    if x not in vq:
        return _gcd(content(P, x), Q)
    cp, cq = content(P, x), content(Q, x)
    c = _gcd(cp, cq)
    A, B = divide_exact(P, cp), divide_exact(Q, cq)
    if A.degree_in(x) < B.degree_in(x):
        A, B = B, A
    # subresultant PRS in z_x over the coefficient domain
    g = h = one
    while True:
        delta = A.degree_in(x) - B.degree_in(x)
        R = pseudo_remainder(A, B, x)
        if R.is_zero():
            break
        if R.degree_in(x) == 0:
            B = one
            break
        A, B = B, divide_exact(R, g * h ** delta)
        g = _lead_in(A, x)[1]
        if delta == 1:
            h = g
        elif delta > 1:
            h = divide_exact(g ** delta, h ** (delta - 1))
    if not B.is_constant():
        B = primitive_part(B, x)
    return (c * B).monic()


def gcd(P: MultiPolynomial, Q: MultiPolynomial) -> MultiPolynomial:
    """Monic (under grlex) greatest common divisor."""
    if P.dim != Q.dim:
        raise ValueError("dimension mismatch")
    if P.is_zero() and Q.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    return _gcd(P, Q).monic()


def gcd_many(polys: Iterable[MultiPolynomial]) -> MultiPolynomial:
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        raise ValueError("gcd of an all-zero family is undefined")
    g = polys[0]
    for p in polys[1:]:
        g = _gcd(g, p)
        if g.is_constant():
            break
    return g.monic()


def squarefree_part(P: MultiPolynomial) -> MultiPolynomial:
    """Product of the distinct irreducible factors (monic)."""
    if P.is_constant():
        return MultiPolynomial.constant(P.dim, 1)
    # gcd(P, dP/dz_1, ..., dP/dz_d) = prod f_i^(k_i - 1) in characteristic zero
    g = P
    for j in sorted(P.variables()):
        g = _gcd(g, derivative(P, j))
        if g.is_constant():
            return P.monic()
    return divide_exact(P, g).monic()
