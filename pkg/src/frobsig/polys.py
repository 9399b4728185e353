# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Prime fields, polynomial rings over them and the canonical polynomial text format.

Polynomials are sympy ``PolyElement`` objects living in the sympy ring held by a :class:`PolyRing`. The wrapper
fixes the variable names, the prime field and the monomial order (degree reverse lexicographic by default, or a
two-block elimination order) and knows how to parse and print the text format used by configuration files and
reports.

"""

import functools
import re
from dataclasses import dataclass

from sympy import Symbol, isprime
from sympy.polys.domains import FiniteField
from sympy.polys.orderings import ProductOrder, grevlex, grlex, lex
from sympy.polys.rings import PolyElement
from sympy.polys.rings import PolyRing as SympyPolyRing

Poly = PolyElement

MAX_CHARACTERISTIC = 97
ORDERS = {"grevlex": grevlex, "grlex": grlex, "lex": lex}
NAME_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class PrimeField:
    """
    The field F_p with 2 <= p <= 97.

    Attributes:
        p (int): The characteristic
    """
    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, int):
            raise ValueError(f"characteristic must be an integer, got {self.p!r}")
        if not 2 <= self.p <= MAX_CHARACTERISTIC:
            raise ValueError(f"characteristic {self.p} outside the supported range 2..{MAX_CHARACTERISTIC}")
        if not isprime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")

    @functools.cached_property
    def domain(self):
        return FiniteField(self.p, symmetric=True)

    def normalize(self, c):
        """Representative of ``c`` in [0, p)."""
        return int(c) % self.p

    def inv(self, c):
        c = self.normalize(c)
        if c == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return pow(c, -1, self.p)

    def is_power(self, q):
        """True if ``q`` is p^e for some e >= 1."""
        if q < self.p:
            return False
        while q % self.p == 0:
            q //= self.p
        return q == 1


@functools.lru_cache(maxsize=None)
def block_order(n, k):
    """
    Elimination order on n variables: grevlex on the first k, ties broken by grevlex on the rest.

    Cached so that rings built twice with the same split compare equal.
    """
    return ProductOrder((grevlex, lambda m: m[:k]), (grevlex, lambda m: m[k:]))


class PolyRing:
    """
    Polynomial ring F_p[x_1, ..., x_n] with a fixed monomial order.

    Attributes:
        field (PrimeField): Coefficient field
        vars (tuple): Variable names in order
        order (str): Name of the monomial order: 'grevlex', 'grlex', 'lex' or 'block'
        block (int): Size of the first block when order is 'block', otherwise None
        ring: The underlying sympy ring whose elements are the polynomials of this ring
    """

    def __init__(self, field, vars, order="grevlex", block=None):
        vars = tuple(vars)
        if not vars:
            raise ValueError("a polynomial ring needs at least one variable")
        for name in vars:
            if not isinstance(name, str) or not NAME_PATTERN.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        if len(set(vars)) != len(vars):
            raise ValueError(f"variable names are not distinct: {', '.join(vars)}")
        if block is not None:
            if not 0 < block < len(vars):
                raise ValueError(f"block size {block} must split {len(vars)} variables")
            order, monomial_order = "block", block_order(len(vars), block)
        elif order in ORDERS:
            monomial_order = ORDERS[order]
        else:
            raise ValueError(f"unknown monomial order {order!r}")
        self.field = field
        self.vars = vars
        self.order = order
        self.block = block
        self.ring = SympyPolyRing(tuple(Symbol(v) for v in vars), field.domain, monomial_order)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.ring == other.ring

    def __hash__(self):
        return hash(self.ring)

    def __repr__(self):
        suffix = f", block={self.block}" if self.block else ""
        return f"PolyRing(F_{self.p}[{', '.join(self.vars)}], order={self.order}{suffix})"

    @property
    def p(self):
        return self.field.p

    @property
    def n(self):
        return len(self.vars)

    @property
    def gens(self):
        return self.ring.gens

    @property
    def zero(self):
        return self.ring.zero

    @property
    def one(self):
        return self.ring.one

    def gen(self, name):
        return self.ring.gens[self.vars.index(name)]

    def constant(self, c):
        return self.ring(int(c))

    def monomial(self, exponents, coeff=1):
        return self.ring.from_dict({tuple(int(a) for a in exponents): int(coeff)})

    def from_terms(self, terms):
        """Polynomial from a mapping of exponent tuples to integer coefficients."""
        return self.ring.from_dict({tuple(int(a) for a in m): int(c) for m, c in terms.items()})

    def parse(self, text):
        return poly_parse(text, self)

    def format(self, f):
        return poly_format(f)

    def with_block_order(self, k):
        return PolyRing(self.field, self.vars, block=k)

    def extend(self, names, block=True):
        """
        Ring with ``names`` prepended to the variables.

        Args:
            names (list): New variable names, must not clash with existing ones
            block (bool): If True, use the elimination order with the new variables as the first block

        Returns:
            The extended :class:`PolyRing`
        """
        names = tuple(names)
        if block:
            return PolyRing(self.field, names + self.vars, block=len(names))
        return PolyRing(self.field, names + self.vars, order=self.order if self.order != "block" else "grevlex")

    def fresh_name(self, stem):
        """A variable name starting with ``stem`` that is not used in this ring."""
        name = stem
        while name in self.vars:
            name += "_"
        return name

    def convert(self, f):
        """
        Move ``f`` into this ring, matching variables by name.

        Raises:
            ValueError: If ``f`` involves a variable this ring does not have
        """
        if f.ring == self.ring:
            return f
        source = [s.name for s in f.ring.symbols]
        used = {i for m in f.itermonoms() for i, a in enumerate(m) if a}
        missing = [source[i] for i in sorted(used) if source[i] not in self.vars]
        if missing:
            raise ValueError(f"variables {', '.join(missing)} are not in {self!r}")
        index = [self.vars.index(name) if name in self.vars else None for name in source]
        terms = {}
        for m, c in f.iterterms():
            target = [0] * self.n
            for i, a in enumerate(m):
                if a:
                    target[index[i]] = a
            terms[tuple(target)] = c
        return self.ring.from_dict(terms)


def total_degree(f):
    """Total degree of ``f``; -1 for the zero polynomial."""
    return max((sum(m) for m in f.itermonoms()), default=-1)


def is_homogeneous(f):
    return len({sum(m) for m in f.itermonoms()}) <= 1


def truncate(f, q):
    """Drop the terms of ``f`` lying in the bracket power m^[q] of the maximal ideal."""
    return f.ring.from_dict({m: c for m, c in f.iterterms() if max(m, default=0) < q})


def frobenius(f, q):
    """f^q, computed by scaling exponents (coefficients in F_p are fixed by Frobenius)."""
    return f.ring.from_dict({tuple(a * q for a in m): c for m, c in f.iterterms()})


def characteristic(f):
    return f.ring.domain.mod


class ParseError(ValueError):
    """
    Raised when polynomial text cannot be read.

    Attributes:
        position (int): Offset of the offending character or token in ``text``
        text (str): The text being parsed
    """

    def __init__(self, message, position, text):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^()]))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if match is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _splits_into(name, names):
    """True if ``name`` is a concatenation of at least two declared names."""
    @functools.lru_cache(maxsize=None)
    def split(rest):
        if rest == "":
            return 0
        best = None
        for v in names:
            if rest.startswith(v):
                tail = split(rest[len(v):])
                if tail is not None:
                    best = max(best or 0, tail + 1)
        return best
    count = split(name)
    return count is not None and count >= 2


class _Parser:
    def __init__(self, text, ring):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        token = self.tokens[self.i]
        self.i += 1
        return token

    def fail(self, message, token=None):
        token = token or self.peek()
        raise ParseError(message, token[2], self.text)

    def expression(self):
        kind, value, _ = self.peek()
        sign = 1
        if kind == "op" and value in "+-":
            self.take()
            sign = -1 if value == "-" else 1
        result = self.term() * sign
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                t = self.term()
                result = result + t if value == "+" else result - t
            else:
                return result

    def term(self):
        result = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.take()
                result = result * self.factor()
            elif kind in ("int", "name") or (kind == "op" and value == "("):
                self.fail("implicit multiplication by juxtaposition is not allowed")
            else:
                return result

    def factor(self):
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.take()
            kind, value, pos = self.take()
            if kind != "int":
                raise ParseError("exponent must be a non-negative integer", pos, self.text)
            base = base ** int(value)
        return base

    def atom(self):
        token = self.take()
        kind, value, pos = token
        if kind == "int":
            return self.ring.constant(int(value))
        if kind == "name":
            if value in self.ring.vars:
                return self.ring.gen(value)
            if _splits_into(value, tuple(self.ring.vars)):
                raise ParseError("implicit multiplication by juxtaposition is not allowed", pos, self.text)
            raise ParseError(f"unknown variable {value!r}", pos, self.text)
        if kind == "op" and value == "(":
            inner = self.expression()
            kind, value, pos = self.take()
            if (kind, value) != ("op", ")"):
                raise ParseError("expected ')'", pos, self.text)
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos, self.text)
        raise ParseError(f"unexpected {value!r}", pos, self.text)


def poly_parse(text, ring):
    """
    Parse polynomial text over ``ring``.

    Accepts integer literals, declared variable names, ``+ - * ^`` and parentheses. Multiplication must be
    written with ``*``.

    Args:
        text (str): Polynomial text such as ``"x^3+y^3+x*y*z+u*v"``
        ring (PolyRing): Ring the variables are declared in

    Returns:
        The polynomial as an element of ``ring.ring``

    Raises:
        ParseError: On a syntax error, an unknown variable or juxtaposed factors
    """
    parser = _Parser(str(text), ring)
    if parser.peek()[0] == "end":
        raise ParseError("empty polynomial", 0, str(text))
    result = parser.expression()
    if parser.peek()[0] != "end":
        parser.fail(f"unexpected {parser.peek()[1]!r}")
    return result


def _monomial_text(names, m):
    factors = []
    for name, a in zip(names, m):
        if a == 1:
            factors.append(name)
        elif a > 1:
            factors.append(f"{name}^{a}")
    return "*".join(factors)


def poly_format(f):
    """
    Canonical text of ``f``: terms in descending ring order, coefficients in the symmetric range.

    >>> poly_format(3*x**2*y - z + 1)  # over F_7
    '3*x^2*y - z + 1'
    """
    if not f:
        return "0"
    p = characteristic(f)
    names = [s.name for s in f.ring.symbols]
    pieces = []
    for m, c in f.terms():
        c = int(c) % p
        negative = c > p // 2
        magnitude = p - c if negative else c
        mono = _monomial_text(names, m)
        if not mono:
            body = str(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{magnitude}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(pieces)
