# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Gröbner bases and ideal calculus over F_p.

:func:`buchberger` computes reduced Gröbner bases with the sugar selection strategy and both Buchberger
criteria. :class:`Ideal` caches its reduced basis on first use; everything else (membership, colons,
intersections, bracket powers, dimension and colength) is built on top of that cache.

"""

import itertools
import logging
import math
import threading

import numpy as np

from frobsig.polys import frobenius, poly_format, total_degree

logger = logging.getLogger(__name__)


def _spoly(f, g, lcm):
    ring = f.ring
    return f.mul_monom(ring.monomial_div(lcm, f.LM)) - g.mul_monom(ring.monomial_div(lcm, g.LM))


def buchberger(polys):
    """
    Reduced Gröbner basis of the ideal generated by ``polys``.

    Pairs are processed in order of (sugar, lcm, index). A pair is skipped when its leading monomials are coprime,
    or when some third basis element's leading monomial divides their lcm and both of its pairs with the current
    pair are no longer pending.

    Args:
        polys: Polynomials of a single sympy ring

    Returns:
        list: The reduced basis, monic, sorted by leading monomial in descending order. Empty for the zero ideal
    """
    polys = [f for f in polys if f]
    if not polys:
        return []
    ring = polys[0].ring
    if any(f.is_ground for f in polys):
        return [ring.one]

    basis = []
    sugar = []
    pending = set()

    def add(h, s):
        h = h.monic()
        k = len(basis)
        basis.append(h)
        sugar.append(s)
        pending.update((i, k) for i in range(k))

    def pair_sugar(i, j, lcm):
        return max(sugar[i] + sum(lcm) - sum(basis[i].LM), sugar[j] + sum(lcm) - sum(basis[j].LM))

    for f in sorted(polys, key=lambda f: ring.order(f.LM)):
        h = f.rem(basis) if basis else f
        if h:
            if h.is_ground:
                return [ring.one]
            add(h, total_degree(f))

    reductions = 0
    while pending:
        i, j = min(pending, key=lambda ij: (pair_sugar(*ij, ring.monomial_lcm(basis[ij[0]].LM, basis[ij[1]].LM)),
                                            ring.order(ring.monomial_lcm(basis[ij[0]].LM, basis[ij[1]].LM)),
                                            ij))
        pending.discard((i, j))
        lm_i, lm_j = basis[i].LM, basis[j].LM
        lcm = ring.monomial_lcm(lm_i, lm_j)
        if not any(ring.monomial_gcd(lm_i, lm_j)):
            continue
        if any(k != i and k != j and ring.monomial_div(lcm, basis[k].LM) is not None
               and (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending
               for k in range(len(basis))):
            continue
        h = _spoly(basis[i], basis[j], lcm).rem(basis)
        reductions += 1
        if h:
            if h.is_ground:
                return [ring.one]
            add(h, pair_sugar(i, j, lcm))

    minimal = []
    for i, g in enumerate(basis):
        if any(ring.monomial_div(g.LM, h.LM) is not None and (h.LM != g.LM or j < i)
               for j, h in enumerate(basis) if j != i):
            continue
        minimal.append(g)
    if len(minimal) == 1:
        reduced = [minimal[0].monic()]
    else:
        reduced = [g.rem([h for h in minimal if h is not g]).monic() for g in minimal]
    reduced.sort(key=lambda g: ring.order(g.LM), reverse=True)
    logger.debug("Gröbner basis: %d generators in, %d out, %d reductions", len(polys), len(reduced), reductions)
    return reduced


class Ideal:
    """
    Ideal of a :class:`frobsig.polys.PolyRing` given by generators.

    The reduced Gröbner basis is computed at most once, by the first caller that needs it; concurrent callers wait
    for that computation.

    Attributes:
        ring (PolyRing): Ambient ring
        generators (tuple): Nonzero generators as given
    """

    def __init__(self, ring, generators=()):
        self.ring = ring
        gens = []
        for g in generators:
            if isinstance(g, str):
                g = ring.parse(g)
            else:
                g = ring.convert(g)
            if g:
                gens.append(g)
        self.generators = tuple(gens)
        self._basis = None
        self._lock = threading.Lock()

    @classmethod
    def unit(cls, ring):
        ideal = cls(ring, [ring.one])
        ideal._basis = (ring.one,)
        return ideal

    @classmethod
    def zero(cls, ring):
        ideal = cls(ring, [])
        ideal._basis = ()
        return ideal

    @classmethod
    def maximal(cls, ring):
        """The homogeneous maximal ideal (x_1, ..., x_n)."""
        ideal = cls(ring, ring.gens)
        ideal._basis = tuple(sorted(ring.gens, key=lambda g: ring.ring.order(g.LM), reverse=True))
        return ideal

    @property
    def groebner_basis(self):
        if self._basis is None:
            with self._lock:
                if self._basis is None:
                    self._basis = tuple(buchberger(self.generators))
        return self._basis

    def __repr__(self):
        return f"Ideal({', '.join(poly_format(g) for g in self.generators) or '0'})"

    def to_list(self):
        """Reduced Gröbner basis in canonical text form."""
        return [poly_format(g) for g in self.groebner_basis]

    @property
    def is_unit(self):
        return self.groebner_basis == (self.ring.one,)

    @property
    def is_zero(self):
        return not self.generators

    def reduce(self, f):
        basis = self.groebner_basis
        return f.rem(list(basis)) if basis and f else f

    def __contains__(self, f):
        if isinstance(f, str):
            f = self.ring.parse(f)
        return not self.reduce(self.ring.convert(f))

    def issubset(self, other):
        return all(g in other for g in self.generators)

    def __le__(self, other):
        return self.issubset(other)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.groebner_basis == other.groebner_basis

    __hash__ = None

    def __add__(self, other):
        if isinstance(other, Ideal):
            return Ideal(self.ring, self.generators + tuple(self.ring.convert(g) for g in other.generators))
        return Ideal(self.ring, self.generators + tuple(other))

    def __mul__(self, other):
        if not isinstance(other, Ideal):
            other = Ideal(self.ring, [other])
        return Ideal(self.ring, [f * self.ring.convert(g) for f in self.generators for g in other.generators])

    def power(self, k):
        # plain products of m^k carry 2^k generators
        result = Ideal.unit(self.ring)
        for _ in range(k):
            result = Ideal(self.ring, (result * self).groebner_basis)
        return result


class QuotientPresentation:
    """
    Graded quotient R = S/I of a polynomial ring, local at the ideal of the variables.

    Attributes:
        ambient (PolyRing): The polynomial ring S
        relations (Ideal): The ideal I, contained in the maximal ideal
    """

    def __init__(self, ambient, relations=()):
        if not isinstance(relations, Ideal):
            relations = Ideal(ambient, relations)
        for g in relations.generators:
            if g.const():
                raise ValueError(f"relation {poly_format(g)} has a nonzero constant term")
        self.ambient = ambient
        self.relations = relations
        self._dim = None

    def __repr__(self):
        rels = ", ".join(poly_format(g) for g in self.relations.generators)
        return f"F_{self.ambient.p}[{', '.join(self.ambient.vars)}]" + (f"/({rels})" if rels else "")

    @property
    def p(self):
        return self.ambient.p

    @property
    def n(self):
        return self.ambient.n

    @property
    def dim(self):
        """Krull dimension d, which is also the exponent δ of q in the F-signature normalization over F_p."""
        if self._dim is None:
            self._dim = krull_dim(self)
        return self._dim

    @property
    def is_regular(self):
        return self.relations.is_zero

    def maximal_ideal(self):
        return Ideal.maximal(self.ambient)

    def quotient(self, extra):
        """Presentation of R/J for an ideal J (generators or an Ideal) of the ambient ring."""
        if isinstance(extra, Ideal):
            extra = extra.generators
        return QuotientPresentation(self.ambient, self.relations + list(extra))

    def reduce(self, f):
        return self.relations.reduce(f)


def groebner(ideal):
    return list(ideal.groebner_basis)


def normal_form(f, ideal):
    """Remainder of ``f`` modulo the reduced basis of ``ideal``; zero exactly when f lies in the ideal."""
    return ideal.reduce(ideal.ring.convert(f))


def eliminate(polys, k):
    """Elements of a basis computed under a k-block elimination order that do not involve the first k variables."""
    return [g for g in polys if all(not any(m[:k]) for m in g.itermonoms())]


def intersect(first, second):
    """
    I ∩ J, by eliminating a tag variable t from t·I + (1 - t)·J.
    """
    ring = first.ring
    if first.is_zero or second.is_zero:
        return Ideal.zero(ring)
    if first.is_unit:
        return second
    if second.is_unit:
        return first
    tagged = ring.extend([ring.fresh_name("t")])
    t = tagged.gens[0]
    gens = [t * tagged.convert(f) for f in first.generators]
    gens += [(1 - t) * tagged.convert(g) for g in second.generators]
    kept = eliminate(buchberger(gens), 1)
    result = Ideal(ring, [ring.convert(g) for g in kept])
    return result


def _principal_colon(ideal, g):
    ring = ideal.ring
    if g in ideal:
        return Ideal.unit(ring)
    if len(ideal.generators) == 1:
        quotient, remainder = ideal.generators[0].div([g])
        if not remainder:
            return Ideal(ring, quotient)
    meet = intersect(ideal, Ideal(ring, [g]))
    return Ideal(ring, [h.exquo(g) for h in meet.groebner_basis])


def colon(first, second):
    """
    (I : J) = {f : f·J ⊆ I}, as the intersection of (I : g) over the generators g of J.

    Each (I : g) is (I ∩ (g))/g; when I = (h) is principal and g divides h the answer (h/g) is used directly.
    """
    ring = first.ring
    if second.is_zero:
        return Ideal.unit(ring)
    result = None
    for g in second.generators:
        part = _principal_colon(first, ring.convert(g))
        result = part if result is None else intersect(result, part)
        if result.is_zero:
            break
    return result


def bracket_power(ideal, q):
    """
    I^[q], generated by the q-th powers of the generators.

    A cached reduced basis of I is carried over: its q-th powers are the reduced basis of I^[q].
    """
    if not ideal.ring.field.is_power(q):
        raise ValueError(f"{q} is not a power of the characteristic {ideal.ring.p}")
    result = Ideal(ideal.ring, [frobenius(g, q) for g in ideal.generators])
    if ideal._basis is not None:
        result._basis = tuple(frobenius(g, q) for g in ideal._basis)
    return result


def _leading_monomials(ideal):
    return [g.LM for g in ideal.groebner_basis]


def krull_dim(presentation):
    """
    Krull dimension of S/I: the largest set of variables containing the support of no leading monomial of I.

    Args:
        presentation: A :class:`QuotientPresentation` or an :class:`Ideal`

    Returns:
        int: The dimension, -1 for the unit ideal
    """
    ideal = presentation.relations if isinstance(presentation, QuotientPresentation) else presentation
    n = ideal.ring.n
    if ideal.is_unit:
        return -1
    supports = [frozenset(i for i, a in enumerate(m) if a) for m in _leading_monomials(ideal)]
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            chosen = set(subset)
            if not any(s <= chosen for s in supports):
                return size
    return 0


def _staircase_bounds(ideal):
    """Per-variable exponent bound given by pure-power leading monomials, None where unbounded."""
    n = ideal.ring.n
    bounds = [None] * n
    for m in _leading_monomials(ideal):
        support = [i for i, a in enumerate(m) if a]
        if len(support) == 1:
            i = support[0]
            bounds[i] = m[i] if bounds[i] is None else min(bounds[i], m[i])
    return bounds


def standard_monomials(ideal):
    """
    Exponent vectors of the monomials outside the leading term ideal.

    Returns:
        list of tuples, or None when there are infinitely many
    """
    if ideal.is_unit:
        return []
    bounds = _staircase_bounds(ideal)
    if any(b is None for b in bounds):
        return None
    grid = np.indices(bounds).reshape(len(bounds), -1).T
    keep = np.ones(len(grid), dtype=bool)
    for m in _leading_monomials(ideal):
        keep &= ~np.all(grid >= np.asarray(m), axis=1)
    return [tuple(int(a) for a in row) for row in grid[keep]]


def colength(ideal):
    """
    dim_F S/I, the number of standard monomials.

    Returns:
        int, or math.inf when S/I is infinite dimensional
    """
    if ideal.is_unit:
        return 0
    bounds = _staircase_bounds(ideal)
    if any(b is None for b in bounds):
        return math.inf
    grid = np.indices(bounds).reshape(len(bounds), -1).T
    inside = np.zeros(len(grid), dtype=bool)
    for m in _leading_monomials(ideal):
        inside |= np.all(grid >= np.asarray(m), axis=1)
    return int((~inside).sum())
