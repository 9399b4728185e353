# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Cartier algebras on graded quotients, presented degree by degree through Fedder ideals.

A p^-e-linear map on R = S/I is Φ^e(u·-) for a Fedder element u of the ambient ring, where Φ^e is the trace
dual to the monomial (x_1⋯x_n)^(q-1). A Cartier algebra is described by a :data:`CartierSpec` and realized in
degree e by the ideal U_e of its Fedder elements (:func:`fedder_data`).

"""

import functools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

from frobsig.ideals import Ideal, QuotientPresentation, bracket_power, colon
from frobsig.polys import Poly, characteristic, poly_format

logger = logging.getLogger(__name__)


def parse_rational(value):
    """
    Exact rational from an int or an 'a/b' string.

    Raises:
        ValueError: If ``value`` is a float or not a rational literal
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"rational values must be given as 'a/b' strings, got {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValueError(f"invalid rational {value!r}") from None


def ceil_exponent(t, q):
    """⌈t·(q-1)⌉, the exponent of a divisor coefficient t in degree q."""
    return math.ceil(t * (q - 1))


@dataclass(frozen=True)
class DivisorQ:
    """
    Formal Q-combination Σ t_i·div(g_i) of principal divisors.

    Polynomials are not factored, so equal divisors can have different term lists. Terms with t = 0 are dropped.

    Attributes:
        terms (tuple): Pairs (g, t) of a non-constant polynomial and a Fraction
    """
    terms: Tuple[Tuple[Poly, Fraction], ...] = ()

    def __post_init__(self):
        kept = []
        for g, t in self.terms:
            t = parse_rational(t)
            if not g or g.is_ground:
                raise ValueError("divisor terms need a non-constant polynomial")
            if t != 0:
                kept.append((g, t))
        object.__setattr__(self, "terms", tuple(kept))

    @classmethod
    def parse(cls, ring, pairs):
        """Divisor from [[poly_text, 'a/b'], ...]."""
        return cls(tuple((ring.parse(g), parse_rational(t)) for g, t in pairs))

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        return DivisorQ(self.terms + other.terms)

    def scale(self, t):
        t = parse_rational(t)
        return DivisorQ(tuple((g, c * t) for g, c in self.terms))

    @property
    def is_effective(self):
        return all(t >= 0 for _, t in self.terms)

    def exponents(self, q):
        return [(g, ceil_exponent(t, q)) for g, t in self.terms]

    def to_list(self):
        return [[poly_format(g), str(t)] for g, t in self.terms]

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{t}*div({poly_format(g)})" for g, t in self.terms)


@dataclass(frozen=True)
class FullSpec:
    """The full Cartier algebra of R."""

    def describe(self):
        return {"type": "full"}


@dataclass(frozen=True)
class PairSpec:
    """
    The algebra of a pair (R, Δ, 𝔞^t): Fedder elements multiplied by ∏ g_i^⌈t_i(q-1)⌉ and 𝔞^⌈t(q-1)⌉.

    Attributes:
        divisor (DivisorQ): Δ
        ideal_part (tuple): Optional (𝔞, t) with 𝔞 an Ideal of the ambient ring
    """
    divisor: DivisorQ
    ideal_part: Optional[Tuple[Ideal, Fraction]] = None

    def scale(self, t):
        part = self.ideal_part
        if part is not None:
            part = (part[0], part[1] * parse_rational(t))
        return PairSpec(self.divisor.scale(t), part)

    def describe(self):
        result = {"type": "pair", "divisor": self.divisor.to_list()}
        if self.ideal_part is not None:
            result["ideal"] = [poly_format(g) for g in self.ideal_part[0].generators]
            result["t"] = str(self.ideal_part[1])
        return result


@dataclass(frozen=True)
class PrincipalSpec:
    """
    The algebra generated by a single map Φ^e0(u0·-).

    Attributes:
        u0 (Poly): Fedder element in degree e0
        e0 (int): Degree of the generator
    """
    u0: Poly
    e0: int = 1

    def __post_init__(self):
        if not self.u0:
            raise ValueError("principal Cartier algebra needs a nonzero generator")
        if self.e0 < 1:
            raise ValueError(f"generator degree must be positive, got {self.e0}")

    def describe(self):
        return {"type": "principal", "u0": poly_format(self.u0), "e0": self.e0}


@dataclass(frozen=True)
class ExplicitSpec:
    """
    A Cartier algebra given by its Fedder elements degree by degree.

    Attributes:
        elements (Callable): e -> sequence of Fedder elements of the ambient ring
        label (str): Short description for reports
    """
    elements: Callable[[int], Sequence[Poly]]
    label: str = "explicit"

    def describe(self):
        return {"type": "explicit", "label": self.label}


@dataclass(frozen=True)
class InducedSpec:
    """
    The algebra induced on a quotient R/J by an algebra compatible with J.

    Attributes:
        parent: Spec on the original presentation
        base (QuotientPresentation): The original presentation
    """
    parent: "CartierSpec"
    base: QuotientPresentation = field(compare=False)

    def describe(self):
        return {"type": "induced", "parent": self.parent.describe()}


CartierSpec = Union[FullSpec, PairSpec, PrincipalSpec, ExplicitSpec, InducedSpec]


@dataclass(frozen=True)
class FedderData:
    """
    Degree e presentation of a Cartier algebra on R = S/I.

    Attributes:
        e (int): Degree
        q (int): p^e
        U (Ideal): Fedder ideal U_e, containing I^[q]; None when ``empty``
        context (QuotientPresentation): The presentation of R
        empty (bool): True when the algebra has no maps in this degree: a non-effective pair, or a principal algebra
            off the multiples of e0
    """
    e: int
    q: int
    U: Optional[Ideal]
    context: QuotientPresentation
    empty: bool = False

    def generators(self):
        """Generators of U_e that are not already in I^[q]."""
        if self.empty:
            return []
        skip = set(bracket_power(self.context.relations, self.q).generators) if not self.context.is_regular else set()
        return [g for g in self.U.generators if g not in skip]


def phi_apply(f, e):
    """
    Φ^e(f): keep the terms x^α with every α_i ≡ q-1 mod q and send them to x^((α-(q-1))/q).

    Coefficients are unchanged, F_p being fixed by Frobenius.
    """
    q = characteristic(f) ** e
    terms = {}
    for m, c in f.iterterms():
        if all(a % q == q - 1 for a in m):
            terms[tuple((a - q + 1) // q for a in m)] = c
    return f.ring.from_dict(terms)


def components(f, q):
    """The polynomials g_β with f = Σ_β x^β·g_β^q, β < q componentwise."""
    parts = {}
    for m, c in f.iterterms():
        beta = tuple(a % q for a in m)
        parts.setdefault(beta, {})[tuple(a // q for a in m)] = c
    return {beta: f.ring.from_dict(terms) for beta, terms in parts.items()}


def phi_ideal(ideal, e):
    """
    Φ^e(J): generated by the q-th-root components of the generators of J.

    Args:
        ideal (Ideal): J
        e (int): Degree

    Returns:
        Ideal
    """
    q = ideal.ring.p ** e
    gens = []
    for g in ideal.generators:
        gens.extend(components(g, q).values())
    return Ideal(ideal.ring, gens)


@functools.lru_cache(maxsize=256)
def full_fedder_ideal(presentation, q):
    """(I^[q] : I), or the unit ideal when I = 0."""
    relations = presentation.relations
    if relations.is_zero:
        return Ideal.unit(presentation.ambient)
    return colon(bracket_power(relations, q), relations)


def iterate_principal(u0, e0, e):
    """
    Fedder element of the e-th power of Φ^e0(u0·-), from u_(e+e0) = u_e^(q0)·u0.

    Raises:
        ValueError: If e is not a multiple of e0
    """
    if e % e0:
        raise ValueError(f"degree {e} is not a multiple of the generator degree {e0}")
    q0 = characteristic(u0) ** e0
    u = u0
    for _ in range(e // e0 - 1):
        u = u ** q0 * u0
    return u


def fedder_data(spec, presentation, e):
    """
    The Fedder ideal U_e of ``spec`` on ``presentation``.

    Full: (I^[q] : I). Pair: (I^[q] : I)·∏ g_i^⌈t_i(q-1)⌉·𝔞^⌈t(q-1)⌉ + I^[q]. Principal: (u_e) + I^[q] with
    u_e the iterate of u0. Explicit: the listed elements + I^[q]. Induced: the parent's U_e + I'^[q] for the
    quotient relations I'.

    Raises:
        ValueError: If e < 1, if e is not a multiple of e0 for a principal spec, or if u0 does not preserve I
    """
    if e < 1:
        raise ValueError(f"degree must be at least 1, got {e}")
    ring = presentation.ambient
    q = ring.p ** e
    relations = presentation.relations
    bracket = bracket_power(relations, q)

    if isinstance(spec, FullSpec):
        U = full_fedder_ideal(presentation, q)
    elif isinstance(spec, PairSpec):
        exponents = spec.divisor.exponents(q)
        if spec.ideal_part is not None:
            exponents.append((spec.ideal_part[0], ceil_exponent(spec.ideal_part[1], q)))
        if any(k < 0 for _, k in exponents):
            logger.info("pair has a negative exponent in degree %d; no maps", e)
            return FedderData(e, q, None, presentation, empty=True)
        U = full_fedder_ideal(presentation, q)
        for g, k in exponents:
            U = U * (g.power(k) if isinstance(g, Ideal) else Ideal(ring, [g ** k]))
        U = U + bracket
    elif isinstance(spec, PrincipalSpec):
        q0 = ring.p ** spec.e0
        if ring.convert(spec.u0) not in full_fedder_ideal(presentation, q0):
            raise ValueError(f"{poly_format(spec.u0)} does not preserve the relations in degree {spec.e0}")
        u = bracket.reduce(iterate_principal(ring.convert(spec.u0), spec.e0, e))
        U = Ideal(ring, [u]) + bracket
    elif isinstance(spec, ExplicitSpec):
        elements = [ring.convert(u) for u in spec.elements(e)]
        if not any(elements):
            return FedderData(e, q, None, presentation, empty=True)
        U = Ideal(ring, elements) + bracket
    elif isinstance(spec, InducedSpec):
        parent = degree_data(spec.parent, spec.base, e)
        if parent.empty:
            return FedderData(e, q, None, presentation, empty=True)
        U = Ideal(ring, parent.U.generators) + bracket
    else:
        raise TypeError(f"unknown Cartier spec {spec!r}")
    return FedderData(e, q, U, presentation)


def degree_data(spec, presentation, e):
    """
    :func:`fedder_data` for loops over every degree: a principal algebra has no maps in degrees that are not
    multiples of e0, so those degrees are empty.
    """
    if isinstance(spec, PrincipalSpec) and e % spec.e0:
        return FedderData(e, presentation.p ** e, None, presentation, empty=True)
    return fedder_data(spec, presentation, e)


@dataclass(frozen=True)
class PMinusLinearMap:
    """
    The p^-e-linear map φ = Φ^e(u·-) on R = S/I.

    Attributes:
        e (int): Degree
        u (Poly): Fedder element, reduced modulo I^[q]
        context (QuotientPresentation): R
    """
    e: int
    u: Poly
    context: QuotientPresentation

    def __post_init__(self):
        ring = self.context.ambient
        q = ring.p ** self.e
        u = ring.convert(self.u)
        if not self.context.is_regular:
            if u not in full_fedder_ideal(self.context, q):
                raise ValueError(f"{poly_format(u)} is not a Fedder element of {self.context!r} in degree {self.e}")
            u = bracket_power(self.context.relations, q).reduce(u)
        object.__setattr__(self, "u", u)

    @property
    def q(self):
        return self.context.p ** self.e

    def __call__(self, f):
        return self.context.reduce(phi_apply(self.u * self.context.ambient.convert(f), self.e))

    def compose(self, other):
        """self ∘ other, with Fedder element u_self^(q_other)·u_other in degree e_self + e_other."""
        if other.context is not self.context:
            raise ValueError("maps live on different presentations")
        return PMinusLinearMap(self.e + other.e, self.u ** other.q * other.u, self.context)
