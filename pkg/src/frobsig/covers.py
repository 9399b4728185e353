# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Finite covers R ⊂ S given by a module basis, and the data attached to a section T ∈ Hom_R(S, R).

A cover is certified when it is built. S is presented over R inside F_p[total variables, base variables] modulo the
relations of S and the differences b' - f(b), under an order eliminating the total variables. The basis closes exactly
when every leading monomial of that ideal is a power product of total variables; the standard monomials are then an
R-basis of S, and the supplied basis must differ from them by an invertible matrix.

"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyerrors import ExactQuotientFailed

from frobsig.cartier import DivisorQ, ExplicitSpec, PMinusLinearMap, ceil_exponent, degree_data, full_fedder_ideal
from frobsig.ideals import Ideal, QuotientPresentation, eliminate, standard_monomials
from frobsig.linalg import FpMatrix, matrix_rank
from frobsig.polys import PolyRing, poly_format, total_degree

logger = logging.getLogger(__name__)


class CoverError(ValueError):
    """
    A cover description that does not define a free finite extension.

    Attributes:
        reason (str): What failed
        product (str): The offending product or element, None if there is none
    """

    def __init__(self, reason, product=None):
        self.reason = reason
        self.product = product
        super().__init__(f"{reason}: {product}" if product else reason)


def _apply(matrix, vector):
    return [sum((a * v for a, v in zip(row, vector) if a and v), row[0].ring.zero) for row in matrix]


class CoverSpec:
    """
    A finite free extension f: R -> S with R a polynomial ring.

    Attributes:
        base (QuotientPresentation): R
        total (QuotientPresentation): S
        images (list): f(b) for each base variable b, reduced in S
        basis (list): The R-basis b_1 = 1, ..., b_N of S
        combined (PolyRing): Total variables followed by the base variables, with the elimination order
        relations (Ideal): Relations of S and b' - f(b) in ``combined``
    """

    def __init__(self, base, total, images, basis):
        if not base.is_regular:
            raise CoverError("base ring must be a polynomial ring")
        if base.p != total.p:
            raise CoverError(f"characteristics differ: {base.p} and {total.p}")
        ambient = total.ambient
        self.base = base
        self.total = total
        self.images = [total.reduce(self._parse(g)) for g in images]
        if len(self.images) != base.n:
            raise CoverError(f"{len(self.images)} images given for {base.n} base variables")
        self.basis = [total.reduce(self._parse(b)) for b in basis]
        if not self.basis:
            raise CoverError("basis is empty")
        if self.basis[0] != ambient.one:
            raise CoverError("first basis element must be 1", poly_format(self.basis[0]))

        taken = set(ambient.vars)
        names = []
        for name in base.ambient.vars:
            while name in taken:
                name += "_"
            taken.add(name)
            names.append(name)
        self.combined = PolyRing(ambient.field, ambient.vars + tuple(names), block=ambient.n)
        lifted = [self._lift(g) for g in total.relations.generators]
        lifted += [self.combined.gens[ambient.n + i] - self._lift(image) for i, image in enumerate(self.images)]
        self.relations = Ideal(self.combined, lifted)

        nt = ambient.n
        leading = []
        for g in self.relations.groebner_basis:
            head, tail = g.LM[:nt], g.LM[nt:]
            if not any(head):
                raise CoverError("base images are not algebraically independent", poly_format(g))
            if any(tail):
                raise CoverError("basis does not close", poly_format(g))
            leading.append(head)
        standard = standard_monomials(Ideal(ambient, [ambient.monomial(m) for m in leading]))
        if standard is None:
            raise CoverError("S is not finite over R")
        if len(standard) != len(self.basis):
            raise CoverError("basis does not close", f"{len(self.basis)} basis elements for rank {len(standard)}")
        self._standard = standard
        self._standard_index = {m: i for i, m in enumerate(standard)}
        self._domain = base.ambient.ring.to_domain()

        change = [self._standard_coordinates(b) for b in self.basis]
        adjugate, det = self.adjugate_det(change)
        if not (det and det.is_ground):
            raise CoverError("basis is not an R-basis of S", f"change of basis determinant {poly_format(det)}")
        scale = self.p_field.inv(int(det.const()))
        self._inverse = [[x * scale for x in row] for row in adjugate]

        self._image_powers = {}
        self._variable_matrices = [self._matrix_by_normal_form(x) for x in ambient.gens]
        unit = [base.ambient.one] + [base.ambient.zero] * (self.N - 1)
        self._monomials = {(0,) * nt: unit}
        logger.info("cover of rank %d over %r built; %d relations", self.N, base, len(self.relations.groebner_basis))

    def __repr__(self):
        return f"CoverSpec({self.base!r} -> {self.total!r}, basis {[poly_format(b) for b in self.basis]})"

    @property
    def N(self):
        return len(self.basis)

    @property
    def p_field(self):
        return self.base.ambient.field

    def _parse(self, f):
        ambient = self.total.ambient
        return ambient.parse(f) if isinstance(f, str) else ambient.convert(f)

    def _lift(self, f):
        pad = (0,) * self.base.n
        return self.combined.from_terms({m + pad: c for m, c in f.iterterms()})

    def _standard_coordinates(self, f):
        nt = self.total.n
        reduced = self.relations.reduce(self._lift(f))
        parts = [{} for _ in self._standard]
        for m, c in reduced.iterterms():
            parts[self._standard_index[m[:nt]]][m[nt:]] = c
        return [self.base.ambient.from_terms(t) for t in parts]

    def _to_basis(self, vector):
        return [sum((w * self._inverse[k][i] for k, w in enumerate(vector) if w), self.base.ambient.zero)
                for i in range(self.N)]

    def _matrix_by_normal_form(self, s):
        columns = [self._to_basis(self._standard_coordinates(s * b)) for b in self.basis]
        return [[columns[j][r] for j in range(self.N)] for r in range(self.N)]

    def domain_matrix(self, rows):
        """DomainMatrix over the polynomial ring R."""
        return DomainMatrix([list(row) for row in rows], (len(rows), len(rows[0])), self._domain)

    def adjugate_det(self, rows):
        """
        Adjugate and determinant of a square matrix over R.

        With det(λ - M) = λ^n + c_1·λ^(n-1) + ... + c_n, Cayley-Hamilton gives
        adj(M) = (-1)^(n-1)·(M^(n-1) + c_1·M^(n-2) + ... + c_(n-1)) and det(M) = (-1)^n·c_n, evaluated by Horner.

        Returns:
            Tuple (adjugate, det): The adjugate as a list of rows and the determinant
        """
        n = len(rows)
        zero, one = self.base.ambient.zero, self.base.ambient.one
        matrix = [[self.base.ambient.convert(x) for x in row] for row in rows]
        coefficients = [self.base.ambient.convert(c) for c in self.domain_matrix(matrix).charpoly()]
        current = [[one if i == j else zero for j in range(n)] for i in range(n)]
        for c in coefficients[1:n]:
            current = [[sum((matrix[i][k] * current[k][j] for k in range(n) if matrix[i][k] and current[k][j]), zero)
                        + (c if i == j else zero) for j in range(n)] for i in range(n)]
        sign = -1 if n % 2 == 0 else 1
        adjugate = [[x * sign for x in row] for row in current]
        return adjugate, coefficients[n] * -sign

    def monomial_coordinates(self, alpha):
        """Coordinates of the monomial x^alpha of the total ambient ring, memoized."""
        alpha = tuple(alpha)
        path = []
        current = alpha
        while current not in self._monomials:
            k = max(i for i, a in enumerate(current) if a)
            path.append(k)
            current = current[:k] + (current[k] - 1,) + current[k + 1:]
        vector = self._monomials[current]
        for k in reversed(path):
            current = current[:k] + (current[k] + 1,) + current[k + 1:]
            vector = _apply(self._variable_matrices[k], vector)
            self._monomials[current] = vector
        return vector

    def coordinates(self, s):
        """
        The expansion s = Σ c_i·b_i.

        Returns:
            list: c_1, ..., c_N in the base ring
        """
        s = self._parse(s)
        result = [self.base.ambient.zero] * self.N
        for m, c in s.iterterms():
            c = int(c)
            result = [r + c * x for r, x in zip(result, self.monomial_coordinates(m))]
        return result

    def image(self, r):
        """f(r) in the total ambient ring, reduced modulo the relations of S."""
        if isinstance(r, str):
            r = self.base.ambient.parse(r)
        r = self.base.ambient.convert(r)
        ambient = self.total.ambient
        result = ambient.zero
        for m, c in r.iterterms():
            term = ambient.constant(int(c))
            for i, a in enumerate(m):
                if a:
                    if (i, a) not in self._image_powers:
                        self._image_powers[i, a] = self.images[i] ** a
                    term = term * self._image_powers[i, a]
            result += term
        return self.total.reduce(result)

    def element(self, coordinates):
        """Σ f(c_i)·b_i."""
        result = self.total.ambient.zero
        for c, b in zip(coordinates, self.basis):
            if c:
                result += self.image(c) * b
        return self.total.reduce(result)

    def multiplication_matrix(self, s):
        """Matrix of multiplication by s: column j holds the coordinates of s·b_j."""
        s = self._parse(s)
        columns = [self.coordinates(s * b) for b in self.basis]
        return [[columns[j][r] for j in range(self.N)] for r in range(self.N)]

    @property
    def products(self):
        """products[i][j] = coordinates of b_i·b_j."""
        if not hasattr(self, "_products"):
            self._products = [[self.coordinates(a * b) for b in self.basis] for a in self.basis]
        return self._products

    def is_unit(self, s):
        """Units of S localized at the origin: nonzero constant term."""
        return bool(self.total.reduce(self._parse(s)).const())


def build_cover(base, total, images, basis):
    """
    Build and certify a cover.

    Args:
        base (QuotientPresentation): R, a polynomial ring
        total (QuotientPresentation): S
        images (list): Images of the base variables, as polynomials of S's ambient ring or text
        basis (list): R-basis of S starting with 1

    Returns:
        CoverSpec

    Raises:
        CoverError: If the basis does not close, the images are dependent or S is not finite over R
    """
    return CoverSpec(base, total, images, basis)


@dataclass
class SectionT:
    """
    An R-linear map T: S -> R, given by its values on the basis.

    Attributes:
        cover (CoverSpec): The cover
        values (list): T(b_i) in the base ring
    """
    cover: CoverSpec
    values: List = field(default_factory=list)

    def __post_init__(self):
        ring = self.cover.base.ambient
        self.values = [ring.parse(v) if isinstance(v, str) else ring.convert(v) for v in self.values]
        if len(self.values) != self.cover.N:
            raise CoverError(f"section has {len(self.values)} values for a basis of {self.cover.N} elements")
        self._frobenius_values = {}

    @classmethod
    def dual(cls, cover, weights):
        """Σ λ_i·b_i^∨ for constants λ_i."""
        ring = cover.base.ambient
        return cls(cover, [ring.constant(w) for w in weights])

    def __call__(self, s):
        return self.from_coordinates(self.cover.coordinates(s))

    def from_coordinates(self, coordinates):
        return sum((c * v for c, v in zip(coordinates, self.values) if c and v), self.cover.base.ambient.zero)

    def gram(self):
        """[T(b_i·b_j)]."""
        return [[self.from_coordinates(c) for c in row] for row in self.cover.products]

    @property
    def nondegenerate(self):
        if not hasattr(self, "_nondegenerate"):
            self._nondegenerate = bool(self.cover.domain_matrix(self.gram()).det())
        return self._nondegenerate

    @property
    def is_surjective(self):
        return Ideal(self.cover.base.ambient, self.values).is_unit

    def maximal_witness(self):
        """
        An element s of the maximal ideal of S with T(s) outside the maximal ideal of R, or None.

        The generators x_k·b_j of the maximal ideal are tried with the basis outer and the variables inner.
        """
        ambient = self.cover.total.ambient
        for b in self.cover.basis:
            for x in ambient.gens:
                s = self.cover.total.reduce(x * b)
                if self(s).const():
                    return s
        return None

    def frobenius_values(self, e):
        """T(x^γ·b_j^q) for every γ < q componentwise, keyed by γ; computed once per degree."""
        if e not in self._frobenius_values:
            cover = self.cover
            q = cover.base.p ** e
            ambient = cover.total.ambient
            powers = [b ** q for b in cover.basis]
            table = {}
            for gamma in itertools.product(range(q), repeat=ambient.n):
                monomial = ambient.monomial(gamma)
                table[gamma] = [self(monomial * b) for b in powers]
            self._frobenius_values[e] = table
        return self._frobenius_values[e]


def trace_map(cover):
    """Tr_{S/R}, with Tr(b_i) the trace of multiplication by b_i."""
    values = []
    for b in cover.basis:
        matrix = cover.multiplication_matrix(b)
        values.append(sum((matrix[i][i] for i in range(cover.N)), cover.base.ambient.zero))
    return SectionT(cover, values)


def norm_element(cover, s):
    """Norm_{S/R}(s), the determinant of multiplication by s."""
    return cover.domain_matrix(cover.multiplication_matrix(s)).det()


def min_poly(cover, s):
    """
    Minimal polynomial of s over R.

    The degree k is the first linear dependency among the coordinates of 1, s, s^2, ...; when k = N this is the
    characteristic polynomial of multiplication by s, otherwise the dependency itself, made monic.

    Returns:
        Tuple (ring, poly): ``ring`` is R[X] with X the first variable

    Raises:
        ValueError: If the dependency does not have polynomial coefficients
    """
    base = cover.base.ambient
    ring = base.extend([base.fresh_name("X")], block=False)
    s = cover._parse(s)
    columns = [cover.coordinates(cover.total.ambient.one)]
    k = None
    power = cover.total.ambient.one
    for degree in range(1, cover.N + 1):
        power = cover.total.reduce(power * s)
        columns.append(cover.coordinates(power))
        rows = [[column[r] for column in columns] for r in range(cover.N)]
        if cover.domain_matrix(rows).to_field().rank() < len(columns):
            k = degree
            break
    if k is None:
        raise ValueError("powers of the element are independent; the basis does not close")
    if k == cover.N:
        coefficients = cover.domain_matrix(cover.multiplication_matrix(s)).charpoly()
        coefficients = list(reversed(coefficients))
    else:
        kernel = cover.domain_matrix(rows).nullspace().to_list()[0]
        lead = kernel[k]
        try:
            coefficients = [c.exquo(lead) if c else base.zero for c in kernel]
        except ExactQuotientFailed:
            raise ValueError("minimal polynomial has non-polynomial coefficients") from None
    X = ring.gens[0]
    result = ring.zero
    for i, c in enumerate(coefficients):
        result += ring.convert(c) * X ** i if c else ring.zero
    return ring, result


@dataclass
class RamificationData:
    """
    T = G·ρ for a free generator G of Hom_R(S, R).

    Attributes:
        generator (SectionT): G
        rho (Poly): ρ in the total ambient ring
        ram (DivisorQ): div_S(ρ), on the total ambient ring
        branch (DivisorQ): div_R(Norm ρ), on the base ring
        norm_rho (Poly): Norm(ρ) made monic
        norm_unit (int): Norm(ρ) = norm_unit·norm_rho
        gram (list): [G(b_i·b_j)]
        gram_inverse (list): Its inverse over R
        section (SectionT): T
    """
    generator: SectionT
    rho: object
    ram: DivisorQ
    branch: DivisorQ
    norm_rho: object
    norm_unit: int
    gram: list
    gram_inverse: list
    section: SectionT

    def to_dict(self):
        return {"generator": [poly_format(v) for v in self.generator.values], "rho": poly_format(self.rho),
                "ram": self.ram.to_list(), "branch": self.branch.to_list(), "norm_rho": poly_format(self.norm_rho),
                "norm_unit": self.norm_unit}


def _weight_candidates(cover, degree_bound):
    """Values (λ_1, ..., λ_N) with every λ_i of degree ≤ degree_bound; each degree d starts after degree d - 1."""
    ring = cover.base.ambient
    p = cover.base.p
    for d in range(degree_bound + 1):
        monomials = [m for m in itertools.product(range(d + 1), repeat=ring.n) if sum(m) <= d]
        monomials.sort(key=sum)
        top = [i for i, m in enumerate(monomials) if sum(m) == d]
        for coefficients in itertools.product(range(p), repeat=cover.N * len(monomials)):
            chunks = [coefficients[i * len(monomials):(i + 1) * len(monomials)] for i in range(cover.N)]
            if not any(chunk[k] for chunk in chunks for k in top):
                continue
            yield [ring.from_terms({m: c for m, c in zip(monomials, chunk) if c}) for chunk in chunks]


def _free_generator(cover, degree_bound=0):
    for values in _weight_candidates(cover, degree_bound):
        G = SectionT(cover, values)
        gram = G.gram()
        adjugate, det = cover.adjugate_det(gram)
        if det and det.is_ground:
            scale = cover.p_field.inv(int(det.const()))
            logger.debug("free generator %s", [poly_format(v) for v in values])
            return G, gram, [[x * scale for x in row] for row in adjugate]
    raise CoverError(f"no free generator found in degree bound {degree_bound}")


def find_generator_and_rho(cover, T=None, degree_bound=0):
    """
    Find a free generator G = Σ λ_i·b_i^∨ of Hom_R(S, R) and solve T = G·ρ.

    Candidates λ are tried by degree: first λ ∈ F_p^N \\ {0} in lexicographic order, then for d = 1, ...,
    ``degree_bound`` the λ with entries of degree ≤ d and some entry of degree exactly d. G generates freely when its
    Gram matrix has a unit determinant, and then ρ has coordinates Gram^-1·(T(b_j))_j.

    Args:
        cover (CoverSpec): The cover
        T (SectionT): Section to factor, the trace when None
        degree_bound (int): Largest degree of the λ_i searched

    Returns:
        RamificationData

    Raises:
        CoverError: If no generator is found within the degree bound or T is degenerate
    """
    if T is None:
        T = trace_map(cover)
    G, gram, inverse = _free_generator(cover, degree_bound)
    rho = cover.element(_apply(inverse, T.values))
    if not rho:
        raise CoverError("section is degenerate")
    norm = norm_element(cover, rho)
    if not norm:
        raise CoverError("section is degenerate", f"Norm({poly_format(rho)}) = 0")
    unit = int(norm.LC) % cover.base.p
    monic = norm.monic()
    ram = DivisorQ() if cover.is_unit(rho) else DivisorQ(((rho.monic(), Fraction(1)),))
    branch = DivisorQ() if monic.is_ground else DivisorQ(((monic, Fraction(1)),))
    logger.info("ρ = %s, Norm(ρ) = %s", poly_format(rho), poly_format(norm))
    return RamificationData(G, rho, ram, branch, monic, unit, gram, inverse, T)


def divide(cover, a, b):
    """
    a/b in S, or None when b does not divide a.

    Uses a/b = adj(M_b)·coordinates(a)/Norm(b).

    Raises:
        ValueError: If b is a zero divisor
    """
    return _divide_coordinates(cover, cover.coordinates(a), b)


def _divide_coordinates(cover, coordinates, b):
    adjugate, det = cover.adjugate_det(cover.multiplication_matrix(b))
    if not det:
        raise ValueError(f"{poly_format(cover._parse(b))} is a zero divisor")
    numerators = _apply(adjugate, coordinates)
    try:
        return cover.element([c.exquo(det) if c else c for c in numerators])
    except ExactQuotientFailed:
        return None


def f_torsion_exponent(cover, s):
    """
    The largest k ≤ N with Norm(s)/s^k in S; k = N certifies that div(s) is f-torsion.
    """
    s = cover._parse(s)
    if not s:
        raise ValueError("element must be nonzero")
    pulled = cover.image(norm_element(cover, s))
    for k in range(cover.N, 0, -1):
        if divide(cover, pulled, s ** k) is not None:
            return k
    return 0


def powers_of_generator(cover, s, e):
    """Coordinates of s^(p^e - 1)."""
    matrix = cover.multiplication_matrix(s)
    vector = cover.coordinates(cover.total.ambient.one)
    for _ in range(cover.base.p ** e - 1):
        vector = _apply(matrix, vector)
    return vector


def contraction(cover, ideal):
    """J ∩ R for an ideal J of the total ambient ring, by elimination in the combined ring."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(cover.total.ambient, ideal)
    gens = [cover._lift(g) for g in ideal.generators] + list(cover.relations.generators)
    basis = Ideal(cover.combined, gens).groebner_basis
    nt = cover.total.n
    kept = eliminate(basis, nt)
    return Ideal(cover.base.ambient, [cover.base.ambient.from_terms({m[nt:]: c for m, c in g.iterterms()})
                                      for g in kept])


def transposable_element(cover, ram, u, q):
    """(u∘f)/ρ^(q-1) in S, or None when ρ^(q-1) does not divide u∘f."""
    return divide(cover, cover.image(u), ram.rho ** (q - 1))


def upstairs_spec(cover, ram, spec):
    """
    The pulled back algebra f*𝒞 on S.

    In degree e its Fedder elements are w·g, with w = (u∘f)/ρ^(q-1) for the Fedder generators u of 𝒞 and g running
    over the generators of (I_S^[q] : I_S). Generators u with ρ^(q-1) ∤ u∘f have no transpose and are skipped.

    Returns:
        ExplicitSpec
    """
    cache = {}

    def elements(e):
        if e not in cache:
            data = degree_data(spec, cover.base, e)
            found = []
            if not data.empty:
                q = data.q
                colon_gens = full_fedder_ideal(cover.total, q).generators
                for u in data.generators():
                    w = transposable_element(cover, ram, u, q)
                    if w is None:
                        logger.info("Fedder element %s has no transpose in degree %d", poly_format(u), e)
                        continue
                    found.extend(cover.total.ambient.convert(w) * g for g in colon_gens)
            cache[e] = found
        return cache[e]

    return ExplicitSpec(elements, label=f"pullback of {spec.describe()['type']}")


def monomial_root(h):
    """For a single term h = c·x^α, the monic root x^(α/g) and g = gcd(α); otherwise (h, 1)."""
    terms = h.terms()
    if len(terms) != 1:
        return h.monic(), 1
    alpha = terms[0][0]
    g = math.gcd(*alpha)
    if g <= 1:
        return h.monic(), 1
    return h.ring.from_dict({tuple(a // g for a in alpha): 1}), g


def _power_exponent(cover, h, r):
    """m ≥ 1 with h = unit·r^m in S, or None."""
    if cover.is_unit(r) or cover.is_unit(h):
        return None
    m = 0
    cap = max(total_degree(h), 0) + 1
    while not cover.is_unit(h):
        if m > cap:
            return None
        h = divide(cover, h, r)
        if h is None:
            return None
        m += 1
    return m


@dataclass
class Pullback:
    """
    Δ* = f*Δ - Ram_T.

    Attributes:
        divisor (DivisorQ): Δ*, terms merged where one polynomial is a unit multiple of a power of another
        effective (bool): Whether Δ* ≥ 0 on the checked window
    """
    divisor: DivisorQ
    effective: bool

    def to_dict(self):
        return {"divisor": self.divisor.to_list(), "effective": self.effective}


def _merge(cover, terms):
    merged = []
    for h, t in terms:
        h, g = monomial_root(h)
        t = t * g
        for i, (r, s) in enumerate(merged):
            if h == r:
                merged[i] = (r, s + t)
                break
            m = _power_exponent(cover, h, r)
            if m is not None:
                merged[i] = (r, s + t * m)
                break
            m = _power_exponent(cover, r, h)
            if m is not None:
                merged[i] = (h, s * m + t)
                break
        else:
            merged.append((h, t))
    return [(h, t) for h, t in merged if t != 0]


def pullback_pair(cover, ram, divisor, e_window=2):
    """
    Δ* = Σ t_i·div(g_i∘f) - div(ρ), with terms merged without factoring.

    When negative coefficients remain after merging, effectiveness is decided for each q = p^e, e ≤ e_window, by
    checking that ∏ h^⌈|t|(q-1)⌉ over the negative terms divides ∏ h^⌊t(q-1)⌋ over the positive ones.

    Returns:
        Pullback
    """
    terms = []
    for g, t in divisor.terms:
        h = cover.image(g)
        if cover.is_unit(h):
            continue
        terms.append((h, t))
    if ram.ram:
        terms.extend((h, -t) for h, t in ram.ram.terms)
    merged = _merge(cover, terms)
    result = DivisorQ(tuple(merged))
    if all(t >= 0 for _, t in merged):
        return Pullback(result, True)
    ambient = cover.total.ambient
    effective = True
    for e in range(1, e_window + 1):
        q = cover.base.p ** e
        top, bottom = ambient.one, ambient.one
        for h, t in merged:
            if t > 0:
                top *= h ** int(t * (q - 1))
            else:
                bottom *= h ** ceil_exponent(-t, q)
        if divide(cover, top, bottom) is None:
            effective = False
            break
    if not effective:
        logger.warning("pulled back divisor %s is not effective", result)
    return Pullback(result, effective)


@dataclass
class Transposed:
    """
    Outcome of transposing a map along T.

    Attributes:
        transposable (bool): Whether φ^⊤ exists
        map: The transpose as a :class:`frobsig.cartier.PMinusLinearMap` on S, None when it does not exist
        witness (str): A monomial s with φ(T(s·-^q)) not of the form T(σ·-), when not transposable
        unique (bool): Whether the Gram matrix has full rank at the origin
    """
    transposable: bool
    map: Optional[object] = None
    witness: Optional[str] = None
    unique: bool = True

    def to_dict(self):
        return {"transposable": self.transposable, "witness": self.witness, "unique": self.unique,
                "fedder_element": poly_format(self.map.u) if self.map is not None else None}


def transpose(cover, T, phi, ram=None):
    """
    The transpose φ^⊤ of a p^-e-linear map φ on R along T: T(φ^⊤(s)·s') = φ(T(s·s'^q)).

    For each monomial s = x^γ, γ < q, of the total ambient ring, σ_s = φ^⊤(s) is found from
    T(σ_s·b_j) = G(ρ·σ_s·b_j): the coordinates of ρ·σ_s are Gram^-1·(φ(T(s·b_j^q)))_j, and φ^⊤ exists iff ρ divides
    each of them. The Fedder element of φ^⊤ is then Σ_γ σ_γ^q·x^((q-1)𝟙-γ).

    Args:
        cover (CoverSpec): The cover
        T (SectionT): A nondegenerate section
        phi (PMinusLinearMap): Map on the base
        ram (RamificationData): Factorization of T, computed when None

    Returns:
        Transposed
    """
    if ram is None:
        ram = find_generator_and_rho(cover, T)
    e, q = phi.e, phi.q
    p = cover.base.p
    origin = FpMatrix([[int(x.const()) % p for x in row] for row in ram.gram], p)
    unique = matrix_rank(origin) == cover.N
    ambient = cover.total.ambient
    u = ambient.zero
    for gamma, values in T.frobenius_values(e).items():
        psi = [phi(v) for v in values]
        if not any(psi):
            continue
        target = _apply(ram.gram_inverse, psi)
        sigma = _divide_coordinates(cover, target, ram.rho)
        if sigma is None:
            witness = poly_format(ambient.monomial(gamma))
            logger.info("map is not transposable: no σ for %s", witness)
            return Transposed(False, None, witness, unique)
        complement = tuple(q - 1 - g for g in gamma)
        u += ambient.monomial(complement) * sigma ** q
    return Transposed(True, PMinusLinearMap(e, u, cover.total), None, unique)


def transposability_divisor_check(cover, ram, phi):
    """
    φ = Φ^e(u·-) is transposable iff f*Δ_φ - Ram_T ≥ 0, i.e. iff ρ^(q-1) divides u∘f in S.

    Returns:
        Tuple (bool, DivisorQ): The verdict and the predicted Δ_{φ^⊤} = (1/(q-1))·div((u∘f)/ρ^(q-1)), None when not
        transposable
    """
    q = phi.q
    w = transposable_element(cover, ram, phi.u, q)
    if w is None:
        return False, None
    w = cover.total.ambient.convert(w)
    if not w or cover.is_unit(w):
        return True, DivisorQ()
    return True, DivisorQ(((w, Fraction(1, q - 1)),))


def identity_cover(base):
    """R over itself with basis {1}; its trace is the identity."""
    return build_cover(base, QuotientPresentation(base.ambient), list(base.ambient.gens), [base.ambient.one])
