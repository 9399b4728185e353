# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Splitting numbers, nonsplit ideals, splitting primes, F-signature estimates and splitting ratios.

Everything here works in S/m^[q], the span of the box monomials x^a with a < q. The socle pairing
<x^a, x^b> = [a + b = (q-1, ..., q-1)] is perfect there, and Φ^e(u·s) has constant term <u, s>. So:

* a_e is the rank of the pairing restricted to U_e, i.e. dim (U_e + m^[q])/m^[q];
* I_e/m^[q] is the orthogonal complement of that image.

For homogeneous input the pairing splits into degree blocks, degree k pairing with degree n(q-1) - k.

"""

import functools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from frobsig.cartier import FullSpec, InducedSpec, degree_data, fedder_data
from frobsig.ideals import Ideal, bracket_power, colength, colon, intersect
from frobsig.linalg import FpMatrix, kernel_basis, matrix_rank, row_basis
from frobsig.polys import is_homogeneous, total_degree, truncate

logger = logging.getLogger(__name__)

# Largest box q^n handled by a single dense block for non-homogeneous input
DENSE_BOX_LIMIT = 1024

METHODS = ("pairing", "colength")

_FULL = FullSpec()


class _Box:
    """Monomials x^a with a < q in n variables, grouped by total degree."""

    def __init__(self, n, q):
        self.n = n
        self.q = q
        grid = np.indices((q,) * n).reshape(n, -1).T
        degrees = grid.sum(axis=1)
        order = np.lexsort(tuple(grid[:, i] for i in range(n - 1, -1, -1)) + (degrees,))
        grid, degrees = grid[order], degrees[order]
        self.radix = q ** np.arange(n)
        self.by_degree = {}
        self.position = np.empty(q ** n, dtype=np.int64)
        for d in range(n * (q - 1) + 1):
            block = grid[degrees == d]
            self.by_degree[d] = block
            self.position[block @ self.radix] = np.arange(len(block))
        self.all = grid
        self.all_position = np.empty(q ** n, dtype=np.int64)
        self.all_position[grid @ self.radix] = np.arange(len(grid))

    def degree(self, d):
        return self.by_degree.get(d, np.zeros((0, self.n), dtype=np.int64))

    @property
    def socle_degree(self):
        return self.n * (self.q - 1)


@functools.lru_cache(maxsize=32)
def _box(n, q):
    return _Box(n, q)


def _terms(g):
    monomials = np.array(list(g.itermonoms()), dtype=np.int64)
    coeffs = np.array([int(c) for c in g.itercoeffs()], dtype=np.int64)
    return monomials, coeffs


def _multiply_rows(g, shifts, box, columns, position):
    """
    Rows trunc_q(x^β·g) for each β in ``shifts``, in coordinates of ``columns``.

    ``position`` maps the radix code of a box monomial to its column index.
    """
    monomials, coeffs = _terms(g)
    rows = np.zeros((len(shifts), columns), dtype=np.int64)
    if len(shifts) == 0:
        return rows
    products = shifts[:, None, :] + monomials[None, :, :]
    inside = np.all(products < box.q, axis=2)
    r, t = np.nonzero(inside)
    cols = position[products[r, t] @ box.radix]
    np.add.at(rows, (r, cols), coeffs[t])
    return rows


def _truncated_generators(data):
    gens = []
    for g in data.generators():
        g = truncate(g, data.q)
        if g:
            gens.append(g)
    return gens


def _graded_block(gens, box, k, p):
    """Pairing rows landing in degree k, as an FpMatrix over the degree-k box monomials."""
    columns = len(box.degree(k))
    blocks = []
    for g in gens:
        d = total_degree(g)
        if 0 <= k - d:
            blocks.append(_multiply_rows(g, box.degree(k - d), box, columns, box.position))
    if not blocks:
        return FpMatrix.zeros(0, columns, p)
    return FpMatrix(np.vstack(blocks), p)


def _dense_block(gens, box, p):
    blocks = [_multiply_rows(g, box.all, box, len(box.all), box.all_position) for g in gens]
    if not blocks:
        return FpMatrix.zeros(0, len(box.all), p)
    return FpMatrix(np.vstack(blocks), p)


def _box_ideal(ring, q):
    return [g ** q for g in ring.gens]


def fedder_fpure(presentation):
    """
    Fedder's criterion: R = S/I is F-pure iff (I^[p] : I) ⊄ m^[p].

    Decided by truncating the generators of the colon modulo m^[p].
    """
    data = fedder_data(_FULL, presentation, 1)
    return any(truncate(g, data.q) for g in data.U.generators)


def splitting_number(presentation, spec, e, method="pairing"):
    """
    The splitting number a_e of ``spec`` on ``presentation``.

    Args:
        presentation (QuotientPresentation): R = S/I
        spec: Cartier spec
        e (int): Degree
        method (str): 'pairing' for the rank of the socle pairing on U_e (by degree blocks when the generators are
            homogeneous), 'colength' for q^n - colength(U_e + m^[q])

    Returns:
        int: a_e, zero when the algebra is empty in degree e
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {', '.join(METHODS)}")
    data = degree_data(spec, presentation, e)
    if data.empty:
        return 0
    ring = presentation.ambient
    n, q, p = ring.n, data.q, ring.p
    gens = _truncated_generators(data)
    if not gens:
        return 0
    homogeneous = all(is_homogeneous(g) for g in gens)
    if method == "colength" or (not homogeneous and q ** n > DENSE_BOX_LIMIT):
        value = q ** n - colength(Ideal(ring, gens + _box_ideal(ring, q)))
    elif homogeneous:
        box = _box(n, q)
        value = sum(matrix_rank(_graded_block(gens, box, k, p)) for k in range(box.socle_degree + 1))
    else:
        value = matrix_rank(_dense_block(gens, _box(n, q), p))
    logger.info("a_%d = %d on %r", e, value, presentation)
    return value


def _reflect(vector, source, target_position, box):
    """Coordinates of Σ_b v_b·x^((q-1)𝟙 - b) in the degree block of ``target_position``."""
    reflected = (box.q - 1) - source
    out = np.zeros(len(vector), dtype=np.int64)
    out[target_position[reflected @ box.radix]] = vector
    return out


def _graded_nonsplit_generators(gens, box, ring):
    """Minimal generators of I_e/m^[q], degree by degree, from reflected kernels of the pairing blocks."""
    p = ring.p
    generators = []
    below = np.zeros((0, 0), dtype=np.int64)
    for d in range(box.socle_degree + 1):
        columns = box.degree(d)
        dual = box.socle_degree - d
        kernel = kernel_basis(_graded_block(gens, box, dual, p))
        if not kernel:
            below = np.zeros((0, len(columns)), dtype=np.int64)
            continue
        piece = np.array([_reflect(v, box.degree(dual), box.position, box) for v in kernel])
        fresh = piece
        if len(below):
            lower = box.degree(d - 1)
            products = []
            for i in range(ring.n):
                moved = lower.copy()
                moved[:, i] += 1
                valid = moved[:, i] < box.q
                G = np.zeros((len(below), len(columns)), dtype=np.int64)
                G[:, box.position[moved[valid] @ box.radix]] = below[:, valid]
                products.append(G)
            reduced, pivots = FpMatrix(np.vstack(products), p).rref()
            if pivots:
                fresh = (piece - piece[:, pivots] @ reduced[:len(pivots)]) % p
        for row in row_basis(FpMatrix(fresh, p)):
            generators.append(ring.from_terms({tuple(columns[j]): row[j] for j in np.nonzero(row)[0]}))
        below = piece
    return generators


def nonsplit_ideal(presentation, spec, e, check=False):
    """
    The nonsplit ideal I_e = {r : φ(r) ∈ m for every φ in degree e}, as an ideal of the ambient ring.

    Equal to (m^[q] : U_e); contains m^[q] and I, and is the unit ideal exactly when a_e = 0.

    Args:
        presentation (QuotientPresentation): R
        spec: Cartier spec
        e (int): Degree
        check (bool): Compare the colength of I_e with a_e and log a warning when they differ

    Returns:
        Ideal
    """
    data = degree_data(spec, presentation, e)
    ring = presentation.ambient
    q = data.q
    if data.empty:
        return Ideal.unit(ring)
    gens = _truncated_generators(data)
    if not gens:
        return Ideal.unit(ring)
    relations = list(presentation.relations.generators)
    if all(is_homogeneous(g) for g in gens):
        found = _graded_nonsplit_generators(gens, _box(ring.n, q), ring)
        result = Ideal(ring, found + _box_ideal(ring, q) + relations)
    else:
        box = Ideal(ring, _box_ideal(ring, q))
        result = colon(box, Ideal(ring, gens)) + relations
    if check:
        a_e = splitting_number(presentation, spec, e)
        length = colength(result)
        if length != a_e:
            logger.warning("colength of I_%d is %s but a_%d = %d", e, length, e, a_e)
    return result


@dataclass
class StabilizedIdeal:
    """
    Result of a fixed-point or stabilization computation.

    Attributes:
        ideal (Ideal): The result
        stabilized (bool): Whether the iteration reached a fixed point within its cap
        e_used (tuple): Degrees that were computed
        f_pure (bool): False when no splitting exists in the computed degrees, None when not applicable
        note (str): Free text for reports
    """
    ideal: Ideal
    stabilized: bool
    e_used: Tuple[int, ...] = ()
    f_pure: Optional[bool] = None
    note: str = ""

    def to_dict(self):
        return {"ideal": self.ideal.to_list(), "stabilized": self.stabilized, "e_used": list(self.e_used),
                "f_pure": self.f_pure, "note": self.note}

    @classmethod
    def from_dict(cls, data, ring):
        return cls(Ideal(ring, data["ideal"]), data["stabilized"], tuple(data["e_used"]), data.get("f_pure"),
                   data.get("note", ""))


def _compatible(candidate, presentation, spec, degrees):
    """U_e·K ⊆ K^[q] for every computed degree."""
    for e in degrees:
        data = degree_data(spec, presentation, e)
        if data.empty:
            continue
        target = bracket_power(candidate, data.q)
        for u in data.generators():
            if any((u * k) not in target for k in candidate.groebner_basis):
                return False
    return True


def _compatible_part(generators, presentation, spec, degrees):
    """
    Drops every generator g with u·g ∉ K^[q] for some Fedder element u, until the ideal K of the remaining
    generators and I is compatible in every given degree.
    """
    ring = presentation.ambient
    relations = list(presentation.relations.generators)
    data = [d for d in (degree_data(spec, presentation, e) for e in degrees) if not d.empty]
    kept = list(generators)
    while True:
        candidate = Ideal(ring, kept + relations)
        failing = set()
        for d in data:
            target = bracket_power(candidate, d.q)
            fedder = d.generators()
            failing.update(i for i, g in enumerate(kept)
                           if i not in failing and any((u * g) not in target for u in fedder))
        if not failing:
            return candidate
        logger.debug("dropping %d incompatible generators", len(failing))
        kept = [g for i, g in enumerate(kept) if i not in failing]


def splitting_prime(presentation, spec, e_max, degree_bound=None):
    """
    The splitting prime sp = {r : φ(r) ∈ m for all φ} of ``spec`` on ``presentation``.

    Steps through multiples of the first e with a_e != 0 and intersects the nonsplit ideals. At each step the
    candidate is generated by I and the generators of the running intersection of degree below q/2 (or at most
    ``degree_bound``) that survive the compatibility check against every degree computed so far. The result is
    stabilized when the last two candidates agree, the candidate is proper and it is compatible with the algebra in
    every computed degree.

    Args:
        presentation (QuotientPresentation): R
        spec: Cartier spec
        e_max (int): Largest degree to compute, at least 2
        degree_bound (int): Optional fixed degree bound for candidate generators

    Returns:
        StabilizedIdeal
    """
    if e_max < 2:
        raise ValueError(f"e_max must be at least 2, got {e_max}")
    ring = presentation.ambient
    first = next((e for e in range(1, e_max + 1) if splitting_number(presentation, spec, e)), None)
    if first is None:
        return StabilizedIdeal(Ideal.unit(ring), True, tuple(range(1, e_max + 1)), f_pure=False,
                               note="not F-pure")
    steps = tuple(range(first, e_max + 1, first))
    running = None
    candidates = []
    for i, e in enumerate(steps):
        current = nonsplit_ideal(presentation, spec, e)
        if running is None or current.issubset(running):
            running = current
        else:
            running = intersect(running, current)
        bound = degree_bound if degree_bound is not None else (ring.p ** e - 1) // 2
        low = [g for g in running.groebner_basis if total_degree(g) <= bound]
        candidates.append(_compatible_part(low, presentation, spec, steps[:i + 1]))
        logger.info("splitting prime candidate at e=%d: %s", e, candidates[-1].to_list())
    candidate = candidates[-1]
    stabilized = (len(candidates) >= 2 and candidates[-1] == candidates[-2] and not candidate.is_unit
                  and _compatible(candidate, presentation, spec, steps))
    note = "" if stabilized else f"no stable compatible candidate by e={steps[-1]}"
    if not stabilized:
        logger.warning("splitting prime did not stabilize by e=%d", steps[-1])
    return StabilizedIdeal(candidate, stabilized, steps, f_pure=True, note=note)


@dataclass
class SplittingRow:
    e: int
    q: int
    a_e: int
    ratio: Fraction


@dataclass
class SplittingReport:
    """
    Splitting numbers over a window of degrees with the extrapolated F-signature.

    Attributes:
        rows (list): One :class:`SplittingRow` per computed e
        n (int): gcd of the e with a_e != 0, 0 if there are none
        delta (int): Exponent δ = dim R in the normalization a_e/q^δ
        estimate (Fraction): Richardson step over the last two multiples of n
        error (Fraction): |r_E - r_E'| over those two, None when fewer than two are available
        stabilized (bool): Whether the error bar is within 1/q_E'
        notes (dict): Extra report fields
    """
    rows: List[SplittingRow]
    n: int
    delta: int
    estimate: Fraction
    error: Optional[Fraction]
    stabilized: bool
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        return {"rows": [{"e": r.e, "q": r.q, "a_e": r.a_e, "ratio": str(r.ratio)} for r in self.rows],
                "n": self.n, "delta": self.delta, "estimate": str(self.estimate),
                "estimate_float": float(self.estimate),
                "error": None if self.error is None else str(self.error),
                "stabilized": self.stabilized, "notes": self.notes}

    @classmethod
    def from_dict(cls, data):
        rows = [SplittingRow(r["e"], r["q"], r["a_e"], Fraction(r["ratio"])) for r in data["rows"]]
        error = None if data["error"] is None else Fraction(data["error"])
        return cls(rows, data["n"], data["delta"], Fraction(data["estimate"]), error, data["stabilized"],
                   data.get("notes", {}))

    def to_frame(self):
        return pd.DataFrame({"e": [r.e for r in self.rows], "q": [r.q for r in self.rows],
                             "a_e": [r.a_e for r in self.rows], "ratio": [str(r.ratio) for r in self.rows],
                             "ratio_float": [float(r.ratio) for r in self.rows]})


def extrapolate(rows, n):
    """
    Richardson step assuming a_e/q^δ = s + O(1/q).

    Returns:
        Tuple (estimate, error, stabilized)
    """
    if n == 0:
        return Fraction(0), Fraction(0), True
    usable = [r for r in rows if r.e % n == 0]
    if len(usable) < 2:
        return usable[-1].ratio, None, False
    prev, last = usable[-2], usable[-1]
    estimate = (last.q * last.ratio - prev.q * prev.ratio) / (last.q - prev.q)
    error = abs(last.ratio - prev.ratio)
    return estimate, error, error <= Fraction(1, prev.q)


def fsignature_estimate(presentation, spec, e_max, threads=None, method="pairing"):
    """
    Splitting numbers a_1, ..., a_e_max and the F-signature estimate.

    Args:
        presentation (QuotientPresentation): R
        spec: Cartier spec
        e_max (int): Largest degree, at least 2
        threads (int): Worker threads for computing the degrees concurrently; sequential when None or 1
        method (str): Passed to :func:`splitting_number`

    Returns:
        SplittingReport
    """
    if e_max < 2:
        raise ValueError(f"e_max must be at least 2, got {e_max}")
    delta = presentation.dim
    degrees = list(range(1, e_max + 1))

    def compute(e):
        return splitting_number(presentation, spec, e, method=method)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(compute, degrees))
    else:
        values = [compute(e) for e in degrees]
    p = presentation.p
    rows = [SplittingRow(e, p ** e, a, Fraction(a, p ** (e * delta))) for e, a in zip(degrees, values)]
    n = math.gcd(*[e for e, a in zip(degrees, values) if a]) if any(values) else 0
    estimate, error, stabilized = extrapolate(rows, n)
    return SplittingReport(rows, n, delta, estimate, error, stabilized)


def splitting_ratio(presentation, spec, e_max, degree_bound=None, threads=None):
    """
    The splitting ratio: the F-signature of the algebra induced on R/sp.

    Raises:
        ValueError: When the splitting prime is the unit ideal (not F-pure)
    """
    sp = splitting_prime(presentation, spec, e_max, degree_bound=degree_bound)
    if sp.ideal.is_unit:
        raise ValueError("not F-pure: the splitting prime is the unit ideal")
    quotient = presentation.quotient(sp.ideal)
    report = fsignature_estimate(quotient, InducedSpec(spec, presentation), e_max, threads=threads)
    report.stabilized = report.stabilized and sp.stabilized
    report.notes["splitting_prime"] = sp.ideal.to_list()
    report.notes["splitting_prime_stabilized"] = sp.stabilized
    return report
