# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Test ideals and non-F-pure ideals of pairs (R, Δ, 𝔞^t).

Both are fixed points of J -> Σ_e Φ^e(U_e·J) over a window of degrees e = 1..E: the test ideal grows from a test
element, the non-F-pure ideal shrinks from the unit ideal.

"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from frobsig.cartier import DivisorQ, PairSpec, PrincipalSpec, degree_data, phi_ideal
from frobsig.ideals import Ideal, QuotientPresentation
from frobsig.splitting import StabilizedIdeal

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 20


@dataclass(frozen=True)
class PairContext:
    """
    A pair (R, Δ, 𝔞^t) with non-negative coefficients.

    Attributes:
        presentation (QuotientPresentation): R
        divisor (DivisorQ): Δ
        ideal_part (tuple): Optional (𝔞, t)
    """
    presentation: QuotientPresentation
    divisor: DivisorQ = DivisorQ()
    ideal_part: Optional[Tuple[Ideal, Fraction]] = None

    def __post_init__(self):
        if not self.divisor.is_effective:
            raise ValueError(f"pair coefficients must be non-negative: {self.divisor}")
        if self.ideal_part is not None and self.ideal_part[1] < 0:
            raise ValueError(f"ideal exponent must be non-negative, got {self.ideal_part[1]}")

    @property
    def spec(self):
        return PairSpec(self.divisor, self.ideal_part)

    def test_element(self):
        """∏ g_i^⌈t_i⌉·𝔞^⌈t⌉ as an ideal."""
        ring = self.presentation.ambient
        seed = Ideal(ring, [ring.one])
        for g, t in self.divisor.terms:
            seed = seed * Ideal(ring, [g ** math.ceil(t)])
        if self.ideal_part is not None:
            seed = seed * self.ideal_part[0].power(math.ceil(self.ideal_part[1]))
        return seed


def _step(presentation, spec, ideal, e_window):
    ring = presentation.ambient
    pieces = []
    for e in range(1, e_window + 1):
        data = degree_data(spec, presentation, e)
        if data.empty:
            continue
        pieces.extend(phi_ideal(data.U * ideal, e).generators)
    return Ideal(ring, pieces)


def ascending_fixed_point(presentation, spec, seed, e_window, max_iterations=MAX_ITERATIONS):
    """
    Smallest J containing ``seed`` with Φ^e(U_e·J) ⊆ J for e = 1..E.

    Stops early at the unit ideal.

    Returns:
        StabilizedIdeal
    """
    current = seed
    for k in range(1, max_iterations + 1):
        if current.is_unit:
            return StabilizedIdeal(current, True, tuple(range(1, e_window + 1)), note=f"unit ideal after {k - 1}")
        following = current + _step(presentation, spec, current, e_window)
        if following == current:
            return StabilizedIdeal(current, True, tuple(range(1, e_window + 1)), note=f"{k} iterations")
        current = following
    logger.warning("ascending chain did not stabilize in %d iterations", max_iterations)
    return StabilizedIdeal(current, False, tuple(range(1, e_window + 1)), note=f"cap of {max_iterations} reached")


def descending_fixed_point(presentation, spec, e_window, max_iterations=MAX_ITERATIONS):
    """
    Stable image of the unit ideal under J -> Σ_e Φ^e(U_e·J) + I.

    Returns:
        StabilizedIdeal
    """
    ring = presentation.ambient
    relations = list(presentation.relations.generators)
    current = Ideal.unit(ring)
    for k in range(1, max_iterations + 1):
        following = _step(presentation, spec, current, e_window) + relations
        if following == current:
            return StabilizedIdeal(current, True, tuple(range(1, e_window + 1)), note=f"{k} iterations")
        current = following
    logger.warning("descending chain did not stabilize in %d iterations", max_iterations)
    return StabilizedIdeal(current, False, tuple(range(1, e_window + 1)), note=f"cap of {max_iterations} reached")


def tau(ctx, e_window=2, max_iterations=MAX_ITERATIONS):
    """
    Test ideal τ(R, Δ, 𝔞^t) on a polynomial ring.

    Seeded with the test element ∏ g_i^⌈t_i⌉·𝔞^⌈t⌉.

    Raises:
        ValueError: If R is not a polynomial ring
    """
    if not ctx.presentation.is_regular:
        raise ValueError("test ideals are only computed on polynomial rings")
    return ascending_fixed_point(ctx.presentation, ctx.spec, ctx.test_element(), e_window, max_iterations)


def tau_spec(presentation, spec, e_window=2, max_iterations=MAX_ITERATIONS, seed=None):
    """
    Test ideal of an arbitrary Cartier spec on a polynomial ring.

    The default seed is u0 for a principal spec, ∏ g_i^⌈t_i⌉·𝔞^⌈t⌉ for a pair and 1 otherwise.
    """
    if not presentation.is_regular:
        raise ValueError("test ideals are only computed on polynomial rings")
    ring = presentation.ambient
    if seed is None:
        if isinstance(spec, PrincipalSpec):
            seed = Ideal(ring, [spec.u0])
        elif isinstance(spec, PairSpec):
            seed = PairContext(presentation, spec.divisor, spec.ideal_part).test_element()
        else:
            seed = Ideal.unit(ring)
    return ascending_fixed_point(presentation, spec, seed, e_window, max_iterations)


def sigma(ctx, e_window=2, max_iterations=MAX_ITERATIONS):
    """Non-F-pure ideal σ(R, Δ, 𝔞^t): the stable image of R under the algebra of the pair."""
    return descending_fixed_point(ctx.presentation, ctx.spec, e_window, max_iterations)


@dataclass
class SandwichReport:
    """
    Outcome of comparing test ideals of two algebras with D_e·c ⊆ C_e ⊆ D_e.

    Attributes:
        holds (bool): True when the inclusions hold and the test ideals agree
        first_violation (int): First degree where an inclusion fails, None otherwise
        reason (str): Which inclusion failed
        tau_c (StabilizedIdeal): Test ideal of C, None on a failed precondition
        tau_d (StabilizedIdeal): Test ideal of D, None on a failed precondition
    """
    holds: bool
    first_violation: Optional[int] = None
    reason: str = ""
    tau_c: Optional[StabilizedIdeal] = None
    tau_d: Optional[StabilizedIdeal] = None

    def to_dict(self):
        return {"holds": self.holds, "first_violation": self.first_violation, "reason": self.reason,
                "tau_c": self.tau_c.to_dict() if self.tau_c else None,
                "tau_d": self.tau_d.to_dict() if self.tau_d else None}


def sandwich_tau_check(C, D, c, ctx, e_window=2):
    """
    Check U_e(D)·c ⊆ U_e(C) ⊆ U_e(D) for e = 1..E, then compare the test ideals of C and D.

    Args:
        C: Cartier spec of the inner algebra
        D: Cartier spec of the outer algebra
        c (Poly): Nonzerodivisor of the ambient ring
        ctx (PairContext): Supplies the presentation and the seed for both test ideals
        e_window (int): Degrees to check and to sum over

    Returns:
        SandwichReport
    """
    presentation = ctx.presentation
    ring = presentation.ambient
    c = ring.convert(c)
    if not c:
        raise ValueError("sandwich element must be nonzero")
    for e in range(1, e_window + 1):
        inner = degree_data(C, presentation, e)
        outer = degree_data(D, presentation, e)
        if outer.empty:
            if not inner.empty:
                return SandwichReport(False, e, "U_e(C) ⊄ U_e(D)")
            continue
        if inner.empty or not (outer.U * c).issubset(inner.U):
            return SandwichReport(False, e, "U_e(D)·c ⊄ U_e(C)")
        if not inner.U.issubset(outer.U):
            return SandwichReport(False, e, "U_e(C) ⊄ U_e(D)")
    seed = ctx.test_element()
    tau_c = tau_spec(presentation, C, e_window, seed=seed)
    tau_d = tau_spec(presentation, D, e_window, seed=seed)
    return SandwichReport(tau_c.ideal == tau_d.ideal, None, "", tau_c, tau_d)


__all__ = ["PairContext", "tau", "tau_spec", "sigma", "sandwich_tau_check", "SandwichReport"]
