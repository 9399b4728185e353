# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Executable checks of the transformation rules along a cover f: R -> S with a section T.

Each verifier computes both sides of its rule, re-checks the hypotheses (T surjective, T(n) ⊆ m, transposability of
the base algebra) and returns a :class:`RuleReport`. Failed hypotheses are reported, never raised.

"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from frobsig.cartier import DivisorQ, FullSpec, PairSpec, PMinusLinearMap, ceil_exponent, degree_data
from frobsig.covers import (contraction, f_torsion_exponent, find_generator_and_rho, monomial_root, pullback_pair,
                            transposability_divisor_check, upstairs_spec)
from frobsig.ideals import Ideal
from frobsig.pairs import PairContext, sigma, tau
from frobsig.polys import poly_format
from frobsig.splitting import fsignature_estimate, splitting_prime, splitting_ratio

logger = logging.getLogger(__name__)


@dataclass
class RuleReport:
    """
    Outcome of one rule verification.

    Attributes:
        rule (str): Name of the rule
        holds (bool): Whether the rule was confirmed on this instance
        failures (list): Failed hypotheses and failed comparisons, in the order found
        values (dict): Computed quantities for the report
        stabilized (bool): False when a fixed point or estimate did not stabilize
    """
    rule: str
    holds: bool
    failures: List[str] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    stabilized: bool = True

    def to_dict(self):
        return {"rule": self.rule, "holds": self.holds, "failures": list(self.failures), "values": self.values,
                "stabilized": self.stabilized}


def _fraction(x):
    return None if x is None else str(x)


def section_image(T, ideal):
    """T(J), the ideal of R generated by T(b_i·g) over the basis and the generators of J."""
    cover = T.cover
    values = [T(b * cover.total.ambient.convert(g)) for b in cover.basis for g in ideal.generators]
    return Ideal(cover.base.ambient, values)


def check_preconditions(cover, T, spec, e_max):
    """
    Hypotheses of the signature and splitting prime rules.

    Returns:
        Tuple (failures, ram): The failed hypotheses as messages and the factorization T = G·ρ
    """
    failures = []
    if not T.is_surjective:
        failures.append("T is not surjective")
    witness = T.maximal_witness()
    if witness is not None:
        failures.append(f"T(n) ⊄ m, witness {poly_format(witness)}")
    ram = find_generator_and_rho(cover, T)
    for e in range(1, e_max + 1):
        data = degree_data(spec, cover.base, e)
        if data.empty:
            continue
        bad = next((u for u in data.generators()
                    if not transposability_divisor_check(cover, ram, PMinusLinearMap(e, u, cover.base))[0]), None)
        if bad is not None:
            failures.append(f"{poly_format(bad)} is not transposable in degree {e}")
            break
    return failures, ram


def verify_fsig_rule(cover, T, spec, e_max=3, threads=None, method="pairing"):
    """
    s(S, f*𝒞) = N·s(R, 𝒞), compared on window estimates.

    The rule holds when every hypothesis passes and |s_up - N·s_down| is within err_up + N·err_down.
    """
    failures, ram = check_preconditions(cover, T, spec, e_max)
    down = fsignature_estimate(cover.base, spec, e_max, threads=threads, method=method)
    up = fsignature_estimate(cover.total, upstairs_spec(cover, ram, spec), e_max, threads=threads, method=method)
    N = cover.N
    residual = abs(up.estimate - N * down.estimate)
    tolerance = (up.error or Fraction(0)) + N * (down.error or Fraction(0))
    if residual > tolerance:
        failures.append(f"|s_up - {N}·s_down| = {float(residual):.4g} exceeds {float(tolerance):.4g}")
    values = {"N": N, "rho": poly_format(ram.rho), "down": down.to_dict(), "up": up.to_dict(),
              "residual": str(residual), "residual_float": float(residual), "tolerance": str(tolerance)}
    return RuleReport("fsig", not failures, failures, values, up.stabilized and down.stabilized)


def _residue_factor(cover, sp_up, sp_down):
    """[κ(sp_up):κ(sp_down)] where it is determined: N over the zero ideals, 1 at maximal ideals."""
    if sp_up.ideal.is_zero and sp_down.ideal.is_zero:
        return cover.N
    if cover.base.quotient(sp_down.ideal).dim == 0:
        return 1
    return None


def verify_sp_rule(cover, T, spec, e_max=3, degree_bound=None, threads=None):
    """
    sp(S, f*𝒞) ∩ R = sp(R, 𝒞), and the splitting ratio rule where the residue degree is known.

    The contraction is compared for every instance; the ratio residual is computed only when the hypotheses hold,
    both splitting primes are proper and stabilized and the residue degree is determined.
    """
    preconditions, ram = check_preconditions(cover, T, spec, e_max)
    up_spec = upstairs_spec(cover, ram, spec)
    sp_down = splitting_prime(cover.base, spec, e_max, degree_bound=degree_bound)
    sp_up = splitting_prime(cover.total, up_spec, e_max, degree_bound=degree_bound)
    contracted = contraction(cover, sp_up.ideal)
    failures = []
    if contracted != sp_down.ideal:
        failures.append(f"sp_up ∩ R = {contracted.to_list()} differs from sp_down = {sp_down.ideal.to_list()}")
    values = {"sp_down": sp_down.to_dict(), "sp_up": sp_up.to_dict(), "contraction": contracted.to_list(),
              "preconditions": preconditions}
    stabilized = sp_up.stabilized and sp_down.stabilized
    factor = None
    if not preconditions and stabilized and not sp_down.ideal.is_unit and not sp_up.ideal.is_unit:
        factor = _residue_factor(cover, sp_up, sp_down)
    if factor is not None:
        down = splitting_ratio(cover.base, spec, e_max, degree_bound=degree_bound, threads=threads)
        up = splitting_ratio(cover.total, up_spec, e_max, degree_bound=degree_bound, threads=threads)
        residual = abs(up.estimate - factor * down.estimate)
        tolerance = (up.error or Fraction(0)) + factor * (down.error or Fraction(0))
        values.update({"residue_degree": factor, "r_down": str(down.estimate), "r_up": str(up.estimate),
                       "residual": str(residual), "tolerance": str(tolerance)})
        if residual > tolerance:
            failures.append(f"|r_up - {factor}·r_down| = {float(residual):.4g} exceeds {float(tolerance):.4g}")
    return RuleReport("sp", not failures, failures, values, stabilized)


def _pulled_context(cover, T, divisor, e_window, rule):
    if not cover.total.is_regular:
        return None, None, RuleReport(rule, False, ["total ring is not a polynomial ring"])
    ram = find_generator_and_rho(cover, T)
    pulled = pullback_pair(cover, ram, divisor, e_window)
    if not pulled.effective or not pulled.divisor.is_effective:
        return None, None, RuleReport(rule, False, [f"Δ* = {pulled.divisor} is not effective"],
                                      {"pullback": pulled.to_dict()})
    return ram, pulled, None


def verify_tau_rule(cover, T, divisor, e_window=2):
    """T(τ(S, Δ*)) = τ(R, Δ), with Δ* = f*Δ - Ram_T."""
    ram, pulled, failed = _pulled_context(cover, T, divisor, e_window, "tau")
    if failed is not None:
        return failed
    up = tau(PairContext(cover.total, pulled.divisor), e_window)
    down = tau(PairContext(cover.base, divisor), e_window)
    image = section_image(T, up.ideal)
    failures = [] if image == down.ideal else [f"T(τ_up) = {image.to_list()} differs from τ_down"]
    values = {"pullback": pulled.to_dict(), "tau_up": up.to_dict(), "tau_down": down.to_dict(),
              "image": image.to_list()}
    return RuleReport("tau", not failures, failures, values, up.stabilized and down.stabilized)


def verify_sigma_rule(cover, T, divisor, e_window=2):
    """T(σ(S, Δ*)) ⊆ σ(R, Δ), with equality when T is surjective."""
    ram, pulled, failed = _pulled_context(cover, T, divisor, e_window, "sigma")
    if failed is not None:
        return failed
    up = sigma(PairContext(cover.total, pulled.divisor), e_window)
    down = sigma(PairContext(cover.base, divisor), e_window)
    image = section_image(T, up.ideal)
    failures = []
    if not image.issubset(down.ideal):
        failures.append(f"T(σ_up) = {image.to_list()} is not contained in σ_down")
    elif T.is_surjective and image != down.ideal:
        failures.append(f"T is surjective but T(σ_up) = {image.to_list()} differs from σ_down")
    values = {"pullback": pulled.to_dict(), "sigma_up": up.to_dict(), "sigma_down": down.to_dict(),
              "image": image.to_list(), "surjective": T.is_surjective}
    return RuleReport("sigma", not failures, failures, values, up.stabilized and down.stabilized)


def _root_of(delta, root):
    """m with delta = unit·root^m in R, or None."""
    m = 0
    while not delta.is_ground:
        quotient, remainder = delta.div([root])
        if remainder:
            return None
        delta = quotient[0]
        m += 1
    return m if delta else None


def verify_sandwich(cover, T, e_max=2, delta=None, sharpened=None, signature=True, threads=None):
    """
    C^{c·Δ} ⊆ C^⊤ ⊆ C^Δ with Δ = (1/N)·div δ, δ = Norm(ρ) and c = N/k for the f-torsion exponent k of div ρ.

    In degree e the Fedder ideal of C^⊤ on R is K_e = (ρ^(q-1))S ∩ R. Exponents are rounded on a root r of δ
    (``sharpened`` when given, else the monomial root of δ), δ = unit·r^m: the inner algebra has Fedder ideal
    (r^⌈m(q-1)/k⌉), whose generator must pass the divisor check, and K_e must lie in (r^⌈m(q-1)/N⌉). With ``sharpened``
    the equality K_e = (r^(q-1)) is checked as well.

    Args:
        cover (CoverSpec): The cover, over a polynomial ring
        T (SectionT): The section
        e_max (int): Degrees 1..e_max are checked
        delta: Optional replacement for Norm(ρ)
        sharpened: Optional root ε of δ
        signature (bool): Also compare s(S) with N·s(R, c·Δ) on window estimates
        threads (int): Passed to the estimates

    Returns:
        RuleReport
    """
    base = cover.base.ambient
    ram = find_generator_and_rho(cover, T)
    N = cover.N
    delta = ram.norm_rho if delta is None else (base.parse(delta) if isinstance(delta, str) else base.convert(delta))
    k = f_torsion_exponent(cover, ram.rho)
    c = Fraction(N, k) if k else None
    values = {"N": N, "k": k, "c": _fraction(c), "delta": poly_format(delta), "rho": poly_format(ram.rho)}
    failures = []
    if delta.is_ground:
        root, m = base.one, 0
    elif sharpened is not None:
        root = base.parse(sharpened) if isinstance(sharpened, str) else base.convert(sharpened)
        m = _root_of(delta, root)
        if m is None:
            return RuleReport("sandwich", False, [f"{poly_format(delta)} is not a power of {poly_format(root)}"],
                              values)
    else:
        root, m = monomial_root(delta)
    values.update({"root": poly_format(root), "m": m})
    if not k:
        return RuleReport("sandwich", False, ["no f-torsion exponent"], values)

    rows = []
    for e in range(1, e_max + 1):
        q = cover.base.p ** e
        K = contraction(cover, [ram.rho ** (q - 1)])
        inner_exponent = ceil_exponent(Fraction(m, k), q)
        outer_exponent = ceil_exponent(Fraction(m, N), q)
        inner_ok = transposability_divisor_check(cover, ram, PMinusLinearMap(e, root ** inner_exponent,
                                                                             cover.base))[0]
        outer_ok = K.issubset(Ideal(base, [root ** outer_exponent]))
        row = {"e": e, "K": K.to_list(), "inner_exponent": inner_exponent, "outer_exponent": outer_exponent,
               "inner": inner_ok, "outer": outer_ok}
        if not inner_ok:
            failures.append(f"C^(c·Δ) ⊄ C^⊤ in degree {e}")
        if not outer_ok:
            failures.append(f"C^⊤ ⊄ C^Δ in degree {e}")
        if sharpened is not None:
            row["sharpened"] = K == Ideal(base, [root ** (q - 1)])
            if not row["sharpened"]:
                failures.append(f"C^⊤ differs from C^(div {poly_format(root)}) in degree {e}")
        rows.append(row)
    values["rows"] = rows

    if signature:
        inner_spec = PairSpec(DivisorQ(((root, Fraction(m, k)),))) if m else FullSpec()
        up = fsignature_estimate(cover.total, FullSpec(), max(e_max, 2), threads=threads)
        down = fsignature_estimate(cover.base, inner_spec, max(e_max, 2), threads=threads)
        slack = (up.error or Fraction(0)) + N * (down.error or Fraction(0))
        values["signature"] = {"up": str(up.estimate), "down": str(down.estimate), "N": N,
                               "holds": up.estimate + slack >= N * down.estimate}
    return RuleReport("sandwich", not failures, failures, values)
