# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Unit tests for test ideals, non-F-pure ideals and the sandwich comparison
"""

import math
import unittest
from fractions import Fraction

import numpy as np

from frobsig.cartier import DivisorQ, ExplicitSpec, FullSpec, PairSpec
from frobsig.ideals import Ideal, QuotientPresentation
from frobsig.pairs import PairContext, sandwich_tau_check, sigma, tau, tau_spec
from frobsig.polys import PolyRing, PrimeField


def presentation(p, names, relations=()):
    return QuotientPresentation(PolyRing(PrimeField(p), names), relations)


def cusp_pair(t):
    P = presentation(7, ["x", "y"])
    return PairContext(P, DivisorQ.parse(P.ambient, [["y^2 - x^3", t]]))


def line_pair(t):
    P = presentation(5, ["x"])
    return PairContext(P, DivisorQ.parse(P.ambient, [["x", t]]))


class Test(unittest.TestCase):
    def test_cusp_tau(self):
        """
        Test τ of the cusp pair is trivial below the threshold and (f) at t = 1
        """
        # App result
        half = tau(cusp_pair("1/2"))
        one = tau(cusp_pair("1"))

        # Compare
        self.assertListEqual(half.ideal.to_list(), ["1"], "τ(cusp, 1/2) is not the unit ideal")
        self.assertListEqual(one.ideal.to_list(), ["x^3 - y^2"], "τ(cusp, 1) is not (x^3 - y^2)")
        self.assertTrue(half.stabilized and one.stabilized, "Test ideal iteration did not stabilize")
        self.assertEqual(one.e_used, (1, 2), "Degree window incorrect")

    def test_cusp_sigma(self):
        """
        Test σ of the cusp pair at t = 1/2 is the unit ideal and contains τ
        """
        ctx = cusp_pair("1/2")
        result = sigma(ctx)
        self.assertListEqual(result.ideal.to_list(), ["1"], "σ(cusp, 1/2) is not the unit ideal")
        self.assertTrue(tau(cusp_pair("1")).ideal.issubset(sigma(cusp_pair("1")).ideal), "τ ⊄ σ at t = 1")

    def test_cusp_threshold(self):
        """
        Test τ(F_7[x, y], (x^2 + y^3)^(5/6)) is the maximal ideal and σ is the unit ideal
        """
        # Setup
        P = presentation(7, ["x", "y"])
        ctx = PairContext(P, DivisorQ.parse(P.ambient, [["x^2 + y^3", "5/6"]]))

        # App result
        test_ideal = tau(ctx)
        nonpure = sigma(ctx)

        # Compare
        self.assertEqual(test_ideal.ideal, Ideal.maximal(P.ambient), "τ at the threshold 5/6 is not (x, y)")
        self.assertTrue(nonpure.ideal.is_unit, "σ at the threshold 5/6 is not the unit ideal")
        self.assertTrue(test_ideal.stabilized and nonpure.stabilized, "Iteration at the threshold did not stabilize")

    def test_skoda(self):
        """
        Test τ(f^(t+1)) = f·τ(f^t) for the monomial f = x^2·y on F_3[x, y]
        """
        # Setup
        P = presentation(3, ["x", "y"])
        ring = P.ambient
        f = ring.parse("x^2*y")
        for t, expected in (("1/3", "1"), ("1/2", "x"), ("3/4", "x"), ("1", "x^2*y")):
            t = Fraction(t)

            # App result
            low = tau(PairContext(P, DivisorQ(((f, t),)))).ideal
            high = tau(PairContext(P, DivisorQ(((f, t + 1),)))).ideal

            # Compare
            self.assertEqual(low, Ideal(ring, [expected]), f"τ(f^{t}) is not ({expected})")
            self.assertEqual(high, Ideal(ring, [f]) * low, f"τ(f^{t + 1}) is not f·τ(f^{t})")

    def test_monomial_pairs(self):
        """
        Test τ((x^a·y^b)^t) = (x^⌊ta⌋·y^⌊tb⌋) on random monomials, stopping early exactly at the unit ideal
        """
        # Setup
        rng = np.random.default_rng(31)
        P = presentation(3, ["x", "y"])
        ring = P.ambient
        for _ in range(50):
            a, b = (int(v) for v in rng.integers(0, 4, size=2))
            if a + b == 0:
                a = 1
            t = Fraction(int(rng.integers(1, 9)), 4)

            # App result
            result = tau(PairContext(P, DivisorQ(((ring.monomial((a, b)), t),))))

            # Manual result
            expected = Ideal(ring, [ring.monomial((math.floor(t * a), math.floor(t * b)))])
            unit = t * a < 1 and t * b < 1

            # Compare
            self.assertEqual(result.ideal, expected, f"τ((x^{a}·y^{b})^{t}) incorrect")
            self.assertEqual(result.ideal.is_unit, unit, f"Unit verdict for (x^{a}·y^{b})^{t} incorrect")
            self.assertEqual(result.note.startswith("unit ideal"), unit,
                             f"Unit short-circuit not reported for (x^{a}·y^{b})^{t}")

    def test_line_tau(self):
        """
        Test τ(F_5[x], t·div(x)) = (x^⌊t⌋)
        """
        for t, expected in (("1/4", ["1"]), ("3/4", ["1"]), ("5/4", ["x"]), ("2", ["x^2"])):
            self.assertListEqual(tau(line_pair(t)).ideal.to_list(), expected, f"τ at t = {t} incorrect")

    def test_line_sigma(self):
        """
        Test σ(F_5[x], t·div(x)) is the unit ideal up to t = 1 and (x) for t = 3/2 and 2
        """
        self.assertListEqual(sigma(line_pair("1/2")).ideal.to_list(), ["1"], "σ at t = 1/2 incorrect")
        self.assertListEqual(sigma(line_pair("1")).ideal.to_list(), ["1"], "σ at t = 1 incorrect")
        self.assertListEqual(sigma(line_pair("3/2")).ideal.to_list(), ["x"], "σ at t = 3/2 incorrect")
        self.assertListEqual(sigma(line_pair("2")).ideal.to_list(), ["x"], "σ at t = 2 incorrect")

    def test_invalid_pairs(self):
        """
        Test negative coefficients are refused and τ needs a polynomial ring
        """
        P = presentation(5, ["x", "y"], ["x*y"])
        with self.assertRaises(ValueError, msg="Negative divisor accepted"):
            PairContext(P, DivisorQ.parse(P.ambient, [["x", "-1/2"]]))
        with self.assertRaises(ValueError, msg="Negative ideal exponent accepted"):
            PairContext(P, DivisorQ(), (Ideal(P.ambient, ["x"]), Fraction(-1)))
        with self.assertRaises(ValueError, msg="τ computed on a quotient"):
            tau(PairContext(P))

    def test_tau_spec_ideal_part(self):
        """
        Test τ of (F_5[x, y], (x, y)^t) is trivial for t < 2 and m for t = 2
        """
        P = presentation(5, ["x", "y"])
        m = Ideal.maximal(P.ambient)
        small = tau_spec(P, PairSpec(DivisorQ(), (m, Fraction(3, 2))))
        edge = tau_spec(P, PairSpec(DivisorQ(), (m, Fraction(2))))
        self.assertTrue(small.ideal.is_unit, "τ(m^(3/2)) is not the unit ideal")
        self.assertEqual(edge.ideal, m, "τ(m^2) is not m")

    def test_sandwich(self):
        """
        Test the sandwich check passes for C_e = (x) under the full algebra and reports the first failing degree
        """
        # Setup
        ctx = PairContext(presentation(5, ["x"]))
        ring = ctx.presentation.ambient
        constant = ExplicitSpec(lambda e: [ring.parse("x")], label="(x)")
        pair = PairSpec(DivisorQ.parse(ring, [["x", "1"]]))

        # App result
        passing = sandwich_tau_check(constant, FullSpec(), ring.parse("x"), ctx)
        failing = sandwich_tau_check(pair, FullSpec(), ring.parse("x"), ctx)

        # Compare
        self.assertTrue(passing.holds, "Sandwich with equal test ideals did not hold")
        self.assertEqual(passing.tau_c.ideal, passing.tau_d.ideal, "Test ideals differ")
        self.assertFalse(failing.holds, "Sandwich with U_1(D)·x ⊄ U_1(C) held")
        self.assertEqual(failing.first_violation, 1, "First violation not in degree 1")
        self.assertEqual(failing.reason, "U_e(D)·c ⊄ U_e(C)", "Violation reason incorrect")
        with self.assertRaises(ValueError, msg="Zero sandwich element accepted"):
            sandwich_tau_check(constant, FullSpec(), ring.zero, ctx)


if __name__ == '__main__':
    unittest.main()
