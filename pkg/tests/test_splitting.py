# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Unit tests for Fedder's criterion, splitting numbers, nonsplit ideals, splitting primes and F-signature estimates
"""

import unittest
from fractions import Fraction

import numpy as np

from frobsig.cartier import DivisorQ, FullSpec, PairSpec, PrincipalSpec
from frobsig.ideals import Ideal, QuotientPresentation, colength
from frobsig.polys import PolyRing, PrimeField
from frobsig.splitting import SplittingReport, SplittingRow, extrapolate, fedder_fpure, fsignature_estimate, \
    nonsplit_ideal, splitting_number, splitting_prime, splitting_ratio

FULL = FullSpec()


def presentation(p, names, relations=()):
    return QuotientPresentation(PolyRing(PrimeField(p), names), relations)


def veronese():
    return presentation(5, ["s", "t", "u"], ["s*u - t^2"])


def pair(P, divisor):
    return PairSpec(DivisorQ.parse(P.ambient, divisor))


def random_poly(rng, ring, degree):
    """A random polynomial of positive degree at most ``degree`` with one to three terms."""
    terms = {}
    while not terms:
        for _ in range(int(rng.integers(1, 4))):
            exponents = tuple(int(a) for a in rng.integers(0, degree + 1, size=ring.n))
            if 0 < sum(exponents) <= degree:
                terms[exponents] = int(rng.integers(1, ring.p))
    return ring.from_terms(terms)


class Test(unittest.TestCase):
    def test_fedder_verdicts(self):
        """
        Test Fedder's criterion on the Fermat cubic at p = 3 and p = 7, a Veronese, a polynomial ring and a p = 2 cubic
        """
        fermat = ["x^3 + y^3 + z^3"]
        self.assertFalse(fedder_fpure(presentation(3, ["x", "y", "z"], fermat)), "Fermat cubic F-pure at p=3")
        self.assertTrue(fedder_fpure(presentation(7, ["x", "y", "z"], fermat)), "Fermat cubic not F-pure at p=7")
        self.assertTrue(fedder_fpure(veronese()), "Veronese not F-pure")
        self.assertTrue(fedder_fpure(presentation(2, ["x"])), "Polynomial ring not F-pure")
        self.assertFalse(fedder_fpure(presentation(7, ["x", "y"], ["y^2 - x^3"])), "Cusp reported F-pure")
        cubic = presentation(2, ["x", "y", "z", "u", "v"], ["x^3 + y^3 + x*y*z + u*v"])
        self.assertTrue(fedder_fpure(cubic), "Cubic hypersurface x^3 + y^3 + xyz + uv not F-pure at p=2")

    def test_free_rank_polynomial_ring(self):
        """
        Test a_e = q^n for the full algebra of a polynomial ring
        """
        P = presentation(3, ["x", "y"])
        for e in (1, 2):
            self.assertEqual(splitting_number(P, FULL, e), 3 ** (2 * e), f"a_{e} of F_3[x, y] is not q^2")

    def test_veronese_splitting_numbers(self):
        """
        Test a_e of the second Veronese of F_5[x, y] against the free rank (q^2 + 1)/2
        """
        # Setup
        P = veronese()

        # App result
        app = [splitting_number(P, FULL, e) for e in (1, 2)]

        # Manual result
        manual = [(q ** 2 + 1) // 2 for q in (5, 25)]

        # Compare
        self.assertListEqual(app, manual, "Veronese splitting numbers incorrect")
        self.assertListEqual(app, [13, 313], "Veronese splitting numbers are not 13, 313")
        self.assertEqual(splitting_number(P, FULL, 1, method="colength"), 13,
                         "Colength method disagrees with the pairing")
        with self.assertRaises(ValueError, msg="Unknown method accepted"):
            splitting_number(P, FULL, 1, method="guess")

    def test_quadric_pair(self):
        """
        Test a_e = ((q+1)/2)^2 for the pair (F_3[x1, x2], (1/2)div(x1 x2)) and the estimate 13/54
        """
        # Setup
        P = presentation(3, ["x1", "x2"])
        spec = pair(P, [["x1*x2", "1/2"]])

        # App result
        report = fsignature_estimate(P, spec, 2)

        # Manual result
        manual = [((q + 1) // 2) ** 2 for q in (3, 9)]

        # Compare
        self.assertListEqual([r.a_e for r in report.rows], manual, "Quadric pair splitting numbers incorrect")
        self.assertEqual(report.delta, 2, "Normalization exponent is not the dimension")
        self.assertEqual(report.n, 1, "gcd of the splitting degrees is not 1")
        self.assertEqual(report.estimate, Fraction(13, 54), "Richardson estimate is not 13/54")
        self.assertEqual(report.error, Fraction(11, 81), "Error bar is not |25/81 - 4/9|")
        self.assertTrue(report.stabilized, "Estimate within 1/3 not reported stabilized")

    def test_dense_and_colength_agree(self):
        """
        Test non-homogeneous Fedder elements give the same a_e by the dense pairing and by colength
        """
        P = presentation(5, ["x"])
        spec = pair(P, [["x + x^2", "1/2"]])
        self.assertEqual(splitting_number(P, spec, 1), 3, "Dense pairing a_1 is not 3")
        self.assertEqual(splitting_number(P, spec, 1, method="colength"), 3, "Colength a_1 is not 3")
        self.assertEqual(splitting_number(P, pair(P, [["x", "-1"]]), 1), 0, "Empty algebra has a_e != 0")

    def test_nonsplit_ideal(self):
        """
        Test the nonsplit ideal has colength a_e and is m^[q] for a polynomial ring
        """
        # Setup
        P = veronese()
        R = presentation(3, ["x", "y"])
        line = presentation(5, ["x"])

        # App result
        veronese_ideal = nonsplit_ideal(P, FULL, 1, check=True)
        regular_ideal = nonsplit_ideal(R, FULL, 1)
        pair_ideal = nonsplit_ideal(line, pair(line, [["x", "1/2"]]), 1)

        # Compare
        self.assertEqual(colength(veronese_ideal), 13, "Colength of I_1 is not a_1")
        self.assertIn("s*u - t^2", veronese_ideal, "I_1 does not contain the relations")
        self.assertEqual(regular_ideal, Ideal(R.ambient, ["x^3", "y^3"]), "I_1 of F_3[x, y] is not m^[3]")
        self.assertEqual(pair_ideal, Ideal(line.ambient, ["x^3"]), "I_1 of (1/2)div(x) is not (x^3)")

    def test_splitting_number_oracles(self):
        """
        Test the pairing rank, q^n - colength(U_e + m^[q]) and colength(I_e) agree on random pairs and hypersurfaces
        """
        rng = np.random.default_rng(19)
        for p, e in ((2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2)):
            for _ in range(3):
                # Setup
                ring = PolyRing(PrimeField(p), ["x", "y"])
                g = random_poly(rng, ring, 3)
                f = random_poly(rng, ring, 3)
                t = Fraction(int(rng.integers(1, 6)), 4)
                cases = [(QuotientPresentation(ring), PairSpec(DivisorQ(((g, t),)))),
                         (QuotientPresentation(ring, [f]), FULL)]

                for P, spec in cases:
                    # App result
                    pairing = splitting_number(P, spec, e)
                    by_colength = splitting_number(P, spec, e, method="colength")

                    # Manual result
                    oracle = colength(nonsplit_ideal(P, spec, e))

                    # Compare
                    label = f"p={p}, e={e}, {P!r}, {spec.describe()}"
                    self.assertEqual(pairing, by_colength, f"Pairing and colength a_e differ for {label}")
                    self.assertEqual(pairing, oracle, f"a_e is not the colength of I_e for {label}")

    def test_splitting_prime(self):
        """
        Test the splitting prime of (F_5[x], div(x)) is (x) and non-F-pure rings report the unit ideal
        """
        # Setup
        line = presentation(5, ["x"])
        fermat = presentation(3, ["x", "y", "z"], ["x^3 + y^3 + z^3"])

        # App result
        sp = splitting_prime(line, pair(line, [["x", "1"]]), 2)
        none = splitting_prime(fermat, FULL, 2)

        # Compare
        self.assertListEqual(sp.ideal.to_list(), ["x"], "Splitting prime of div(x) is not (x)")
        self.assertTrue(sp.stabilized, "Splitting prime did not stabilize")
        self.assertTrue(sp.f_pure, "F-pure pair reported not F-pure")
        self.assertEqual(sp.e_used, (1, 2), "Degrees used incorrect")
        self.assertTrue(none.ideal.is_unit, "Non-F-pure ring has a proper splitting prime")
        self.assertFalse(none.f_pure, "Non-F-pure ring reported F-pure")
        with self.assertRaises(ValueError, msg="e_max = 1 accepted"):
            splitting_prime(line, FULL, 1)

    def test_splitting_prime_pair_f2(self):
        """
        Test the splitting prime of (F_2[y, z, u, v], div(y^3 + uv)) is (y^3 + uv) once its degree fits the bound
        """
        # Setup
        A = presentation(2, ["y", "z", "u", "v"])
        spec = pair(A, [["y^3 + u*v", "1"]])

        # App result
        sp = splitting_prime(A, spec, 4)

        # Compare
        self.assertEqual(sp.ideal, Ideal(A.ambient, ["y^3 + u*v"]), "Splitting prime is not (y^3 + uv)")
        self.assertTrue(sp.stabilized, "Splitting prime did not stabilize by e = 4")
        self.assertEqual(sp.e_used, (1, 2, 3, 4), "Degrees used incorrect")

    def test_splitting_prime_plane(self):
        """
        Test (F_5[x, y], div(x)) has I_1 = (x, y^5) and splitting prime (x)
        """
        P = presentation(5, ["x", "y"])
        spec = pair(P, [["x", "1"]])
        self.assertEqual(nonsplit_ideal(P, spec, 1), Ideal(P.ambient, ["x", "y^5"]), "I_1 is not (x, y^5)")
        sp = splitting_prime(P, spec, 2)
        self.assertEqual(sp.ideal, Ideal(P.ambient, ["x"]), "Splitting prime is not (x)")
        self.assertTrue(sp.stabilized, "Splitting prime did not stabilize")

    def test_splitting_numbers_decrease_with_divisor(self):
        """
        Test a_e(R, Δ) ≥ a_e(R, Δ') whenever Δ ≤ Δ'
        """
        P = presentation(5, ["x", "y"])
        chain = [[], [["x", "1/4"]], [["x", "1/2"]], [["x", "1/2"], ["y^2 - x^3", "1/3"]],
                 [["x", "3/4"], ["y^2 - x^3", "1/3"]], [["x", "1"], ["y^2 - x^3", "1/2"]]]
        for e in (1, 2):
            values = [splitting_number(P, pair(P, divisor), e) for divisor in chain]
            for smaller, larger, divisor in zip(values, values[1:], chain[1:]):
                self.assertGreaterEqual(smaller, larger, f"a_{e} increased when Δ grew to {divisor}")
            self.assertEqual(values[0], 5 ** (2 * e), f"a_{e} of the zero divisor is not q^2")

    def test_splitting_ratio(self):
        """
        Test the splitting ratio of (F_5[x], div(x)) is 1 and is refused when not F-pure
        """
        line = presentation(5, ["x"])
        report = splitting_ratio(line, pair(line, [["x", "1"]]), 2)
        self.assertEqual(report.estimate, 1, "Splitting ratio is not 1")
        self.assertEqual(report.delta, 0, "R/sp is not 0-dimensional")
        self.assertListEqual(report.notes["splitting_prime"], ["x"], "Splitting prime not noted")
        fermat = presentation(3, ["x", "y", "z"], ["x^3 + y^3 + z^3"])
        with self.assertRaises(ValueError, msg="Splitting ratio of a non-F-pure ring computed") as caught:
            splitting_ratio(fermat, FULL, 2)
        self.assertIn("not F-pure", str(caught.exception), "Failure not reported as not F-pure")

    def test_principal_off_degrees(self):
        """
        Test Φ^2(x^4·-) on F_5[x] has a_e = 0 in odd degrees and signature 1 - 4/24 = 5/6
        """
        # Setup
        P = presentation(5, ["x"])
        spec = PrincipalSpec(P.ambient.parse("x^4"), 2)

        # App result
        report = fsignature_estimate(P, spec, 4)
        sp = splitting_prime(P, spec, 4)
        ratio = splitting_ratio(P, spec, 4)

        # Manual result
        a_e = [0, 25 - 4, 0, 625 - (4 * 25 + 4)]

        # Compare
        self.assertListEqual([r.a_e for r in report.rows], a_e, "Splitting numbers of Φ^2(x^4·-) incorrect")
        self.assertEqual(report.n, 2, "Period of the principal algebra is not 2")
        self.assertEqual(report.estimate, Fraction(5, 6), "Signature of Φ^2(x^4·-) is not 5/6")
        self.assertTrue(report.stabilized, "Estimate did not stabilize")
        self.assertTrue(nonsplit_ideal(P, spec, 1).is_unit, "I_1 of an empty degree is not the unit ideal")
        self.assertEqual(nonsplit_ideal(P, spec, 2), Ideal(P.ambient, ["x^21"]), "I_2 is not (x^21)")
        self.assertTrue(sp.ideal.is_zero, "Splitting prime of Φ^2(x^4·-) is not 0")
        self.assertEqual(sp.e_used, (2, 4), "Splitting prime did not step by 2")
        self.assertTrue(sp.stabilized, "Splitting prime did not stabilize")
        self.assertEqual(ratio.estimate, Fraction(5, 6), "Splitting ratio of Φ^2(x^4·-) is not 5/6")

    def test_estimate_threads_and_report(self):
        """
        Test threaded estimates match sequential ones and reports survive a dictionary round trip
        """
        # Setup
        P = veronese()

        # App result
        sequential = fsignature_estimate(P, FULL, 2)
        threaded = fsignature_estimate(P, FULL, 2, threads=2)

        # Compare
        self.assertListEqual([r.a_e for r in threaded.rows], [r.a_e for r in sequential.rows],
                             "Threaded splitting numbers differ")
        self.assertAlmostEqual(float(sequential.estimate), 0.496, 6, "Veronese estimate is not 0.496")
        self.assertEqual(SplittingReport.from_dict(sequential.to_dict()), sequential, "Report round trip failed")
        frame = sequential.to_frame()
        self.assertListEqual(list(frame.columns), ["e", "q", "a_e", "ratio", "ratio_float"], "Frame columns")
        self.assertListEqual(frame["a_e"].tolist(), [13, 313], "Frame splitting numbers incorrect")

    def test_extrapolate_edge_cases(self):
        """
        Test extrapolation with no splittings and with a single usable degree
        """
        rows = [SplittingRow(1, 5, 0, Fraction(0)), SplittingRow(2, 25, 3, Fraction(3, 625))]
        self.assertEqual(extrapolate(rows, 0), (Fraction(0), Fraction(0), True), "Zero signature not exact")
        self.assertEqual(extrapolate(rows, 2), (Fraction(3, 625), None, False), "Single degree not unstabilized")


if __name__ == '__main__':
    unittest.main()
