# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Unit tests for dense linear algebra over F_p
"""

import unittest

import numpy as np

from frobsig.linalg import FpMatrix, kernel_basis, matrix_rank, row_basis, solve_linear


class Test(unittest.TestCase):
    def test_rank_small(self):
        """
        Test rank of identity, zero and proportional matrices
        """
        self.assertEqual(matrix_rank(FpMatrix.identity(3, 5)), 3, "Rank of the identity is not 3")
        self.assertEqual(matrix_rank(FpMatrix.zeros(4, 2, 5)), 0, "Rank of the zero matrix is not 0")
        self.assertEqual(matrix_rank(FpMatrix([[1, 2], [2, 4]], 5)), 1, "Proportional rows have rank other than 1")
        self.assertEqual(matrix_rank(FpMatrix([[1, 1], [1, 3]], 2)), 1, "Rank not computed modulo 2")

    def test_solve_linear(self):
        """
        Test consistent systems are solved with free variables set to zero and inconsistent ones return None
        """
        b = [1, 4, 2]
        self.assertEqual(solve_linear(FpMatrix.identity(3, 5), b).tolist(), b, "Identity system not solved")
        self.assertIsNone(solve_linear(FpMatrix.zeros(2, 2, 5), [1, 0]), "Inconsistent system returned a solution")
        self.assertEqual(solve_linear(FpMatrix([[1, 1]], 3), [1]).tolist(), [1, 0],
                         "Free variable not set to zero")
        with self.assertRaises(ValueError, msg="Right hand side of the wrong length was accepted"):
            solve_linear(FpMatrix.identity(2, 5), [1, 2, 3])

    def test_kernel_dimension(self):
        """
        Test the kernel has dimension cols - rank and is annihilated by the matrix on random input
        """
        # Setup
        rng = np.random.default_rng(7)
        for p in (2, 3, 5, 97):
            for _ in range(10):
                rows, cols = rng.integers(1, 7, size=2)
                m = FpMatrix(rng.integers(0, p, size=(rows, cols)), p)

                # App result
                kernel = kernel_basis(m)

                # Compare
                self.assertEqual(len(kernel), m.cols - matrix_rank(m), "Kernel dimension is not cols - rank")
                for v in kernel:
                    self.assertFalse(np.any(m @ v), "Kernel vector not annihilated")

    def test_row_basis(self):
        """
        Test the row basis spans the row space and has rank many rows
        """
        m = FpMatrix([[1, 2, 3], [2, 4, 6], [0, 1, 1]], 7)
        basis = row_basis(m)
        self.assertEqual(len(basis), 2, "Row basis has the wrong size")
        stacked = FpMatrix(np.vstack([basis, m.data]), 7)
        self.assertEqual(matrix_rank(stacked), 2, "Row basis does not span the row space")

    def test_solve_random(self):
        """
        Test solutions of random consistent systems satisfy the system
        """
        rng = np.random.default_rng(11)
        for _ in range(20):
            m = FpMatrix(rng.integers(0, 5, size=(4, 6)), 5)
            x = rng.integers(0, 5, size=6)
            rhs = m @ x
            solution = solve_linear(m, rhs)
            self.assertIsNotNone(solution, "Consistent system reported inconsistent")
            self.assertTrue(np.array_equal(m @ solution, rhs), "Solution does not satisfy the system")


if __name__ == '__main__':
    unittest.main()
