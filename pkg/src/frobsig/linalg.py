# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Dense linear algebra over F_p on numpy integer arrays.

Entries are kept reduced to [0, p). Elimination works on int64 arrays; with p <= 97 no intermediate product leaves
the int64 range.

"""

import numpy as np


class FpMatrix:
    """
    Rectangular matrix over F_p.

    Attributes:
        p (int): The characteristic
        data (numpy.ndarray): rows x cols int64 array with entries in [0, p)
    """

    def __init__(self, entries, p, cols=None):
        data = np.asarray(entries, dtype=np.int64)
        if data.ndim == 1 and data.size == 0:
            data = data.reshape(0, cols or 0)
        if data.ndim != 2:
            raise ValueError("matrix entries must form a rectangular 2-d array")
        self.p = p
        self.data = data % p

    @classmethod
    def zeros(cls, rows, cols, p):
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n, p):
        return cls(np.eye(n, dtype=np.int64), p)

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    def __repr__(self):
        return f"FpMatrix({self.data.tolist()}, p={self.p})"

    def __eq__(self, other):
        return isinstance(other, FpMatrix) and self.p == other.p and np.array_equal(self.data, other.data)

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            return FpMatrix(self.data @ other.data, self.p)
        return (self.data @ np.asarray(other, dtype=np.int64)) % self.p

    def transpose(self):
        return FpMatrix(self.data.T, self.p)

    def rref(self):
        """
        Reduced row echelon form.

        Returns:
            Tuple (R, pivots): R as an int64 array, pivots the list of pivot columns in order
        """
        p = self.p
        m = self.data.copy()
        rows, cols = m.shape
        pivots = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nonzero = np.nonzero(m[r:, c])[0]
            if nonzero.size == 0:
                continue
            k = r + nonzero[0]
            if k != r:
                m[[r, k]] = m[[k, r]]
            m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
            column = m[:, c].copy()
            column[r] = 0
            m = (m - np.outer(column, m[r])) % p
            pivots.append(c)
            r += 1
        return m, pivots


def matrix_rank(m):
    """Rank of ``m`` over F_p."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(m.rref()[1])


def solve_linear(m, rhs):
    """
    One solution of m·v = rhs, or None if the system is inconsistent.

    Free variables are set to 0 after elimination, so the choice is deterministic.

    Args:
        m (FpMatrix): Coefficient matrix
        rhs: Right hand side, length m.rows

    Returns:
        numpy.ndarray of length m.cols, or None
    """
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1)
    if rhs.size != m.rows:
        raise ValueError(f"right hand side has length {rhs.size}, expected {m.rows}")
    augmented = FpMatrix(np.hstack([m.data, rhs.reshape(-1, 1)]), m.p)
    reduced, pivots = augmented.rref()
    if pivots and pivots[-1] == m.cols:
        return None
    solution = np.zeros(m.cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        solution[c] = reduced[i, -1]
    return solution


def kernel_basis(m):
    """
    Basis of the right null space of ``m``, one vector per free column.

    Returns:
        list of numpy.ndarray, of length m.cols - rank(m)
    """
    p = m.p
    if m.rows == 0:
        return [v for v in np.eye(m.cols, dtype=np.int64)]
    reduced, pivots = m.rref()
    pivot_set = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = np.zeros(m.cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-reduced[i, f]) % p
        basis.append(v)
    return basis


def row_basis(m):
    """Nonzero rows of the reduced row echelon form of ``m``."""
    if m.rows == 0:
        return np.zeros((0, m.cols), dtype=np.int64)
    reduced, pivots = m.rref()
    return reduced[:len(pivots)]
