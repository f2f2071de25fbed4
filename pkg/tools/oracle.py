"""
Dense reference matrices for structured operators.

Column j of a materialized operator is the operator applied to position
basis state j. Everything here is brute force and only meant for the small
grids used in verification.
"""

import logging
from dataclasses import dataclass

import numpy as np

from env.errors import BudgetError, GridMismatchError
from env.grid import MAX_DIMENSION, CvState, TwoModeState
from env.zak import zak_array

logger = logging.getLogger(__name__)

TWO_MODE_BUDGET = 1024


@dataclass(frozen=True)
class DenseOperator:
    grids: tuple
    matrix: np.ndarray
    basis: str = "position"

    def __post_init__(self):
        grids = tuple(self.grids)
        dim = int(np.prod([g.dimension for g in grids]))
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (dim, dim):
            raise GridMismatchError(f"dense matrix {mat.shape} does not match dimension {dim}")
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "matrix", mat)

    @property
    def dimension(self):
        return self.matrix.shape[0]

    def __matmul__(self, other):
        _check_dims(self, other)
        return DenseOperator(self.grids, self.matrix @ other.matrix, self.basis)

    def __add__(self, other):
        _check_dims(self, other)
        return DenseOperator(self.grids, self.matrix + other.matrix, self.basis)

    def __mul__(self, scalar):
        return DenseOperator(self.grids, complex(scalar) * self.matrix, self.basis)

    __rmul__ = __mul__

    def dagger(self):
        return DenseOperator(self.grids, self.matrix.conj().T, self.basis)


def _check_dims(a, b):
    if a.matrix.shape != b.matrix.shape:
        raise GridMismatchError(f"dimension mismatch: {a.matrix.shape} vs {b.matrix.shape}")


def materialize(op, grid):
    """Dense D x D matrix of a single-mode operator (apply_array object or CvState -> CvState callable)."""
    if grid.dimension > MAX_DIMENSION:
        raise BudgetError(f"dense budget exceeded: D = {grid.dimension} > {MAX_DIMENSION}")
    eye = np.eye(grid.dimension, dtype=complex)
    if hasattr(op, "apply_array"):
        columns = op.apply_array(eye, grid)
    else:
        columns = np.stack([op(CvState(grid, e)).position().amplitudes for e in eye])
    return DenseOperator((grid,), columns.T)


def materialize_two_mode(op, grids):
    """Dense (D_a D_b)^2 matrix of a two-mode operator, row-major joint index j_a*D_b + j_b."""
    ga, gb = grids
    dim = ga.dimension * gb.dimension
    if dim > TWO_MODE_BUDGET:
        raise BudgetError(f"dense budget exceeded: D_a*D_b = {dim} > {TWO_MODE_BUDGET}")
    basis = np.eye(dim, dtype=complex).reshape(dim, ga.dimension, gb.dimension)
    if hasattr(op, "apply_array"):
        columns = op.apply_array(basis, grids)
    else:
        columns = np.stack([op(TwoModeState(grids, e)).amplitudes for e in basis])
    return DenseOperator((ga, gb), columns.reshape(dim, dim).T)


def compare(a, b):
    """Max-entry difference of two dense operators."""
    _check_dims(a, b)
    return float(np.max(np.abs(a.matrix - b.matrix)))


def hermiticity_defect(a):
    m = a.matrix
    return float(np.max(np.abs(m - m.conj().T)))


def unitarity_defect(a):
    m = a.matrix
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def identity(grid):
    return DenseOperator((grid,), np.eye(grid.dimension))


def diagonal(grid, values):
    return DenseOperator((grid,), np.diag(np.asarray(values, dtype=complex)))


def zak_matrix(grid):
    """Unitary D x D map from position amplitudes to Zak coefficients flattened as s*N_n + m."""
    eye = np.eye(grid.dimension, dtype=complex)
    return zak_array(eye, grid).reshape(grid.dimension, grid.dimension).T


def fiber_block_mask(grid):
    """Boolean mask over Zak-basis index pairs sharing a fiber (s mod N_s/2, m)."""
    s, m = np.divmod(np.arange(grid.dimension), grid.nn)
    fiber = (s % grid.half) * grid.nn + m
    return fiber[:, None] == fiber[None, :]


def off_block_mass(a):
    """Fraction of |A|^2 in the Zak basis that couples different fibers."""
    (grid,) = a.grids
    z = zak_matrix(grid)
    in_zak = z @ a.matrix @ z.conj().T
    weights = np.abs(in_zak) ** 2
    total = float(weights.sum())
    if total == 0.0:
        return 0.0
    return float(weights[~fiber_block_mask(grid)].sum()) / total
