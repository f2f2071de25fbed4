import math

import numpy as np
import pytest

from env.ancilla import ProductOperator
from env.dynamics import Boost, Shift, gate
from env.errors import BudgetError, GridMismatchError
from env.grid import make_grid
from env.zak import zak_forward, zak_inverse
from tools import oracle
from tools.gamma import GammaOperator, make_weight, modulated_identity


def _commutator_norm(a, b):
    return float(np.max(np.abs((a @ b + (-1) * (b @ a)).matrix)))


def test_full_period_shift_is_a_permutation(grid):
    dense = oracle.materialize(gate(Shift(2 * math.pi)), grid).matrix

    assert np.allclose(np.abs(dense).sum(axis=0), 1.0)
    assert np.allclose(np.abs(dense).sum(axis=1), 1.0)
    assert set(np.round(np.abs(dense).ravel(), 12)) == {0.0, 1.0}


def test_zak_round_trip_materializes_to_identity(grid):
    dense = oracle.materialize(lambda psi: zak_inverse(zak_forward(psi)), grid)

    assert oracle.compare(dense, oracle.identity(grid)) <= 1e-12


def test_zak_matrix_is_unitary(medium_grid):
    z = oracle.zak_matrix(medium_grid)

    assert oracle.unitarity_defect(oracle.DenseOperator((medium_grid,), z)) <= 1e-12


def test_boost_commutes_with_gamma_z_but_not_gamma_x(grid):
    zeta = make_weight("cos_theta", grid)
    boost = oracle.materialize(gate(Boost(1.0)), grid)

    assert _commutator_norm(boost, oracle.materialize(GammaOperator("z", zeta), grid)) <= 1e-12
    assert _commutator_norm(boost, oracle.materialize(GammaOperator("x", zeta), grid)) > 0.1


def test_period_shift_commutes_with_every_fiber_operator(grid):
    period = oracle.materialize(gate(Shift(2 * math.pi)), grid)

    for axis in "xyz":
        gamma = oracle.materialize(GammaOperator(axis, make_weight("mixed_cos", grid)), grid)
        assert _commutator_norm(period, gamma) <= 1e-12


def test_cosine_gamma_defects():
    g = make_grid(32, 8)
    dense = oracle.materialize(GammaOperator("z", make_weight("cos_theta", g)), g)

    assert oracle.hermiticity_defect(dense) <= 1e-12
    assert oracle.unitarity_defect(dense) == pytest.approx(1.0)


def test_materialize_is_linear(grid):
    a = GammaOperator("x", make_weight("cos_theta", grid)).fiber_operator()
    b = modulated_identity(make_weight("sin_pi_k", grid))

    combined = oracle.materialize(a + 2.0 * b, grid)
    separate = oracle.materialize(a, grid) + 2.0 * oracle.materialize(b, grid)

    assert oracle.compare(combined, separate) <= 1e-12


def test_single_mode_budget_raises_BudgetError():
    big = make_grid(128, 64, max_dimension=10000)

    with pytest.raises(BudgetError):
        oracle.materialize(gate(Shift(1.0)), big)


def test_two_mode_budget_raises_BudgetError():
    g = make_grid(8, 8)

    with pytest.raises(BudgetError):
        oracle.materialize_two_mode(lambda s: s, (g, g))


@pytest.mark.parametrize(
    "op, expected",
    [
        (gate(Shift(math.pi)), 0.0),
        (gate(Boost(1.0)), 0.0),
        (gate(Shift(math.pi / 4)), 1.0),
    ],
)
def test_off_block_mass(grid, op, expected):
    assert oracle.off_block_mass(oracle.materialize(op, grid)) == pytest.approx(expected, abs=1e-12)


def test_product_operator_matches_kron():
    g = make_grid(4, 2)
    a, b = gate(Boost(0.3)), gate(Shift(1.0))

    dense = oracle.materialize_two_mode(lambda s: ProductOperator(a, b).apply(s), (g, g))

    expected = np.kron(oracle.materialize(a, g).matrix, oracle.materialize(b, g).matrix)
    assert np.max(np.abs(dense.matrix - expected)) <= 1e-12


def test_mismatched_dense_shapes_raise(grid, medium_grid):
    with pytest.raises(GridMismatchError):
        oracle.compare(oracle.identity(grid), oracle.identity(medium_grid))
    with pytest.raises(GridMismatchError):
        oracle.DenseOperator((grid,), np.eye(3))
