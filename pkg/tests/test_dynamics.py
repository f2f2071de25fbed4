import math

import numpy as np
import pytest

from env.dynamics import (
    IDENTITY,
    Boost,
    GaussianGate,
    MomShear,
    PosShear,
    Shift,
    apply_gaussian_gate,
    gate,
    literal_u1,
    random_gate,
    sheared_shift,
)
from env.errors import DomainError
from env.grid import MOMENTUM
from tools import oracle


def test_shift_by_one_sample_is_a_cyclic_permutation(grid):
    dense = oracle.materialize(gate(Shift(grid.dtheta)), grid)

    expected = np.roll(np.eye(grid.dimension), 1, axis=1)
    assert np.max(np.abs(dense.matrix - expected)) <= 1e-12


def test_shift_translates_position(grid, random_cv_state):
    psi = random_cv_state(grid)

    out = apply_gaussian_gate(psi, gate(Shift(3 * grid.dtheta)))

    assert np.allclose(out.amplitudes, np.roll(psi.amplitudes, -3), atol=1e-12)


def test_boost_is_a_position_phase_ramp(grid, random_cv_state):
    psi = random_cv_state(grid)

    out = apply_gaussian_gate(psi, gate(Boost(0.7)))

    assert np.allclose(out.amplitudes, np.exp(0.7j * grid.theta) * psi.amplitudes, atol=1e-14)


def test_literal_u1_collapses_to_plain_shift(medium_grid):
    a = oracle.materialize(literal_u1(), medium_grid)
    b = oracle.materialize(gate(Shift(1.0)), medium_grid)

    assert oracle.compare(a, b) <= 1e-12


def test_dagger_inverts_random_gates(medium_grid, rng, random_cv_state):
    psi = random_cv_state(medium_grid)
    for _ in range(5):
        g = random_gate(rng)

        back = apply_gaussian_gate(apply_gaussian_gate(psi, g), g.dagger())

        assert np.max(np.abs(back.amplitudes - psi.amplitudes)) <= 1e-12


def test_random_gates_are_unitary(medium_grid, rng):
    g = random_gate(rng, n_factors=6)

    assert g.unitarity_defect(medium_grid) <= 1e-12
    assert oracle.unitarity_defect(oracle.materialize(g, medium_grid)) <= 1e-12


def test_sheared_shift_is_unitary(grid):
    dense = oracle.materialize(sheared_shift(0.4, 0.05), grid)

    assert oracle.unitarity_defect(dense) <= 1e-12


def test_momentum_input_stays_in_momentum(grid, random_cv_state):
    psi = random_cv_state(grid).momentum()

    out = apply_gaussian_gate(psi, gate(MomShear(0.3), PosShear(0.01)))

    assert out.representation == MOMENTUM
    assert out.norm == pytest.approx(1.0)


def test_composition_applies_right_factor_first(grid, random_cv_state):
    psi = random_cv_state(grid)
    left, right = gate(Boost(1.0)), gate(Shift(math.pi / 3))

    composed = apply_gaussian_gate(psi, left @ right)
    sequential = apply_gaussian_gate(apply_gaussian_gate(psi, right), left)

    assert np.max(np.abs(composed.amplitudes - sequential.amplitudes)) <= 1e-12


def test_identity_gate_materializes_to_identity(grid):
    assert oracle.compare(oracle.materialize(IDENTITY, grid), oracle.identity(grid)) == 0.0


def test_non_unit_phase_raises_DomainError():
    with pytest.raises(DomainError) as error:
        GaussianGate((), phase=2.0)

    assert error.value.args[0] == "global phase must have unit magnitude"


def test_non_finite_parameter_raises_DomainError():
    with pytest.raises(DomainError) as error:
        Shift(float("nan"))

    assert error.value.args[0] == "Shift parameter must be finite"
