import math

import numpy as np
import pytest

from env.errors import DomainError, GridMismatchError, WeightError
from env.grid import TwoModeState, make_grid
from tools import oracle
from tools.codec import encode_basis, encode_logical, encode_two_mode, make_envelope
from tools.gamma import (
    GammaOperator,
    TwoModeGammaSum,
    apply_gamma,
    apply_modulated_identity,
    apply_rotation,
    apply_two_mode_gamma,
    complement_weight,
    fiber_blocks_of,
    make_weight,
    modulated_identity,
    povm_pair,
    rotation_operator,
)


def test_complex_weight_raises_WeightError(grid):
    values = np.ones((grid.half, grid.nn)) * (1 + 0.5j)

    with pytest.raises(WeightError) as error:
        make_weight("custom", grid, values=values)

    assert error.value.args[0] == "weight must be real"


def test_unknown_weight_family_raises_WeightError(grid):
    with pytest.raises(WeightError):
        make_weight("bogus", grid)


def test_weight_families_are_tabulated_on_the_half_grid(grid):
    th = grid.theta_bar[: grid.half]

    assert np.allclose(make_weight("cos_theta", grid).values[:, 1], np.cos(th))
    assert np.allclose(make_weight("sin_pi_k", grid).values[2], np.sin(np.pi * grid.k_bar))
    assert np.allclose(make_weight("mixed_cos", grid).values, np.cos(th[:, None] - np.pi * grid.k_bar[None, :]))


@pytest.mark.parametrize("axis", ["x", "y", "z", (1.0, 2.0, -0.5)])
def test_gamma_is_hermitian_for_every_axis(grid, axis):
    op = GammaOperator(axis, make_weight("cos_theta", grid)).fiber_operator()

    assert op.hermiticity_defect() <= 1e-15


def test_cosine_gamma_z_is_multiplication_by_cos_theta(medium_grid):
    dense = oracle.materialize(GammaOperator("z", make_weight("cos_theta", medium_grid)), medium_grid)

    expected = oracle.diagonal(medium_grid, np.cos(medium_grid.theta))
    assert oracle.compare(dense, expected) <= 1e-12


@pytest.mark.parametrize("family", ["cos_theta", "cos_pi_k", "mixed_cos"])
def test_povm_pair_is_complete(medium_grid, family):
    gamma, gamma_prime = povm_pair(GammaOperator("z", make_weight(family, medium_grid)))
    a, b = gamma.fiber_operator(), gamma_prime.fiber_operator()

    total = (a @ a + b @ b).matrices

    assert np.max(np.abs(total - np.eye(2))) <= 1e-12


def test_weight_above_one_is_not_completable(grid):
    with pytest.raises(WeightError) as error:
        complement_weight(make_weight("constant", grid, value=1.5))

    assert error.value.args[0] == "not completable"


def test_complement_of_constant_keeps_family(grid):
    prime = complement_weight(make_weight("constant", grid, value=0.6))

    assert prime.family == "constant"
    assert prime.params["value"] == pytest.approx(0.8)


def test_apply_gamma_reports_norm_without_renormalizing(grid, uniform_env):
    zero = encode_basis(0, uniform_env)

    out, norm = apply_gamma(zero, GammaOperator("z", make_weight("cos_theta", grid)))

    assert norm == pytest.approx(math.sqrt(0.5))
    assert out.norm == pytest.approx(norm)


def test_flip_moves_basis_state_to_other_sector(grid, gaussian_env):
    zero = encode_basis(0, gaussian_env)

    out, _ = apply_gamma(zero, GammaOperator("x", make_weight("cos_theta", grid)))

    sectors = fiber_blocks_of(out)
    assert np.max(np.abs(sectors[0])) <= 1e-14
    assert abs(np.vdot(zero.amplitudes, out.amplitudes)) <= 1e-12


def test_modulated_identity_scales_fibers(grid, uniform_env):
    psi = encode_logical(1.1, 0.2, uniform_env)
    zeta = make_weight("sin_theta", grid)

    out, _ = apply_modulated_identity(psi, zeta)

    before, after = fiber_blocks_of(psi), fiber_blocks_of(out)
    assert np.allclose(after, before * zeta.values[None], atol=1e-14)


def test_rotation_expands_into_identity_and_gamma(grid, random_cv_state):
    psi = random_cv_state(grid)
    zeta = make_weight("mixed_cos", grid)
    beta = 0.83

    rotated, _ = apply_rotation(psi, "y", beta, zeta)
    ident, _ = apply_modulated_identity(psi, zeta)
    flipped, _ = apply_gamma(psi, GammaOperator("y", zeta))

    expected = math.cos(beta) * ident.amplitudes + 1j * math.sin(beta) * flipped.amplitudes
    assert np.max(np.abs(rotated.amplitudes - expected)) <= 1e-12


def test_rotation_of_logical_zero_gives_primed_superposition(grid, gaussian_env):
    zeta = make_weight("cos_theta", grid)
    beta = 0.4

    out, _ = apply_rotation(encode_basis(0, gaussian_env), "x", beta, zeta)

    sectors = fiber_blocks_of(out)
    primed = zeta.values * gaussian_env.values
    assert np.allclose(sectors[0], math.cos(beta) * primed, atol=1e-14)
    assert np.allclose(sectors[1], 1j * math.sin(beta) * primed, atol=1e-14)


def test_rotation_of_logical_one_gives_companion_superposition(grid, gaussian_env):
    zeta = make_weight("cos_theta", grid)
    beta = 0.4

    out, _ = apply_rotation(encode_basis(1, gaussian_env), "x", beta, zeta)

    sectors = fiber_blocks_of(out)
    primed = zeta.values * gaussian_env.values
    assert np.allclose(sectors[0], 1j * math.sin(beta) * primed, atol=1e-14)
    assert np.allclose(sectors[1], math.cos(beta) * primed, atol=1e-14)


def test_rotations_compose_fiberwise(grid, random_cv_state):
    psi = random_cv_state(grid)
    z1, z2 = make_weight("cos_theta", grid), make_weight("cos_pi_k", grid)

    composed = rotation_operator("z", 0.3, z1) @ rotation_operator("z", -1.2, z2)
    direct = rotation_operator("z", 0.3 - 1.2, z1 * z2)

    assert np.max(np.abs(composed.apply(psi).amplitudes - direct.apply(psi).amplitudes)) <= 1e-12


def test_unit_weight_gammas_are_unitary_and_cosine_is_not(grid):
    unit = make_weight("constant", grid)

    for axis in "xyz":
        assert GammaOperator(axis, unit).fiber_operator().unitarity_defect() <= 1e-15
    assert GammaOperator("z", make_weight("cos_theta", grid)).fiber_operator().unitarity_defect() == pytest.approx(1.0)


def test_two_mode_product_term_matches_sequential_application(grid, rng):
    za, zb = make_weight("cos_theta", grid), make_weight("sin_pi_k", grid)
    v = rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))
    state = TwoModeState((grid, grid), v / np.linalg.norm(v))

    out, norm = apply_two_mode_gamma(state, [("x", za, "z", zb)])

    step = GammaOperator("x", za).fiber_operator().apply(state, mode=0)
    step = GammaOperator("z", zb).fiber_operator().apply(step, mode=1)
    assert np.max(np.abs(out.amplitudes - step.amplitudes)) <= 1e-12
    assert norm == pytest.approx(step.norm)


def test_two_mode_sum_matches_dense_kron():
    g = make_grid(4, 2)
    za, zb = make_weight("cos_theta", g), make_weight("constant", g, value=0.5)
    terms = [("i", za, "y", zb), ("z", zb, "x", za)]

    dense = oracle.materialize_two_mode(TwoModeGammaSum(terms), (g, g))

    def single(axis, w):
        if axis == "i":
            return oracle.materialize(modulated_identity(w), g).matrix
        return oracle.materialize(GammaOperator(axis, w), g).matrix

    expected = sum(np.kron(single(a, wa), single(b, wb)) for a, wa, b, wb in terms)
    assert np.max(np.abs(dense.matrix - expected)) <= 1e-12


def test_two_mode_sum_term_limits(grid):
    w = make_weight("constant", grid)

    with pytest.raises(DomainError):
        TwoModeGammaSum([])
    with pytest.raises(DomainError):
        TwoModeGammaSum([("x", w, "x", w)] * 5)


def test_two_mode_sum_grid_mismatch_raises(grid):
    other = make_weight("constant", make_grid(16, 4))

    with pytest.raises(GridMismatchError):
        TwoModeGammaSum([("x", make_weight("constant", grid), "x", make_weight("constant", grid)),
                         ("z", other, "z", make_weight("constant", grid))])


def test_older_mixed_family_name_is_accepted(grid):
    alias = make_weight("paper_mixed", grid)

    assert alias.family == "mixed_cos"
    assert np.array_equal(alias.values, make_weight("mixed_cos", grid).values)


def test_zz_parity_of_zero_one_is_minus_one(grid, gaussian_env, uniform_env):
    unit = make_weight("constant", grid)
    psi = encode_two_mode([0, 1, 0, 0], gaussian_env, uniform_env)

    out, norm = apply_two_mode_gamma(psi, [("z", unit, "z", unit)])

    assert norm == pytest.approx(1.0)
    assert np.vdot(psi.amplitudes, out.amplitudes) == pytest.approx(-1.0, abs=1e-12)


def test_xx_plus_yy_annihilates_phi_plus_and_doubles_psi_plus(grid, gaussian_env):
    unit = make_weight("constant", grid)
    terms = [("x", unit, "x", unit), ("y", unit, "y", unit)]
    phi_plus = encode_two_mode([1, 0, 0, 1], gaussian_env, gaussian_env)
    psi_plus = encode_two_mode([0, 1, 1, 0], gaussian_env, gaussian_env)

    zero, zero_norm = apply_two_mode_gamma(phi_plus, terms)
    doubled, doubled_norm = apply_two_mode_gamma(psi_plus, terms)

    assert zero_norm <= 1e-12
    assert np.max(np.abs(doubled.amplitudes - 2 * psi_plus.amplitudes)) <= 1e-12
    assert doubled_norm == pytest.approx(2.0)


def test_product_term_norm_factorizes(medium_grid):
    env_a = make_envelope("gaussian", medium_grid)
    env_b = make_envelope("uniform", medium_grid)
    za, zb = make_weight("cos_theta", medium_grid), make_weight("cos_pi_k", medium_grid)
    psi = encode_two_mode([1, 0, 0, 0], env_a, env_b)

    _, norm = apply_two_mode_gamma(psi, [("z", za, "z", zb)])

    expected = np.sum(env_a.weights * za.values ** 2) * np.sum(env_b.weights * zb.values ** 2)
    assert norm ** 2 == pytest.approx(expected, rel=1e-12)
