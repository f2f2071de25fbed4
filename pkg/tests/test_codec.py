import math

import numpy as np
import pytest

from env.errors import DomainError, EnvelopeError
from env.grid import make_grid
from env.sensors import decode_logical
from tools.codec import (
    bloch_readout,
    encode_basis,
    encode_logical,
    encode_product,
    encode_two_mode,
    logical_amplitudes,
    make_envelope,
    primed_fidelity,
)
from tools.gamma import apply_modulated_identity, make_weight


def test_uniform_envelope_is_flat(grid):
    env = make_envelope("uniform", grid)

    assert np.allclose(env.values, 0.25)
    assert env.weights.sum() == pytest.approx(1.0)


def test_single_fiber_envelope(grid):
    env = make_envelope("single_fiber", grid, s0=1, m0=3)

    assert env.values[1, 3] == 1.0
    assert np.count_nonzero(env.values) == 1


def test_single_fiber_outside_half_grid_raises(grid):
    with pytest.raises(EnvelopeError):
        make_envelope("single_fiber", grid, s0=grid.half, m0=0)


def test_vanishing_gaussian_is_degenerate(grid):
    with pytest.raises(EnvelopeError) as error:
        make_envelope("gaussian", grid, theta0=0.1, sigma_theta=1e-100)

    assert error.value.args[0] == "degenerate envelope"


def test_negative_width_raises(grid):
    with pytest.raises(EnvelopeError) as error:
        make_envelope("gaussian", grid, sigma_k=-0.1)

    assert error.value.args[0] == "sigma_k must be positive"


def test_wide_gaussian_approaches_uniform(grid):
    env = make_envelope("gaussian", grid, sigma_theta=1e6, sigma_k=1e6)

    assert np.allclose(env.values, 0.25, atol=1e-9)


def test_gaussian_peaks_at_its_center(medium_grid):
    env = make_envelope("gaussian", medium_grid, theta0=math.pi / 4, k0=0.25)

    s, m = np.unravel_index(np.argmax(env.weights), env.weights.shape)
    assert medium_grid.theta_bar[s] == pytest.approx(math.pi / 4)
    assert medium_grid.k_bar[m] == pytest.approx(0.25)


def test_basis_states_are_orthonormal(gaussian_env):
    zero, one = encode_basis(0, gaussian_env), encode_basis(1, gaussian_env)

    assert zero.norm == pytest.approx(1.0)
    assert one.norm == pytest.approx(1.0)
    assert abs(np.vdot(zero.amplitudes, one.amplitudes)) <= 1e-14


def test_logical_zero_lives_in_the_base_sector(grid, uniform_env):
    zero = encode_basis(0, uniform_env)

    assert np.allclose(zero.amplitudes.reshape(grid.nn, grid.ns)[:, grid.half:], 0.0, atol=1e-15)


def test_equator_state_decodes_to_plus_y(gaussian_env):
    readout = decode_logical(encode_logical(math.pi / 2, math.pi / 2, gaussian_env))

    assert readout.bloch == pytest.approx((0.0, 1.0, 0.0), abs=1e-12)


def test_non_finite_angles_raise():
    with pytest.raises(DomainError):
        logical_amplitudes(float("nan"), 0.0)


def test_two_mode_coefficients_are_normalized(grid, uniform_env):
    state = encode_two_mode([2, 0, 0, 2], uniform_env, uniform_env)

    assert state.norm == pytest.approx(1.0)
    assert decode_logical(state).density[0, 3] == pytest.approx(0.5)


@pytest.mark.parametrize("coefficients", [[1, 0, 0], [0, 0, 0, 0]])
def test_bad_two_mode_coefficients_raise(uniform_env, coefficients):
    with pytest.raises(DomainError):
        encode_two_mode(coefficients, uniform_env, uniform_env)


def test_product_of_two_inputs_decodes_to_kron(grid, gaussian_env, uniform_env):
    state = encode_product([(math.pi, 0.0), (math.pi / 2, 0.0)], [gaussian_env, uniform_env])

    expected = np.kron([0, 1], [1, 1]) / math.sqrt(2)
    assert np.allclose(decode_logical(state).density, np.outer(expected, expected), atol=1e-12)


def test_bloch_readout_with_unit_weight_is_the_bloch_vector(grid, gaussian_env):
    psi = encode_logical(1.0, 0.4, gaussian_env)

    x, y, z, ident = bloch_readout(psi, make_weight("constant", grid))

    assert (x, y, z) == pytest.approx(decode_logical(psi).bloch, abs=1e-12)
    assert ident == pytest.approx(1.0)


def test_bloch_readout_with_cosine_weight(grid, uniform_env):
    x, y, z, ident = bloch_readout(encode_basis(0, uniform_env), make_weight("cos_theta", grid))

    assert x == pytest.approx(0.0, abs=1e-14)
    assert y == pytest.approx(0.0, abs=1e-14)
    assert z == pytest.approx(0.25)
    assert ident == pytest.approx(0.25)


def test_primed_fidelity_matches_direct_overlap(grid, gaussian_env):
    zeta = make_weight("mixed_cos", grid)
    psi = encode_basis(0, gaussian_env)

    primed, norm = apply_modulated_identity(psi, zeta)

    direct = abs(np.vdot(psi.amplitudes, primed.amplitudes)) / norm
    assert primed_fidelity(gaussian_env, zeta) == pytest.approx(direct)


def test_primed_fidelity_rises_as_the_envelope_narrows():
    g = make_grid(128, 4)
    zeta = make_weight("cos_theta", g)

    values = [
        primed_fidelity(make_envelope("gaussian", g, theta0=math.pi / 4, sigma_theta=s), zeta)
        for s in (math.pi / 4, math.pi / 8, math.pi / 16, math.pi / 32)
    ]

    assert values == sorted(values)
    assert values[-1] > 0.99


def test_primed_fidelity_of_zero_weight_is_zero(grid, gaussian_env):
    assert primed_fidelity(gaussian_env, make_weight("constant", grid, value=0.0)) == 0.0
