import math

import numpy as np
import pytest
from scipy.special import eval_genlaguerre, gammaln

from ngchannel.errors import InvalidParameterError, OracleError
from ngchannel.fockoracle import (
    DensityMatrix,
    QuadratureConfig,
    apply_channel,
    build_state,
    displacement,
    oracle_char,
    oracle_moment,
    oracle_pnd,
    oracle_q,
    oracle_state,
    oracle_wigner,
)
from ngchannel.states import Stage, StateSpec


def thermal_matrix(n_th, N):
    n = np.arange(N)
    return np.diag(n_th ** n / (1 + n_th) ** (n + 1)).astype(complex)


def test_vacuum_and_single_photon():
    vac = build_state(StateSpec("PATS", 0.0, 0), 20)
    one = build_state(StateSpec("PATS", 0.0, 1), 20)
    e0, e1 = np.zeros((20, 20)), np.zeros((20, 20))
    e0[0, 0] = e1[1, 1] = 1.0
    np.testing.assert_array_equal(vac.entries, e0)
    np.testing.assert_array_equal(one.entries, e1)


def test_subtracted_thermal_is_negative_binomial():
    # a^m rho_th a^dag^m normalized has P(n) = C(m+n, n) q^n (1-q)^(m+1).
    m, n_th = 1, 0.5
    q = n_th / (1 + n_th)
    rho = build_state(StateSpec("PSTS", n_th, m), 60)
    n = np.arange(60)
    ref = np.array([math.comb(m + k, k) for k in n]) * q ** n * (1 - q) ** (m + 1)
    np.testing.assert_allclose(rho.populations(), ref, atol=1e-9)


@pytest.mark.parametrize("spec", [
    StateSpec("PATS", 0.5, 2), StateSpec("PAKFTS", 0.5, 1, 1),
    StateSpec("PASTS", 0.3, 1, lam=0.4), StateSpec("PSSTS", 0.2, 1, lam=0.3),
])
def test_built_states_are_density_matrices(spec):
    rho = build_state(spec, 60)
    rho.check()
    assert rho.trace() == pytest.approx(1.0, abs=1e-10)
    assert 0 < rho.purity() <= 1 + 1e-12


def test_build_rejects_short_cutoff():
    with pytest.raises(OracleError):
        build_state(StateSpec("PATS", 2.0, 3), 20)


def test_density_matrix_is_read_only():
    rho = build_state(StateSpec("PATS", 0.1, 1), 30)
    with pytest.raises(ValueError):
        rho.entries[0, 0] = 1.0


@pytest.mark.parametrize("z", [0.3, 0.7 - 1.1j, -2.0 + 0.5j])
def test_displacement_matches_laguerre_elements(z):
    # <m|D(z)|n> = sqrt(n!/m!) z^(m-n) e^(-|z|^2/2) L_n^(m-n)(|z|^2) for m >= n.
    N = 12
    D = displacement(z, N)
    x = abs(z) ** 2
    for m in range(N):
        for n in range(m + 1):
            ref = (math.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1))) * z ** (m - n)
                   * math.exp(-x / 2) * eval_genlaguerre(n, m - n, x))
            assert abs(D[m, n] - ref) < 1e-12
            # <n|D(z)|m> = (-z*)^(m-n) ... by D(z)^dag = D(-z)
            assert abs(D[n, m] - ref.conjugate() * (-1) ** (m - n)) < 1e-12


def test_displacement_is_unitary_in_the_bulk():
    D = displacement(1.5 + 0.5j, 80)
    np.testing.assert_allclose((D.conj().T @ D)[:40, :40], np.eye(40), atol=1e-12)


def test_channel_with_zero_noise_is_identity():
    rho = build_state(StateSpec("PASTS", 0.3, 1, lam=0.2), 60)
    assert apply_channel(rho, 0.0) is rho


def test_thermal_stays_thermal_with_added_noise():
    rho = build_state(StateSpec("PATS", 0.3, 0), 60)
    out = apply_channel(rho, 0.5, QuadratureConfig(40))
    assert np.max(np.abs(out.entries - thermal_matrix(0.8, 60))) < 1e-7


def test_quadrant_rule_equals_full_rule():
    # A negligible odd-band entry disables the quadrant shortcut.
    rho = build_state(StateSpec("PASTS", 0.3, 1, lam=0.2), 60)
    fast = apply_channel(rho, 0.3, QuadratureConfig(24))
    twisted = rho.entries.copy()
    twisted[0, 1] = twisted[1, 0] = 1e-300
    full = apply_channel(DensityMatrix(twisted), 0.3, QuadratureConfig(24))
    assert np.max(np.abs(fast.entries - full.entries)) < 1e-13


def test_semigroup():
    spec = StateSpec("PATS", 0.2, 1)
    rho = build_state(spec, 60)
    two_step = apply_channel(apply_channel(rho, 0.2, QuadratureConfig(40)), 0.3,
                             QuadratureConfig(40))
    one_step = apply_channel(rho, 0.5, QuadratureConfig(40))
    assert np.max(np.abs(two_step.entries - one_step.entries)) < 1e-7


def test_phase_space_reference_values():
    vac = build_state(StateSpec("PATS", 0.0, 0), 30)
    one = build_state(StateSpec("PATS", 0.0, 1), 30)
    th = build_state(StateSpec("PATS", 1.0, 0), 60)
    assert oracle_wigner(vac, 0) == pytest.approx(2 / math.pi, abs=1e-14)
    assert oracle_wigner(one, 0) == pytest.approx(-2 / math.pi, abs=1e-14)
    assert oracle_wigner(th, 0) == pytest.approx(1 / (math.pi * 1.5), abs=1e-10)
    assert oracle_q(vac, 0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert oracle_q(vac, 1.0) == pytest.approx(math.exp(-1) / math.pi, abs=1e-15)
    g = 0.6 - 0.2j
    for k in (-1, 0, 1):
        ref = math.exp(-0.5 * abs(g) ** 2 + 0.5 * k * abs(g) ** 2)
        assert abs(oracle_char(vac, g, k) - ref) < 1e-13


def test_thermal_wigner_off_center():
    th = build_state(StateSpec("PATS", 0.5, 0), 60)
    a = 0.8 + 0.3j
    ref = math.exp(-abs(a) ** 2 / 1.0) / (math.pi * 1.0)
    assert oracle_wigner(th, a) == pytest.approx(ref, abs=1e-10)


def test_moments_and_populations():
    th = build_state(StateSpec("PATS", 1.0, 0), 80)
    assert oracle_moment(th, 1) == pytest.approx(1.0, abs=1e-9)
    assert oracle_moment(th, 2) == pytest.approx(2.0, abs=1e-8)
    assert oracle_pnd(th, 0) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(InvalidParameterError):
        oracle_pnd(th, 80)


def test_readouts_refuse_points_beyond_cutoff_range():
    rho = build_state(StateSpec("PATS", 0.1, 1), 16)
    with pytest.raises(InvalidParameterError):
        oracle_wigner(rho, 3.0)


def test_oracle_state_escalates_until_converged():
    rho = oracle_state(StateSpec("PATS", 1.0, 2), Stage.output(1.0), tail_tol=1e-10)
    assert 1.0 - rho.trace() < 1e-10
    assert rho.cutoff > 60


def test_csv_export(tmp_path):
    rho = build_state(StateSpec("PATS", 0.0, 1), 3)
    path = tmp_path / "rho.csv"
    rho.to_csv(path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + 9
