import csv
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ngchannel.errors import DivergentIntegralError, InvalidParameterError
from ngchannel.fockoracle import oracle_char, oracle_q, oracle_state, oracle_wigner
from ngchannel.quasiprob import (
    PhaseGrid,
    char_fn,
    convergence_guard,
    quasiprob_grid,
    quasiprob_point,
    write_phasefield_csv,
)
from ngchannel.states import Stage, StateSpec, Variant

IN = Stage.input()


@st.composite
def specs(draw):
    v = draw(st.sampled_from(list(Variant)))
    n_th = draw(st.floats(0.05, 1.5))
    m = draw(st.integers(0, 3))
    k = draw(st.integers(0, 2)) if v is Variant.PAKFTS else 0
    lam = draw(st.floats(0.0, 0.5)) if v.squeezed else 0.0
    return StateSpec(v, n_th, m, k, lam)


stages = st.one_of(st.just(IN), st.floats(0.0, 1.5).map(Stage.output))
gammas = st.complex_numbers(max_magnitude=2.5, allow_nan=False, allow_infinity=False)


# --- characteristic function ------------------------------------------------

def test_char_examples():
    th1 = StateSpec("PATS", 1.0, 0)
    assert char_fn(th1, IN, 0, 1.0) == pytest.approx(math.exp(-1.5), abs=1e-14)
    th = StateSpec("PATS", 0.3, 0)
    assert char_fn(th, Stage.output(0.5), 0, 0.7) == pytest.approx(
        char_fn(StateSpec("PATS", 0.8, 0), IN, 0, 0.7), abs=1e-14)


def test_char_pssts_against_oracle():
    spec = StateSpec("PSSTS", 0.2, 1, lam=0.3)
    rho = oracle_state(spec, IN)
    g = 0.4 + 0.1j
    assert abs(char_fn(spec, IN, -1, g) - oracle_char(rho, g, -1)) < 1e-7


@given(specs(), stages, st.sampled_from([-1, 0, 1]))
def test_char_at_origin_is_one(spec, stage, kappa):
    assert abs(char_fn(spec, stage, kappa, 0.0) - 1) < 1e-12


@given(specs(), stages, st.sampled_from([-1, 0, 1]), gammas)
def test_char_is_hermitian(spec, stage, kappa, g):
    a, b = char_fn(spec, stage, kappa, -g), np.conj(char_fn(spec, stage, kappa, g))
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@given(specs(), stages, gammas)
def test_antinormal_char_is_bounded(spec, stage, g):
    assert abs(char_fn(spec, stage, -1, g)) <= 1 + 1e-12


@given(specs(), st.sampled_from([-1, 0, 1]), gammas)
def test_zero_noise_output_is_input(spec, kappa, g):
    a = char_fn(spec, Stage.output(0.0), kappa, g)
    assert abs(a - char_fn(spec, IN, kappa, g)) <= 1e-10
    alpha = 0.5 * g
    if convergence_guard(spec, IN, kappa):
        p_in = quasiprob_point(spec, IN, kappa, alpha)
        p_out = quasiprob_point(spec, Stage.output(0.0), kappa, alpha)
        assert abs(p_in - p_out) <= 1e-10


def test_char_batches_match_points():
    spec = StateSpec("PASTS", 0.4, 2, lam=0.3)
    st_ = Stage.output(0.3)
    g = np.array([[0.1, 0.5j], [1.0 - 0.2j, -0.7]])
    batch = char_fn(spec, st_, 0, g)
    assert batch.shape == (2, 2)
    for idx in np.ndindex(2, 2):
        assert abs(batch[idx] - char_fn(spec, st_, 0, g[idx])) < 1e-15


# --- quasi-probabilities ----------------------------------------------------

def test_known_values_at_origin():
    vac = StateSpec("PATS", 0.0, 0)
    one = StateSpec("PATS", 0.0, 1)
    assert quasiprob_point(vac, IN, 0, 0) == pytest.approx(2 / math.pi, abs=1e-10)
    assert quasiprob_point(one, IN, 0, 0) == pytest.approx(-2 / math.pi, abs=1e-10)
    th = StateSpec("PATS", 0.5, 0)
    assert quasiprob_point(th, IN, -1, 0) == pytest.approx(1 / (math.pi * 1.5), abs=1e-10)


@pytest.mark.parametrize("n_th", [0.01, 0.1, 0.5, 1.0, 3.0])
def test_added_photon_makes_center_negative(n_th):
    assert quasiprob_point(StateSpec("PATS", n_th, 1), IN, 0, 0) < 0


def test_grid_values_equal_points():
    spec = StateSpec("PAKFTS", 0.4, 1, 2)
    grid = PhaseGrid.square(-1.0, 1.0, 2)
    pf = quasiprob_grid(spec, IN, 0, grid)
    for i, re in enumerate(grid.re):
        for j, im in enumerate(grid.im):
            assert pf.values[i, j] == quasiprob_point(spec, IN, 0, complex(re, im))


def test_wigner_riemann_sum_is_one():
    pf = quasiprob_grid(StateSpec("PATS", 0.3, 1), IN, 0, PhaseGrid.square(-6, 6, 121))
    assert abs(pf.integral() - 1) < 1e-3


@pytest.mark.parametrize("spec, stage", [
    (StateSpec("PATS", 0.5, 2), Stage.output(0.3)),
    (StateSpec("PSTS", 0.4, 2), Stage.output(0.3)),
    (StateSpec("PAKFTS", 0.6, 1, 2), Stage.output(0.3)),
    (StateSpec("PASTS", 0.3, 1, lam=0.3), Stage.output(0.3)),
    (StateSpec("PSSTS", 0.2, 2, lam=0.4), Stage.output(0.3)),
    (StateSpec("PSSTS", 0.5, 1, lam=0.2), IN),
])
def test_phase_space_against_oracle(spec, stage):
    rho = oracle_state(spec, stage)
    for a in (0.0, 0.5 + 0.5j, -1.2 + 0.3j, 2.0 - 1.5j):
        assert abs(quasiprob_point(spec, stage, 0, a) - oracle_wigner(rho, a)) < 1e-6
        assert abs(quasiprob_point(spec, stage, -1, a) - oracle_q(rho, a)) < 1e-6
    # P itself may be singular; its characteristic function is checked instead.
    for g in (0.3, 1.0 + 1.0j, -2.0, 1.4j):
        assert abs(char_fn(spec, stage, 1, g) - oracle_char(rho, g, 1)) < 1e-6


def test_regular_p_of_thermal_light():
    # Thermal light: P(alpha) = exp(-|alpha|^2/n)/(pi n).
    a = 0.7 - 0.4j
    ref = math.exp(-abs(a) ** 2 / 0.5) / (math.pi * 0.5)
    assert quasiprob_point(StateSpec("PATS", 0.5, 0), IN, 1, a) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("n_th", [0.1, 0.5, 1.0])
def test_wigner_center_nondecreasing_in_noise(n_th):
    spec = StateSpec("PATS", n_th, 1)
    s = np.round(np.arange(0, 2.0001, 0.1), 10)
    w = [quasiprob_point(spec, Stage.output(x), 0, 0) for x in s]
    assert np.all(np.diff(w) >= 0), f"W(0) decreases beyond s={s[int(np.argmax(w))]:.1f}"


# --- convergence guard ------------------------------------------------------

def test_guard_examples():
    assert convergence_guard(StateSpec("PATS", 0.5, 0), IN, 1)
    bad = convergence_guard(StateSpec("PATS", 0.0, 0), IN, 1)
    assert not bad and bad.reason.startswith("singular P")
    assert not convergence_guard(StateSpec("PASTS", 0.1, 0, lam=2.0), IN, 1)
    assert convergence_guard(StateSpec("PASTS", 0.1, 0, lam=2.0), IN, 0)


def test_guard_blocks_evaluation():
    with pytest.raises(DivergentIntegralError, match="singular P"):
        quasiprob_point(StateSpec("PATS", 0.0, 1), IN, 1, 0.0)
    with pytest.raises(DivergentIntegralError):
        quasiprob_grid(StateSpec("PATS", 0.0, 1), IN, 1, PhaseGrid.square(-1, 1, 3))


def test_channel_regularizes_p():
    spec = StateSpec("PATS", 0.0, 1)
    assert not convergence_guard(spec, IN, 1)
    assert convergence_guard(spec, Stage.output(0.2), 1)


def test_bad_kappa():
    with pytest.raises(InvalidParameterError):
        char_fn(StateSpec("PATS", 0.1, 0), IN, 2, 0.0)


# --- output -----------------------------------------------------------------

def test_phasefield_csv(tmp_path):
    pf = quasiprob_grid(StateSpec("PATS", 0.2, 1), IN, 0, PhaseGrid.square(-1, 1, 3))
    path = tmp_path / "w.csv"
    write_phasefield_csv(pf, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["re", "im", "value"]
    assert len(rows) == 10
    assert float(rows[5][2]) == pf.values[1, 1]


def test_grid_validation():
    with pytest.raises(InvalidParameterError):
        PhaseGrid.square(1, -1, 5)
    with pytest.raises(InvalidParameterError):
        PhaseGrid.square(-1, 1, 1)


@pytest.mark.parametrize("spec", [
    StateSpec("PATS", 0.3, 2), StateSpec("PSTS", 0.3, 2), StateSpec("PAKFTS", 0.3, 1, 1),
    StateSpec("PASTS", 0.3, 2, lam=0.3), StateSpec("PSSTS", 0.3, 2, lam=0.3),
])
@pytest.mark.parametrize("s", [1e-12, 1e-300, 5e-324])
def test_vanishing_noise_is_continuous(spec, s):
    for a in (0.0, 0.6 - 0.2j):
        for k in (-1, 0):
            assert abs(quasiprob_point(spec, Stage.output(s), k, a)
                       - quasiprob_point(spec, IN, k, a)) < 1e-10
        assert abs(char_fn(spec, Stage.output(s), 1, a) - char_fn(spec, IN, 1, a)) < 1e-10
