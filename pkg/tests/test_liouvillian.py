import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jcmpemba.hilbert import E0, G0, G1, BasisLabel, DensityMatrix, ModelParams, excitation_counts
from jcmpemba.liouvillian import (
    DegenerateNullSpaceError, Generator, GeneratorError, GeneratorKind, make_generator, pack,
    rhs_n_manifold, rhs_single_excitation, rhs_thermal, stationary_state, unpack,
)

from oracles import operator_lindbladian, random_density_matrix, random_hermitian, thermal_detailed_balance

KINDS = {
    GeneratorKind.SINGLE_EXCITATION: ModelParams(g=1.0, kappa=2.3, gamma=0.4, delta=-0.7),
    GeneratorKind.N_MANIFOLD: ModelParams(g=0.8, kappa=1.7, gamma=0.3, delta=0.45, N=3),
    GeneratorKind.THERMAL_RESTRICTED: ModelParams(g=1.0, kappa=8.0, gamma=0.1, delta=0.2,
                                                  n_th=0.05, n_th_atom=0.1),
}


def projector(i, dim=3):
    rho = np.zeros((dim, dim), dtype=complex)
    rho[i, i] = 1
    return rho


# -- worked examples ---------------------------------------------------------

def test_equilibrium_is_stationary_for_any_parameters():
    for p in (ModelParams(kappa=8.0), ModelParams(g=2.0, kappa=0.3, gamma=1.1, delta=-0.5)):
        assert np.abs(rhs_single_excitation(projector(G0), p)).max() == 0.0
        p2 = dataclasses.replace(p, N=2)
        assert np.abs(rhs_n_manifold(projector(G0, 5), p2, 2)).max() == 0.0


def test_single_excitation_from_excited_atom():
    d = rhs_single_excitation(projector(E0), ModelParams(g=1.0, kappa=8.0))
    assert d[E0, E0] == 0 and d[G1, G1] == 0
    assert d[E0, G1] == pytest.approx(1j, abs=1e-15)


def test_single_excitation_from_one_photon():
    d = rhs_single_excitation(projector(G1), ModelParams(g=1.0, kappa=8.0))
    assert d[G1, G1] == pytest.approx(-8)
    assert d[G0, G0] == pytest.approx(8)
    assert d[E0, G1] == pytest.approx(-1j, abs=1e-15)


def test_two_photon_loss_in_the_two_excitation_manifold():
    d = rhs_n_manifold(projector(2, 5), ModelParams(g=0.0, kappa=5.0, N=2), 2)
    assert d[2, 2] == pytest.approx(-10) and d[1, 1] == pytest.approx(10)


def test_thermal_excitation_out_of_vacuum():
    p = ModelParams(g=1.0, kappa=8.0, gamma=0.1, n_th=0.05, n_th_atom=0.1)
    d = rhs_thermal(projector(G0), p)
    assert d[G1, G1] == pytest.approx(0.4, abs=1e-15)
    assert d[E0, E0] == pytest.approx(0.01, abs=1e-15)


def test_reductions_to_the_single_excitation_equations(rng):
    p = ModelParams(g=1.3, kappa=2.1, gamma=0.6, delta=0.9)
    for _ in range(10):
        rho = random_density_matrix(rng, 3)
        ref = rhs_single_excitation(rho, p)
        assert np.abs(rhs_n_manifold(rho, p, 1) - ref).max() < 1e-14
        assert np.abs(rhs_thermal(rho, p) - ref).max() < 1e-14


# -- operator oracle -----------------------------------------------------------

@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("g, kappa, gamma, delta", [
    (1.0, 8.0, 0.0, 0.0), (0.7, 1.3, 0.4, -0.6), (1.0, 0.0, 0.0, 1.5), (2.0, 0.5, 2.5, 0.3),
])
def test_n_manifold_matches_operator_lindbladian(rng, N, g, kappa, gamma, delta):
    p = ModelParams(g=g, kappa=kappa, gamma=gamma, delta=delta, N=N)
    oracle = operator_lindbladian(N, g, kappa, gamma, delta)
    for _ in range(5):
        rho = random_density_matrix(rng, 2 * N + 1)
        np.testing.assert_allclose(rhs_n_manifold(rho, p, N), oracle(rho), rtol=0, atol=1e-13)
        if N == 1:
            np.testing.assert_allclose(rhs_single_excitation(rho, p), oracle(rho), rtol=0, atol=1e-13)


# -- structural invariants ---------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), kind=st.sampled_from(list(KINDS)))
def test_trace_and_hermiticity_preserved(seed, kind):
    r = np.random.default_rng(seed)
    gen = Generator(kind, KINDS[kind])
    rho = random_density_matrix(r, gen.dim)
    d = gen.rhs(rho)
    assert abs(np.trace(d)) < 1e-12
    assert np.abs(d - d.conj().T).max() < 1e-12


@pytest.mark.parametrize("kind", list(KINDS))
def test_generator_matrix_matches_direct_rhs(rng, kind):
    gen = Generator(kind, KINDS[kind])
    for _ in range(5):
        rho = random_density_matrix(rng, gen.dim)
        assert np.abs(gen.apply(rho) - gen.rhs(rho)).max() < 1e-13
        assert np.abs(unpack(gen.packed @ pack(rho), gen.dim) - gen.rhs(rho)).max() < 1e-13
    # the trace functional is a left null vector
    trace_row = np.eye(gen.dim).reshape(-1, order="F")
    assert np.abs(trace_row @ gen.superoperator).max() < 1e-12


@pytest.mark.parametrize("kind", list(KINDS))
def test_superoperator_is_complex_linear(rng, kind):
    # non-Hermitian inputs exercise the complex extension of the real-linear rhs
    gen = Generator(kind, KINDS[kind])
    A = rng.normal(size=(gen.dim, gen.dim)) + 1j * rng.normal(size=(gen.dim, gen.dim))
    H1, H2 = 0.5 * (A + A.conj().T), -0.5j * (A - A.conj().T)
    assert np.abs(gen.apply(A) - (gen.rhs(H1) + 1j * gen.rhs(H2))).max() < 1e-13


def test_pack_round_trip(rng):
    for dim in (3, 5, 7):
        H = random_hermitian(rng, dim)
        assert np.abs(unpack(pack(H), dim) - H).max() == 0.0
        assert pack(H).size == dim * dim


# -- stationary states ---------------------------------------------------------

def test_zero_temperature_stationary_state_is_vacuum():
    for kind, p in [(GeneratorKind.SINGLE_EXCITATION, ModelParams(kappa=8.0)),
                    (GeneratorKind.N_MANIFOLD, ModelParams(kappa=8.0, N=2)),
                    (GeneratorKind.N_MANIFOLD, ModelParams(kappa=0.5, gamma=0.2, delta=0.3, N=4))]:
        ss = stationary_state(kind, p)
        assert ss.allclose(projector(G0, ss.dim), atol=1e-10)


def test_thermal_stationary_state_obeys_detailed_balance_when_uncoupled():
    p = ModelParams(g=0.0, kappa=8.0, gamma=0.1, n_th=0.05, n_th_atom=0.1)
    ss = stationary_state(GeneratorKind.THERMAL_RESTRICTED, p)
    expected = thermal_detailed_balance(0.05, 0.1)
    got = np.array([ss[E0, E0].real, ss[G1, G1].real, ss[G0, G0].real])
    np.testing.assert_allclose(got, expected, atol=1e-12)
    np.testing.assert_allclose(got, [0.07985, 0.04183, 0.87832], atol=1e-5)


def test_thermal_stationary_state_is_a_null_vector():
    p = ModelParams(g=1.0, kappa=8.0, gamma=0.1, n_th=0.05, n_th_atom=0.1)
    ss = stationary_state(GeneratorKind.THERMAL_RESTRICTED, p)
    assert np.abs(rhs_thermal(ss.entries, p)).max() < 1e-10
    assert min(np.linalg.eigvalsh(ss.entries)) > 0


@pytest.mark.parametrize("kind, p", [
    (GeneratorKind.SINGLE_EXCITATION, ModelParams(kappa=0.0, gamma=0.0)),
    (GeneratorKind.N_MANIFOLD, ModelParams(kappa=0.0, gamma=0.0, N=2)),
])
def test_lossless_generator_has_degenerate_null_space(kind, p):
    with pytest.raises(DegenerateNullSpaceError):
        stationary_state(kind, p)


# -- kind validation --------------------------------------------------------

def test_generator_kind_checks():
    with pytest.raises(GeneratorError):
        Generator(GeneratorKind.SINGLE_EXCITATION, ModelParams(n_th=0.05))
    with pytest.raises(GeneratorError):
        Generator(GeneratorKind.SINGLE_EXCITATION, ModelParams(N=2))
    with pytest.raises(GeneratorError):
        Generator(GeneratorKind.THERMAL_RESTRICTED, ModelParams(N=2))
    with pytest.raises(GeneratorError):
        Generator(GeneratorKind.N_MANIFOLD, ModelParams(n_th_atom=0.1))
    assert make_generator(ModelParams(N=3)).kind is GeneratorKind.N_MANIFOLD
    assert make_generator(ModelParams(n_th=0.01)).kind is GeneratorKind.THERMAL_RESTRICTED
    assert make_generator(ModelParams()).kind is GeneratorKind.SINGLE_EXCITATION


def test_excitation_operator_commutes_with_lossless_generator(rng):
    # lossless flow conserves Tr(N rho): Tr(N L[rho]) = 0 for every rho
    for N in (1, 2, 3):
        p = ModelParams(g=1.0, delta=0.7, N=N)
        counts = excitation_counts(N)
        for _ in range(5):
            d = rhs_n_manifold(random_density_matrix(rng, 2 * N + 1), p, N)
            assert abs(np.sum(counts * np.diag(d))) < 1e-13


def test_vacuum_coherences_stay_decoupled():
    from scipy.integrate import solve_ivp

    p = ModelParams(g=1.0, kappa=3.0, gamma=0.5, delta=0.4)
    gen = Generator(GeneratorKind.SINGLE_EXCITATION, p)
    rho0 = np.diag([0.5, 0.3, 0.2]).astype(complex)
    rho0[E0, G1], rho0[G1, E0] = 0.1 - 0.2j, 0.1 + 0.2j
    DensityMatrix(rho0)
    sol = solve_ivp(lambda t, v: gen.packed @ v, (0, 10), pack(rho0), method="DOP853",
                    rtol=1e-10, atol=1e-12, t_eval=np.linspace(0, 10, 51))
    for vec in sol.y.T:
        rho = unpack(vec, 3)
        assert abs(rho[E0, G0]) < 1e-12 and abs(rho[G1, G0]) < 1e-12
