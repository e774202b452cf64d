import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jcmpemba.hilbert import (
    E0, G0, G1, BasisLabel, DensityMatrix, InvalidStateError, ModelParams,
    atomic_excitation, basis_index, basis_labels, dimension, distances,
    excitation_number, hs_distance, photon_number, trace_distance,
)

from oracles import random_density_matrix, trace_norm_distance


def pure(atom, n, N=1):
    return DensityMatrix.pure(BasisLabel(atom, n), N)


def mix(weights, N=1):
    return DensityMatrix.diagonal({BasisLabel(a, n): w for (a, n), w in weights.items()}, N)


# -- basis ------------------------------------------------------------------

@pytest.mark.parametrize("label, N, expected", [
    (("g", 0), 1, 0),
    (("e", 0), 1, 2),
    (("g", 2), 2, 2),
    (("e", 1), 2, 4),
    (("g", 1), 1, 1),
])
def test_basis_index(label, N, expected):
    assert basis_index(BasisLabel(*label), N) == expected


def test_single_excitation_labels_match_three_state_names():
    assert (E0, G1, G0) == (2, 1, 0)


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_basis_ordering_is_a_bijection(N):
    labels = basis_labels(N)
    assert len(labels) == dimension(N) == 2 * N + 1
    assert [basis_index(lab, N) for lab in labels] == list(range(2 * N + 1))
    assert [str(lab) for lab in labels[:2]] == ["|g,0>", "|g,1>"]


@pytest.mark.parametrize("label, N", [(("e", 1), 1), (("g", 2), 1), (("g", -1), 3)])
def test_basis_index_rejects_out_of_range(label, N):
    with pytest.raises(ValueError):
        basis_index(BasisLabel(*label), N)


def test_basis_label_rejects_unknown_atom():
    with pytest.raises(ValueError):
        BasisLabel("x", 0)


# -- density matrix ---------------------------------------------------------

def test_density_matrix_is_read_only_and_hermitian(rng):
    rho = DensityMatrix(random_density_matrix(rng, 5))
    assert rho.N == 2 and rho.dim == 5
    with pytest.raises(ValueError):
        rho.entries[0, 0] = 1.0
    np.testing.assert_array_equal(rho.entries, rho.entries.conj().T)


def test_density_matrix_validation():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([0.5, 0.3, 0.1]))  # trace 0.9
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.1, 0.0, -0.1]))  # negative eigenvalue
    with pytest.raises(ValueError, match="2N\\+1"):
        DensityMatrix(np.eye(2) / 2)
    bad = np.diag([0.5, 0.5, 0.0]).astype(complex)
    bad[0, 1] = 0.2
    with pytest.raises(InvalidStateError):
        DensityMatrix(bad)


def test_density_matrix_equality(rng):
    a = random_density_matrix(rng, 3)
    assert DensityMatrix(a) == DensityMatrix(a.copy())
    assert DensityMatrix(a) != pure("g", 0)


# -- observables ------------------------------------------------------------

def test_atomic_excitation_examples():
    assert atomic_excitation(pure("e", 0)) == 1.0
    assert atomic_excitation(pure("g", 0)) == 0.0
    assert atomic_excitation(mix({("e", 0): 0.5, ("g", 1): 0.5})) == pytest.approx(0.5, abs=1e-15)


def test_photon_number_examples():
    assert photon_number(pure("g", 2, N=2)) == 2.0
    assert photon_number(pure("e", 0)) == 0.0
    assert photon_number(mix({("g", 1): 0.5, ("g", 0): 0.5})) == pytest.approx(0.5, abs=1e-15)


def test_excitation_number_of_manifold_states():
    assert excitation_number(pure("e", 1, N=2)) == 2.0
    assert excitation_number(pure("g", 2, N=2)) == 2.0


# -- distances --------------------------------------------------------------

def test_distance_examples():
    e, g = pure("e", 0), pure("g", 0)
    half = mix({("e", 0): 0.5, ("g", 0): 0.5})
    assert trace_distance(e, g) == pytest.approx(1.0, abs=1e-15)
    assert hs_distance(e, g) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert trace_distance(e, e) == 0.0 and hs_distance(e, e) == 0.0
    assert trace_distance(half, g) == pytest.approx(0.5, abs=1e-15)
    assert hs_distance(half, g) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    pair = distances(half, g)
    assert (pair.d_tr, pair.d_hs) == (trace_distance(half, g), hs_distance(half, g))


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        trace_distance(pure("g", 0), pure("g", 0, N=2))
    with pytest.raises(ValueError):
        hs_distance(pure("g", 0), pure("g", 0, N=2))


def test_trace_distance_matches_singular_value_oracle(rng):
    for dim in (3, 5, 7):
        for _ in range(20):
            a, b = random_density_matrix(rng, dim), random_density_matrix(rng, dim, rank=1)
            assert trace_distance(a, b) == pytest.approx(trace_norm_distance(a, b), abs=1e-12)


def test_hs_bounded_by_twice_trace_distance_on_two_outcome_cases():
    for p in np.linspace(0, 1, 11):
        for q in np.linspace(0, 1, 11):
            a = mix({("e", 0): p, ("g", 0): 1 - p})
            b = mix({("e", 0): q, ("g", 0): 1 - q})
            assert hs_distance(a, b) <= 2 * trace_distance(a, b) + 1e-15


seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, N=st.integers(1, 3))
def test_distances_symmetric_bounded_and_triangular(seed, N):
    r = np.random.default_rng(seed)
    dim = 2 * N + 1
    a, b, c = (DensityMatrix(random_density_matrix(r, dim, rank=int(r.integers(1, dim + 1))))
               for _ in range(3))
    for d in (trace_distance, hs_distance):
        assert d(a, b) == pytest.approx(d(b, a), abs=1e-12)
        assert d(a, c) <= d(a, b) + d(b, c) + 1e-9
        assert d(a, b) >= 0
    assert trace_distance(a, b) <= 1 + 1e-12


@settings(max_examples=60, deadline=None)
@given(seed=seeds, w=st.floats(0, 1))
def test_observables_are_linear(seed, w):
    r = np.random.default_rng(seed)
    a, b = random_density_matrix(r, 5), random_density_matrix(r, 5)
    blend = DensityMatrix(w * a + (1 - w) * b)
    for f in (atomic_excitation, photon_number):
        assert f(blend) == pytest.approx(w * f(DensityMatrix(a)) + (1 - w) * f(DensityMatrix(b)), abs=1e-12)


# -- parameters -------------------------------------------------------------

@pytest.mark.parametrize("field, value", [
    ("kappa", -1.0), ("gamma", -0.1), ("kappa1", -1e-3), ("n_th", -0.01), ("g", -1.0),
    ("kappa", float("nan")), ("delta", float("inf")), ("N", 0),
])
def test_model_params_rejects(field, value):
    with pytest.raises(ValueError):
        ModelParams(**{field: value})


def test_model_params_allows_negative_detuning():
    assert ModelParams(delta=-0.2).delta == -0.2


def test_large_thermal_occupation_warns():
    with pytest.warns(UserWarning):
        ModelParams(n_th=0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        p = ModelParams(n_th=0.05, n_th_atom=0.1)
    assert p.thermal
