import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entlab.core import (
    DensityMatrix,
    EntanglementSpectrum,
    PureState,
    entropy,
    partial_trace,
    purity,
    schmidt_spectrum,
    trace_distance,
)
from entlab.errors import InvalidInputError
from entlab.haar import sample_random_pure_state

dims = st.tuples(st.integers(1, 6), st.integers(1, 6))


def test_product_state_has_zero_entropy():
    v = np.zeros(6)
    v[0] = 1
    p = schmidt_spectrum(PureState(v, (2, 3)))
    assert entropy(p) == 0.0
    assert purity(p) == 1.0


def test_bell_state():
    bell = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))
    p = schmidt_spectrum(bell)
    assert np.allclose(p.probs, [0.5, 0.5])
    assert entropy(p) == pytest.approx(1.0, abs=1e-12)
    assert entropy(p, 2.0) == pytest.approx(1.0, abs=1e-12)
    assert entropy(p, 0.0) == 1.0


def test_unnormalized_state_rejected():
    with pytest.raises(InvalidInputError):
        PureState(np.ones(4), (2, 2))
    with pytest.raises(InvalidInputError):
        PureState(np.ones(3) / np.sqrt(3), (2, 2))


def test_density_matrix_validation():
    with pytest.raises(InvalidInputError):
        DensityMatrix(np.diag([0.7, 0.7]))
    with pytest.raises(InvalidInputError):
        DensityMatrix(np.diag([1.2, -0.2]))
    with pytest.raises(InvalidInputError):
        DensityMatrix(np.array([[0.5, 0.3], [0.1, 0.5]]))


def test_spectrum_validation_and_clamp():
    with pytest.raises(InvalidInputError):
        EntanglementSpectrum([0.2, 0.8])  # ascending
    s = EntanglementSpectrum.from_weights([1e-15, 0.5, 0.5])
    assert s.probs[-1] == 0.0
    assert entropy(s) == pytest.approx(1.0)


def test_entropy_batched():
    p = np.array([[1.0, 0.0], [0.5, 0.5]])
    assert np.allclose(entropy(p), [0.0, 1.0])
    assert np.allclose(purity(p), [1.0, 0.5])


def test_renyi_order_validation():
    with pytest.raises(InvalidInputError):
        entropy([1.0], -1.0)


@given(dims, st.integers(0, 2 ** 32 - 1))
@settings(max_examples=40, deadline=None)
def test_reduced_states_share_spectrum(d, seed):
    state = sample_random_pure_state(*d, rng=seed)
    rho_a, rho_b = partial_trace(state, "A"), partial_trace(state, "B")
    p = schmidt_spectrum(state).probs
    k = min(d)
    assert np.allclose(rho_a.eigenvalues()[:k], p[:k], atol=1e-10)
    assert np.allclose(rho_b.eigenvalues()[:k], p[:k], atol=1e-10)
    assert rho_a.purity() == pytest.approx(purity(p), abs=1e-10)


@given(dims, st.integers(0, 2 ** 32 - 1), st.floats(0.1, 5.0))
@settings(max_examples=40, deadline=None)
def test_entropy_bounds(d, seed, q):
    p = schmidt_spectrum(sample_random_pure_state(*d, rng=seed))
    s1, sq = entropy(p), entropy(p, q)
    assert -1e-12 <= s1 <= np.log2(min(d)) + 1e-12
    assert -1e-12 <= sq <= np.log2(min(d)) + 1e-12
    # Renyi entropies are non-increasing in q
    if q > 1:
        assert sq <= s1 + 1e-9


def test_trace_distance_extremes():
    a = np.diag([1.0, 0.0])
    b = np.diag([0.0, 1.0])
    assert trace_distance(a, b) == pytest.approx(1.0)
    assert trace_distance(a, a) == 0.0
