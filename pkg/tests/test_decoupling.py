import numpy as np
import pytest

from entlab.core import PureState, partial_trace, trace_distance
from entlab.decoupling import (
    TripartiteState,
    decoupling_deviation,
    decoupling_margin,
    decoupling_sweep,
    entangled_state,
    initial_purity_ac,
    page_curve,
    product_state,
    reduced_ac,
)
from entlab.errors import CapabilityError, InvalidInputError
from entlab.haar import sample_random_pure_state
from entlab.spectral import page_average_entropy


def test_margin_arithmetic():
    assert decoupling_margin(2, 2, 2, 1.0) == 0.0
    assert decoupling_margin(2, 8, 2, 1.0) - decoupling_margin(2, 4, 2, 1.0) == pytest.approx(2.0)


def test_initial_states():
    assert initial_purity_ac(product_state(2, 4, 2)) == pytest.approx(1.0)
    assert initial_purity_ac(entangled_state(2, 4, 2)) == pytest.approx(0.5)
    with pytest.raises(InvalidInputError):
        entangled_state(2, 1, 2)
    with pytest.raises(InvalidInputError):
        TripartiteState(np.ones(8), (2, 2, 2))


def test_trivial_c_is_plain_typicality(rng):
    # with N_C = 1 the deviation is the distance of rho_A from I/N_A
    s = product_state(2, 4, 1)
    dev = decoupling_deviation(s, np.random.default_rng(3))
    u_state = np.random.default_rng(3)
    from entlab.haar import sample_haar_unitary
    psi = sample_haar_unitary(8, u_state)[:, 0]
    rho_a = partial_trace(PureState(psi, (2, 4))).entries
    assert dev == pytest.approx(trace_distance(rho_a, np.eye(2) / 2), abs=1e-12)


def test_reduced_ac_is_density_matrix(rng):
    psi = sample_random_pure_state(4, 12, rng).amplitudes
    s = TripartiteState(psi, (2, 6, 4))
    rho = reduced_ac(s.tensor)
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-9)
    assert np.linalg.eigvalsh(rho).min() > -1e-9


def test_deviation_range_and_large_bath():
    devs = [decoupling_deviation(product_state(2, 256, 2), k) for k in range(5)]
    assert all(0 <= d <= 1 for d in devs)
    assert np.mean(devs) < 0.1


def test_capability():
    with pytest.raises(CapabilityError):
        decoupling_deviation(product_state(2, 2 ** 13, 2), 0)


def test_sweep_decreases():
    rows = decoupling_sweep(2, 2, [1, 4, 32], 200, rng=1)
    means = [r[2] for r in rows]
    assert means[0] == pytest.approx(0.5)
    assert means[0] > means[1] > means[2]


def test_page_curve_small():
    rows = page_curve(6, rng=2, samples=600)
    assert rows[0][1] == 0.0 and rows[-1][1] == 0.0
    means = [r[1] for r in rows]
    assert int(np.argmax(means)) == 3
    assert rows[3][1] == pytest.approx(page_average_entropy((8, 8)), abs=4 * rows[3][2])
    with pytest.raises(CapabilityError):
        page_curve(15, rng=0, samples=2)
