import numpy as np
import pytest

from srge.ed_oracle import (
    DenseState,
    EmptySectorError,
    charge_projector,
    charged_moment_ed,
    popcounts,
    reduce,
    sector_trace,
    sector_weights,
    srre,
    srre_fourier,
)
from srge.xx_lattice import level2_lattice_states


def test_popcounts():
    assert list(popcounts(3)) == [0, 1, 1, 2, 1, 2, 2, 3]


def test_projectors_resolve_identity():
    ell = 4
    ps = [charge_projector(ell, q) for q in range(ell + 1)]
    assert np.allclose(sum(ps), np.eye(2**ell))
    for p in ps:
        assert np.allclose(p @ p, p)
    assert np.trace(ps[2]) == 6


def test_state_validation():
    with pytest.raises(ValueError):
        DenseState(15, np.zeros(2**15), 0)
    with pytest.raises(ValueError):
        DenseState(2, np.ones(4), 1)
    with pytest.raises(ValueError):
        DenseState(2, np.ones(3), 1)


def test_product_state_reduces_to_pure_state():
    psi = DenseState.from_occupations([1, 0, 1, 0])
    rho = reduce(psi, psi, 2)
    m = rho.matrix()
    assert rho.trace == pytest.approx(1.0)
    assert np.allclose(m @ m, m)
    assert m[2, 2] == pytest.approx(1.0)


def test_orthogonal_states_give_traceless_rdm():
    a = DenseState.from_occupations([1, 0, 1, 0])
    b = DenseState.from_occupations([0, 1, 1, 0])
    assert reduce(a, b, 2).trace == pytest.approx(0.0)
    assert reduce(a, b, 3).trace == pytest.approx(0.0)


def test_bell_pair_is_maximally_mixed():
    amp = np.zeros(4, dtype=complex)
    amp[0b10] = amp[0b01] = 1 / np.sqrt(2)
    rho = reduce(DenseState(2, amp, 1), DenseState(2, amp, 1), 1)
    assert np.allclose(rho.matrix(), np.eye(2) / 2)


def test_reduce_errors():
    a = DenseState.from_occupations([1, 0, 1, 0])
    with pytest.raises(ValueError):
        reduce(a, DenseState.from_occupations([1, 1, 1, 0]), 2)
    with pytest.raises(ValueError):
        reduce(a, DenseState.from_occupations([1, 0, 1, 0, 0, 0]), 2)
    with pytest.raises(ValueError):
        reduce(a, a, 4)


def test_srre_examples():
    amp = np.zeros(4, dtype=complex)
    amp[0b10] = amp[0b01] = 1 / np.sqrt(2)
    psi = DenseState(2, amp, 1)
    rho = reduce(psi, psi, 1)
    # each sector is a single pure state
    assert srre([rho, rho], 0) == pytest.approx(0.0)
    assert srre([rho, rho], 1) == pytest.approx(0.0)
    assert sector_trace([rho, rho], 5) == 0
    prod = DenseState.from_occupations([1, 0, 1, 0])
    rp = reduce(prod, prod, 2)
    with pytest.raises(EmptySectorError):
        srre([rp, rp], 0)
    with pytest.raises(ValueError):
        srre([rp], 1)


def test_srre_random_state_is_nonnegative():
    rng = np.random.default_rng(4)
    psi = DenseState.random(8, 4, rng)
    rho = reduce(psi, psi, 4)
    for q in range(5):
        assert srre([rho, rho], q).real >= -1e-12


@pytest.mark.parametrize("n", [1, 2])
def test_sector_weights_nonnegative_for_diagonal_states(n):
    st = level2_lattice_states(8)
    for s, _ in st.values():
        d = DenseState.from_momentum_state(s)
        w = sector_weights(lambda t: charged_moment_ed([d] * (2 * n), 3, t, n), 3)
        assert np.all(w.real > -1e-12) and np.allclose(w.imag, 0, atol=1e-12)
        if n == 1:
            assert w.sum() == pytest.approx(1.0)


def test_fourier_and_projector_routes_agree():
    rng = np.random.default_rng(9)
    states = [DenseState.random(8, 4, rng) for _ in range(4)]
    g = DenseState.random(8, 4, rng)
    rdms = [reduce(states[0], states[1], 4), reduce(states[2], states[3], 4)]
    ground = reduce(g, g, 4)
    for q in range(5):
        a = srre(rdms, q, ground=ground)
        b = srre_fourier(lambda t: charged_moment_ed(states, 4, t, 2),
                         lambda t: charged_moment_ed([g] * 4, 4, t, 2), 4, q, 2)
        assert np.exp(-a) == pytest.approx(np.exp(-b), rel=1e-9)
    with pytest.raises(ValueError):
        srre_fourier(lambda t: 1.0, lambda t: 1.0, 4, 0, 1)
