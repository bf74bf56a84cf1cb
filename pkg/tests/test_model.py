import numpy as np
import pytest

from decoupling import model
from decoupling.linalg import spectral_norm
from decoupling.model import (
    CouplingGraph,
    PauliSumHamiltonian,
    PerturbationParams,
    build_hamiltonian,
    conjugate_by_pauli,
    energy_uncertainty,
    format_hamiltonian,
    grid_graph,
    initial_coherent_state,
    sample_params,
    to_dense,
)
from decoupling.pauli import PauliString

from conftest import kron_pauli, random_label

BOUND = np.sqrt(3.0) * 1e-3


def dense_oracle(h: PauliSumHamiltonian) -> np.ndarray:
    return sum(
        (c * kron_pauli(t.to_label()) for c, t in h.terms),
        np.zeros((1 << h.n_qubits,) * 2, dtype=complex),
    )


def test_grid_graph_counts():
    assert len(grid_graph(3, 3).edges) == 12  # 2*3*2
    assert grid_graph(1, 2).edges == ((0, 1),)
    assert grid_graph(1, 1).edges == ()


def test_graph_validation():
    with pytest.raises(ValueError):
        CouplingGraph(3, ((0, 0),))
    with pytest.raises(ValueError):
        CouplingGraph(3, ((1, 0),))
    with pytest.raises(ValueError):
        CouplingGraph(3, ((0, 1), (0, 1)))


def test_build_hamiltonian_single_qubit():
    graph = CouplingGraph(1, ())
    h = build_hamiltonian(PerturbationParams(np.array([0.5]), np.zeros(0)), graph)
    assert h.terms == ((0.5, PauliString.from_label("Z")),)


def test_build_hamiltonian_heisenberg_pair():
    # Kronecker-product oracle: j (XX + YY + ZZ) with eigenvalues (-3j, j, j, j)
    graph = CouplingGraph(2, ((0, 1),))
    j = 0.37
    h = build_hamiltonian(PerturbationParams(np.zeros(2), np.array([j])), graph)
    assert len(h.terms) == 3
    mat = to_dense(h).matrix
    np.testing.assert_allclose(mat, j * dense_oracle(h) / j, atol=1e-15)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(mat), [-3 * j, j, j, j], atol=1e-14
    )


def test_build_hamiltonian_all_zero():
    graph = grid_graph(2, 2)
    params = PerturbationParams(np.zeros(4), np.zeros(4))
    assert build_hamiltonian(params, graph).terms == ()


def test_build_hamiltonian_size_mismatch():
    graph = grid_graph(2, 2)
    with pytest.raises(ValueError):
        build_hamiltonian(PerturbationParams(np.zeros(3), np.zeros(4)), graph)
    with pytest.raises(ValueError):
        build_hamiltonian(PerturbationParams(np.zeros(4), np.zeros(3)), graph)


def test_dense_matches_kron_oracle(rng):
    graph = grid_graph(1, 3)
    for _ in range(10):
        params = sample_params(rng, 0.1, graph)
        h = build_hamiltonian(params, graph)
        np.testing.assert_allclose(to_dense(h).matrix, dense_oracle(h), atol=1e-14)


def test_sample_params_variance():
    # uniform variance oracle: bound^2 / 3
    graph = CouplingGraph(2, ((0, 1),))
    rng = np.random.default_rng(5)
    draws = np.array(
        [sample_params(rng, BOUND, graph).j_coupling[0] for _ in range(10_000)]
    )
    assert abs(draws.var() / (BOUND**2 / 3) - 1.0) < 0.1
    assert np.all(np.abs(draws) <= BOUND)


def test_sample_params_zero_bound():
    graph = grid_graph(2, 2)
    params = sample_params(np.random.default_rng(0), 0.0, graph)
    assert not params.delta.any() and not params.j_coupling.any()


def test_sample_params_deterministic():
    graph = grid_graph(3, 3)
    a = sample_params(np.random.default_rng(3), BOUND, graph)
    b = sample_params(np.random.default_rng(3), BOUND, graph)
    np.testing.assert_array_equal(a.delta, b.delta)
    np.testing.assert_array_equal(a.j_coupling, b.j_coupling)


def test_sample_params_delta_zero_keeps_coupling_stream():
    graph = grid_graph(3, 3)
    a = sample_params(np.random.default_rng(3), BOUND, graph, delta_mode="sample")
    b = sample_params(np.random.default_rng(3), BOUND, graph, delta_mode="zero")
    np.testing.assert_array_equal(a.j_coupling, b.j_coupling)
    assert not b.delta.any()


def test_coherent_state_peak_and_symmetry():
    psi = initial_coherent_state(9)
    dim = 512
    mags = np.abs(psi)
    assert mags.argmax() == dim // 2
    np.testing.assert_allclose(mags[dim // 2 + 1 :], mags[1 : dim // 2][::-1], atol=1e-15)
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-12


def test_coherent_state_prefactor_normalises_asymptotically():
    # Gaussian-sum oracle: (2/D)^(1/2) * sum exp(-2 pi (m - D/2)^2 / D) -> 1
    dim = 512
    m = np.arange(dim)
    amp = (2.0 / dim) ** 0.25 * np.exp(-np.pi * (m - dim / 2) ** 2 / dim)
    assert abs(np.sum(amp**2) - 1.0) < 1e-3


def test_energy_uncertainty_examples():
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    h = PauliSumHamiltonian(1, ((0.25, PauliString.from_label("Z")),))
    assert abs(energy_uncertainty(h, plus) - 0.25) < 1e-14
    # eigenstate -> 0
    zero = np.array([1, 0], dtype=complex)
    assert energy_uncertainty(h, zero) < 1e-14


@pytest.mark.parametrize("theta", [0.2, 0.7, 1.1])
def test_energy_uncertainty_closed_form(theta):
    # dH = delta |sin 2 theta| for psi = cos t |0> + sin t |1>
    delta = 0.31
    h = PauliSumHamiltonian(1, ((delta, PauliString.from_label("Z")),))
    psi = np.array([np.cos(theta), np.sin(theta)], dtype=complex)
    expected = delta * abs(np.sin(2 * theta))
    assert abs(energy_uncertainty(h, psi) - expected) < 1e-12


def test_energy_uncertainty_parseval(rng):
    graph = grid_graph(1, 3)
    h = build_hamiltonian(sample_params(rng, 0.3, graph), graph)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    h_psi = model.apply_hamiltonian(h, psi)
    mean = np.vdot(psi, h_psi).real
    second = np.vdot(h_psi, h_psi).real
    assert abs(energy_uncertainty(h, psi) ** 2 + mean**2 - second) < 1e-10 * max(second, 1)


def test_energy_uncertainty_below_norm(rng):
    graph = grid_graph(2, 2)
    for _ in range(5):
        h = build_hamiltonian(sample_params(rng, 0.2, graph), graph)
        psi = rng.normal(size=16) + 1j * rng.normal(size=16)
        psi /= np.linalg.norm(psi)
        assert energy_uncertainty(h, psi) <= spectral_norm(to_dense(h)) + 1e-12


def test_conjugate_by_pauli_examples():
    h = PauliSumHamiltonian(1, ((0.5, PauliString.from_label("Z")),))
    flipped = conjugate_by_pauli(h, PauliString.from_label("X"))
    assert flipped.terms == ((-0.5, PauliString.from_label("Z")),)
    ident = conjugate_by_pauli(h, PauliString.identity(1))
    assert ident.terms == h.terms


def test_conjugate_by_pauli_heisenberg():
    # 4x4 conjugation oracle: X x 1 maps J(XX+YY+ZZ) to J(XX-YY-ZZ)
    graph = CouplingGraph(2, ((0, 1),))
    h = build_hamiltonian(PerturbationParams(np.zeros(2), np.array([0.2])), graph)
    conj = conjugate_by_pauli(h, PauliString.from_label("XI"))
    coeffs = {t.to_label(): c for c, t in conj.terms}
    assert coeffs == {"XX": 0.2, "YY": -0.2, "ZZ": -0.2}
    x = kron_pauli("XI")
    np.testing.assert_allclose(
        x.conj().T @ dense_oracle(h) @ x, dense_oracle(conj), atol=1e-15
    )


def test_conjugate_matches_dense_random(rng):
    graph = grid_graph(1, 3)
    for _ in range(20):
        h = build_hamiltonian(sample_params(rng, 0.4, graph), graph)
        d = PauliString.from_label(random_label(rng, 3))
        dm = kron_pauli(d.to_label())
        np.testing.assert_allclose(
            dm.conj().T @ dense_oracle(h) @ dm,
            dense_oracle(conjugate_by_pauli(h, d)),
            atol=1e-14,
        )


def test_hamiltonian_rejects_phase_or_duplicates():
    with pytest.raises(ValueError):
        PauliSumHamiltonian(1, ((1.0, PauliString(1, 1, 0, 1)),))
    term = PauliString.from_label("X")
    with pytest.raises(ValueError):
        PauliSumHamiltonian(1, ((1.0, term), (2.0, term)))


def test_format_hamiltonian_round_trips_floats():
    h = PauliSumHamiltonian(
        2, ((1 / 3, PauliString.from_label("XZ")), (-2e-3, PauliString.from_label("ZI")))
    )
    lines = format_hamiltonian(h).splitlines()
    assert lines[0].split() == [repr(1 / 3), "XZ"]
    assert float(lines[1].split()[0]) == -2e-3
