import itertools

import numpy as np
import pytest

from decoupling import pauli
from decoupling.pauli import PauliString

from conftest import kron_pauli, random_label

PHASES = [1, 1j, -1, -1j]

ALL_1Q = [PauliString.from_label(s) for s in "IXYZ"]
ALL_2Q = [PauliString.from_label(a + b) for a in "IXYZ" for b in "IXYZ"]


def dense(p: PauliString) -> np.ndarray:
    return PHASES[p.phase_exp] * kron_pauli(p.to_label())


def test_label_round_trip():
    for label in ("I", "XYZ", "IXZY", "ZZZZZZZZZ"):
        assert PauliString.from_label(label).to_label() == label


def test_invalid_label_rejected():
    with pytest.raises(ValueError):
        PauliString.from_label("XQ")


def test_mask_outside_qubits_rejected():
    with pytest.raises(ValueError):
        PauliString(2, x_bits=4, z_bits=0)


def test_compose_involution():
    x = PauliString.from_label("X")
    assert pauli.compose(x, x) == PauliString.identity(1)


def test_compose_x_times_z_is_minus_i_y():
    # dense oracle: X @ Z = -i Y
    x, z = PauliString.from_label("X"), PauliString.from_label("Z")
    result = pauli.compose(x, z)
    assert result.to_label() == "Y"
    assert result.phase_exp == 3
    np.testing.assert_allclose(dense(result), kron_pauli("X") @ kron_pauli("Z"))


def test_compose_disjoint_supports():
    p = PauliString.from_label("XI")
    q = PauliString.from_label("IZ")
    result = pauli.compose(p, q)
    assert result.to_label() == "XZ"
    assert result.phase_exp == 0


def test_compose_size_mismatch():
    with pytest.raises(ValueError):
        pauli.compose(PauliString.from_label("X"), PauliString.from_label("XX"))


def test_compose_matches_dense_exhaustive_1q():
    for p in ALL_1Q:
        for q in ALL_1Q:
            for pp in range(4):
                for qp in range(4):
                    a = PauliString(1, p.x_bits, p.z_bits, pp)
                    b = PauliString(1, q.x_bits, q.z_bits, qp)
                    np.testing.assert_allclose(
                        dense(pauli.compose(a, b)), dense(a) @ dense(b), atol=1e-15
                    )


def test_compose_matches_dense_random_3q(rng):
    for _ in range(200):
        a = PauliString.from_label(random_label(rng, 3), phase_exp=int(rng.integers(4)))
        b = PauliString.from_label(random_label(rng, 3), phase_exp=int(rng.integers(4)))
        np.testing.assert_allclose(
            dense(pauli.compose(a, b)), dense(a) @ dense(b), atol=1e-15
        )


def test_compose_associative_random_triples(rng):
    for _ in range(100):
        a, b, c = (PauliString.from_label(random_label(rng, 3)) for _ in range(3))
        left = pauli.compose(pauli.compose(a, b), c)
        right = pauli.compose(a, pauli.compose(b, c))
        assert left == right


def test_conj_sign_basics():
    z, x = PauliString.from_label("Z"), PauliString.from_label("X")
    assert pauli.conj_sign(z, x) == -1  # ZXZ = -X
    assert pauli.conj_sign(PauliString.identity(1), x) == 1


def test_conj_sign_xy_zz():
    # dense 4x4 oracle: per-qubit signs (-1)(-1) = +1
    d = PauliString.from_label("XY")
    p = PauliString.from_label("ZZ")
    assert pauli.conj_sign(d, p) == 1
    dm, pm = kron_pauli("XY"), kron_pauli("ZZ")
    np.testing.assert_allclose(dm.conj().T @ pm @ dm, pm)


def test_conj_sign_matches_dense_exhaustive_2q():
    # all 256 ordered pairs on two qubits against dense conjugation
    for d in ALL_2Q:
        for p in ALL_2Q:
            dm, pm = dense(d), dense(p)
            conjugated = dm.conj().T @ pm @ dm
            sign = pauli.conj_sign(d, p)
            np.testing.assert_allclose(conjugated, sign * pm, atol=1e-15)


def test_conj_sign_size_mismatch():
    with pytest.raises(ValueError):
        pauli.conj_sign(PauliString.from_label("X"), PauliString.from_label("XX"))


def test_apply_basis_examples():
    x, y, z = (PauliString.from_label(s) for s in "XYZ")
    zero = np.array([1, 0], dtype=complex)
    np.testing.assert_array_equal(pauli.apply(x, zero), [0, 1])
    np.testing.assert_array_equal(pauli.apply(y, zero), [0, 1j])
    v = np.array([0.6, 0.8], dtype=complex)
    np.testing.assert_array_equal(pauli.apply(z, v), [0.6, -0.8])


def test_apply_matches_dense_random(rng):
    for _ in range(50):
        p = PauliString.from_label(random_label(rng, 3), phase_exp=int(rng.integers(4)))
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        np.testing.assert_allclose(pauli.apply(p, v), dense(p) @ v, atol=1e-14)


def test_apply_inverse_round_trip(rng):
    for _ in range(50):
        p = PauliString.from_label(random_label(rng, 4), phase_exp=int(rng.integers(4)))
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        v /= np.linalg.norm(v)
        back = pauli.apply(p, pauli.apply(p.adjoint(), v))
        np.testing.assert_allclose(back, v, atol=1e-14)


def test_apply_preserves_norm_exactly(rng):
    v = rng.normal(size=32) + 1j * rng.normal(size=32)
    for _ in range(20):
        p = pauli.sample_uniform(rng, 5)
        assert np.linalg.norm(pauli.apply(p, v)) == np.linalg.norm(v)


def test_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        pauli.apply(PauliString.from_label("XX"), np.ones(2, dtype=complex))


def test_adjoint_is_inverse():
    for p in ALL_2Q:
        for ph in range(4):
            q = PauliString(2, p.x_bits, p.z_bits, ph)
            assert pauli.compose(q, q.adjoint()) == PauliString.identity(2)


def test_to_matrix_matches_kron(rng):
    for _ in range(30):
        p = PauliString.from_label(random_label(rng, 3), phase_exp=int(rng.integers(4)))
        np.testing.assert_allclose(pauli.to_matrix(p), dense(p), atol=0)


def test_sample_uniform_deterministic():
    a = pauli.sample_uniform(np.random.default_rng(7), 9)
    b = pauli.sample_uniform(np.random.default_rng(7), 9)
    assert a == b
    assert a.n_qubits == 9
    assert a.phase_exp == 0


def test_sample_uniform_symbol_frequencies():
    # multinomial oracle: each symbol expected n/4 times, sigma = sqrt(n*p*(1-p))
    n = 4**6
    rng = np.random.default_rng(11)
    counts = {s: 0 for s in "IXYZ"}
    for _ in range(n):
        counts[pauli.sample_uniform(rng, 1).to_label()] += 1
    sigma = np.sqrt(n * 0.25 * 0.75)
    for sym in "IXYZ":
        assert abs(counts[sym] - n / 4) < 5 * sigma
