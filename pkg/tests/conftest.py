"""Shared oracle helpers.

Dense matrices built here come straight from Kronecker products of 2x2
literals, independent of the package's symplectic bit arithmetic, so they
can serve as ground truth for it.
"""
import numpy as np
import pytest

PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_pauli(label: str) -> np.ndarray:
    """Dense matrix for a Pauli label; leftmost character is qubit 0, and
    qubit 0 is the least significant bit of the basis index."""
    mat = np.array([[1.0 + 0.0j]])
    for sym in reversed(label):
        mat = np.kron(mat, PAULI_MATS[sym])
    return mat


def random_label(rng, n: int) -> str:
    return "".join(rng.choice(list("IXYZ")) for _ in range(n))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
