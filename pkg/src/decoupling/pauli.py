"""Exact algebra of n-qubit Pauli strings.

A Pauli string is stored in symplectic form: two bit masks ``x_bits`` and
``z_bits`` (bit k refers to qubit k) plus a global phase exponent
``phase_exp`` (the operator carries a factor i**phase_exp).  The operator
encoded by masks (x, z) is the tensor product over qubits of

    (0, 0) -> I,   (1, 0) -> X,   (0, 1) -> Z,   (1, 1) -> Y,

so a string with ``phase_exp in {0, 2}`` is Hermitian up to sign.  Qubit k
corresponds to bit k of the computational-basis index (little endian); in
the textual form the leftmost character is qubit 0, e.g. "XZI" means X on
qubit 0 and Z on qubit 1.

Internally the product over qubits is normalised as

    operator = i**(phase_exp + popcount(x & z)) * X^x * Z^z

which makes composition and basis-state action pure bit arithmetic: the
operator maps |m> to i**(phase_exp + popcount(x & z)) *
(-1)**popcount(m & z) |m XOR x>.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SYMBOL_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_SYMBOL = {v: k for k, v in _SYMBOL_TO_XZ.items()}
_PHASES = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])

# Parity lookup for basis indices; grown on demand, dimensions are capped
# at 2**12 by the configuration layer anyway.
_parity_table = np.zeros(1, dtype=np.int8)


def _parity(values: np.ndarray) -> np.ndarray:
    """Parity of the popcount of each entry, via a growing lookup table."""
    global _parity_table
    if len(_parity_table) <= values.max(initial=0):
        size = 1 << int(values.max()).bit_length()
        table = np.zeros(size, dtype=np.int8)
        for bit in range(size.bit_length() - 1):
            table[1 << bit : 2 << bit] = table[: 1 << bit] ^ 1
        _parity_table = table
    return _parity_table[values]


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli operator i**phase_exp * P_0 x P_1 x ... x P_{n-1}."""

    n_qubits: int
    x_bits: int
    z_bits: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"need at least one qubit, got {self.n_qubits}")
        mask = (1 << self.n_qubits) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ValueError("bit mask exceeds qubit count")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0, 0)

    @classmethod
    def from_label(cls, label: str, phase_exp: int = 0) -> "PauliString":
        """Parse "XYZI..." with the leftmost character acting on qubit 0."""
        x = z = 0
        for k, sym in enumerate(label):
            try:
                xk, zk = _SYMBOL_TO_XZ[sym]
            except KeyError:
                raise ValueError(f"invalid Pauli symbol {sym!r} in {label!r}") from None
            x |= xk << k
            z |= zk << k
        return cls(len(label), x, z, phase_exp)

    def to_label(self) -> str:
        """Textual form without the phase; leftmost character is qubit 0."""
        return "".join(
            _XZ_TO_SYMBOL[(self.x_bits >> k & 1, self.z_bits >> k & 1)]
            for k in range(self.n_qubits)
        )

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0 and self.phase_exp == 0

    @property
    def weight(self) -> int:
        """Number of qubits acted on non-trivially."""
        return (self.x_bits | self.z_bits).bit_count()

    def adjoint(self) -> "PauliString":
        """Hermitian conjugate; only the global phase flips."""
        return PauliString(self.n_qubits, self.x_bits, self.z_bits, -self.phase_exp)

    def __repr__(self):
        sign = ["", "i*", "-", "-i*"][self.phase_exp]
        return f"PauliString({sign}{self.to_label()})"


def compose(p: PauliString, q: PauliString) -> PauliString:
    """Operator product p*q with the accumulated i**k phase.

    Reordering Z^pz past X^qx costs (-1)**popcount(pz & qx); the remaining
    phase bookkeeping converts between the X^x Z^z normal form and the
    Hermitian per-qubit symbols.
    """
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"qubit counts differ: {p.n_qubits} vs {q.n_qubits}")
    x = p.x_bits ^ q.x_bits
    z = p.z_bits ^ q.z_bits
    phase = (
        p.phase_exp
        + q.phase_exp
        + (p.x_bits & p.z_bits).bit_count()
        + (q.x_bits & q.z_bits).bit_count()
        - (x & z).bit_count()
        + 2 * (p.z_bits & q.x_bits).bit_count()
    )
    return PauliString(p.n_qubits, x, z, phase % 4)


def conj_sign(d: PauliString, p: PauliString) -> int:
    """Sign s = +/-1 with d^dag p d = s * p (global phases ignored).

    s = -1 exactly when d and p anticommute, i.e. when the symplectic
    product x_d.z_p + z_d.x_p is odd.
    """
    if d.n_qubits != p.n_qubits:
        raise ValueError(f"qubit counts differ: {d.n_qubits} vs {p.n_qubits}")
    anti = ((d.x_bits & p.z_bits).bit_count() + (d.z_bits & p.x_bits).bit_count()) & 1
    return -1 if anti else 1


def apply(p: PauliString, v: np.ndarray) -> np.ndarray:
    """Apply p to a state vector as a signed, phase-carrying permutation.

    O(2^n) work; the 2-norm is preserved exactly (unit phases only).
    """
    dim = 1 << p.n_qubits
    if v.shape[0] != dim:
        raise ValueError(f"state has dimension {v.shape[0]}, expected {dim}")
    idx = np.arange(dim)
    # out[m] = i**(phase_exp + |x&z|) * (-1)**|（m^x)&z| * v[m^x]
    out = v[idx ^ p.x_bits].astype(complex, copy=True)
    sign_par = _parity((idx ^ p.x_bits) & p.z_bits)
    phase = (p.phase_exp + (p.x_bits & p.z_bits).bit_count()) % 4
    out[sign_par == 1] *= -1.0
    if phase:
        out *= _PHASES[phase]
    return out


def to_matrix(p: PauliString) -> np.ndarray:
    """Dense 2^n x 2^n matrix of p (column m holds p|m>)."""
    dim = 1 << p.n_qubits
    idx = np.arange(dim)
    signs = 1.0 - 2.0 * _parity(idx & p.z_bits)
    phase = _PHASES[(p.phase_exp + (p.x_bits & p.z_bits).bit_count()) % 4]
    mat = np.zeros((dim, dim), dtype=complex)
    mat[idx ^ p.x_bits, idx] = phase * signs
    return mat


def sample_uniform(rng: np.random.Generator, n_qubits: int) -> PauliString:
    """Draw each qubit's symbol independently and uniformly from {I, X, Y, Z}."""
    symbols = rng.integers(0, 4, size=n_qubits)
    x = z = 0
    for k, s in enumerate(symbols):
        if s == 1:
            x |= 1 << k
        elif s == 2:
            x |= 1 << k
            z |= 1 << k
        elif s == 3:
            z |= 1 << k
    return PauliString(n_qubits, x, z, 0)


def sample_uniform_block(
    rng: np.random.Generator, n_qubits: int, count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Bit masks of `count` successive sample_uniform draws as two int64
    arrays.

    Consumes the generator stream exactly like `count` repeated calls of
    sample_uniform (the bounded draw uses one word per symbol), which lets
    block-stepped Monte Carlo runs reproduce stepwise runs bit for bit.
    """
    symbols = rng.integers(0, 4, size=(count, n_qubits))
    pow2 = 1 << np.arange(n_qubits, dtype=np.int64)
    x_masks = ((symbols == 1) | (symbols == 2)) @ pow2
    z_masks = ((symbols == 2) | (symbols == 3)) @ pow2
    return x_masks, z_masks
