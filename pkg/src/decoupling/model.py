"""Perturbation Hamiltonian on a qubit lattice, initial state, and scalar
observables.

Units: hbar = 1 and the pulse interval tau is the time unit, so every
coefficient and rate is a dimensionless multiple of 1/tau.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pauli
from .linalg import DenseOperator
from .pauli import PauliString

MAX_QUBITS = 12

DEFAULT_COUPLING_BOUND = np.sqrt(3.0) * 1e-3


@dataclass(frozen=True)
class CouplingGraph:
    """Qubits plus the unordered pairs (k, l), k < l, that interact."""

    n_qubits: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        seen = set()
        for k, l in self.edges:
            if not 0 <= k < l < self.n_qubits:
                raise ValueError(f"invalid edge ({k}, {l}) for {self.n_qubits} qubits")
            if (k, l) in seen:
                raise ValueError(f"duplicate edge ({k}, {l})")
            seen.add((k, l))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))


@dataclass(frozen=True)
class PerturbationParams:
    """Static disorder: delta[k] multiplies Z_k, j_coupling[e] multiplies the
    Heisenberg term XX + YY + ZZ on edge e (aligned with graph.edges)."""

    delta: np.ndarray
    j_coupling: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "delta", np.asarray(self.delta, dtype=float))
        object.__setattr__(self, "j_coupling", np.asarray(self.j_coupling, dtype=float))
        self.delta.flags.writeable = False
        self.j_coupling.flags.writeable = False


@dataclass(frozen=True)
class PauliSumHamiltonian:
    """Real-weighted sum of phase-free Pauli strings; Hermitian by construction."""

    n_qubits: int
    terms: tuple[tuple[float, PauliString], ...]

    def __post_init__(self):
        seen = set()
        for coeff, term in self.terms:
            if term.n_qubits != self.n_qubits:
                raise ValueError("term size does not match Hamiltonian")
            if term.phase_exp != 0:
                raise ValueError("Hamiltonian terms must be phase-free")
            key = (term.x_bits, term.z_bits)
            if key in seen:
                raise ValueError(f"repeated string {term.to_label()}")
            seen.add(key)
        object.__setattr__(
            self, "terms", tuple((float(c), t) for c, t in self.terms)
        )


def grid_graph(rows: int, cols: int) -> CouplingGraph:
    """Nearest-neighbour (4-neighbour) rectangular grid, row-major indexing."""
    n = rows * cols
    edges = []
    for r in range(rows):
        for c in range(cols):
            k = r * cols + c
            if c + 1 < cols:
                edges.append((k, k + 1))
            if r + 1 < rows:
                edges.append((k, k + cols))
    return CouplingGraph(n, tuple(edges))


def sample_params(
    rng: np.random.Generator,
    bound: float,
    graph: CouplingGraph,
    delta_mode: str = "sample",
) -> PerturbationParams:
    """Draw static disorder uniformly from [-bound, bound].

    Couplings are drawn first (one per edge, in edge order), then the
    one-qubit detunings, so the coupling stream is identical whether or not
    delta_mode == "zero".
    """
    if bound < 0:
        raise ValueError(f"bound must be nonnegative, got {bound}")
    if delta_mode not in ("sample", "zero"):
        raise ValueError(f"delta_mode must be 'sample' or 'zero', got {delta_mode!r}")
    j = rng.uniform(-bound, bound, size=len(graph.edges))
    if delta_mode == "sample":
        delta = rng.uniform(-bound, bound, size=graph.n_qubits)
    else:
        delta = np.zeros(graph.n_qubits)
    return PerturbationParams(delta, j)


def build_hamiltonian(params: PerturbationParams, graph: CouplingGraph) -> PauliSumHamiltonian:
    """Sum of delta_k Z_k plus J_kl (XX + YY + ZZ) over the graph edges."""
    n = graph.n_qubits
    if params.delta.shape != (n,):
        raise ValueError(f"delta has shape {params.delta.shape}, expected ({n},)")
    if params.j_coupling.shape != (len(graph.edges),):
        raise ValueError(
            f"j_coupling has shape {params.j_coupling.shape}, "
            f"expected ({len(graph.edges)},)"
        )
    terms = []
    for k in range(n):
        if params.delta[k] != 0.0:
            terms.append((params.delta[k], PauliString(n, 0, 1 << k)))
    for (k, l), j in zip(graph.edges, params.j_coupling):
        if j != 0.0:
            m = (1 << k) | (1 << l)
            terms.append((j, PauliString(n, m, 0)))  # XX
            terms.append((j, PauliString(n, m, m)))  # YY
            terms.append((j, PauliString(n, 0, m)))  # ZZ
    return PauliSumHamiltonian(n, tuple(terms))


def conjugate_by_pauli(h: PauliSumHamiltonian, d: PauliString) -> PauliSumHamiltonian:
    """d^dag H d: same strings, coefficients flipped where d anticommutes."""
    if d.n_qubits != h.n_qubits:
        raise ValueError(f"qubit counts differ: {d.n_qubits} vs {h.n_qubits}")
    return PauliSumHamiltonian(
        h.n_qubits,
        tuple((coeff * pauli.conj_sign(d, term), term) for coeff, term in h.terms),
    )


def to_dense(h: PauliSumHamiltonian) -> DenseOperator:
    """Dense Hermitian matrix of a Pauli-sum Hamiltonian."""
    dim = 1 << h.n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, term in h.terms:
        mat += coeff * pauli.to_matrix(term)
    return DenseOperator(mat, kind="hermitian")


def apply_hamiltonian(h: PauliSumHamiltonian, psi: np.ndarray) -> np.ndarray:
    """H |psi> accumulated term by term; O(#terms * 2^n)."""
    out = np.zeros(1 << h.n_qubits, dtype=complex)
    for coeff, term in h.terms:
        out += coeff * pauli.apply(term, psi)
    return out


def initial_coherent_state(n_qubits: int) -> np.ndarray:
    """Gaussian-enveloped, sign-alternating amplitudes peaked at m = D/2.

    a_m proportional to (-1)^m exp(-pi (m - D/2)^2 / D), renormalised
    numerically to unit norm (the closed-form prefactor only normalises
    asymptotically).
    """
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
    dim = 1 << n_qubits
    m = np.arange(dim)
    amp = (-1.0) ** m * np.exp(-np.pi * (m - dim / 2) ** 2 / dim)
    return (amp / np.linalg.norm(amp)).astype(complex)


def energy_uncertainty(h, psi: np.ndarray) -> float:
    """sqrt(<H^2> - <H>^2) in the state psi; accepts a PauliSumHamiltonian
    or a Hermitian DenseOperator."""
    if isinstance(h, PauliSumHamiltonian):
        h_psi = apply_hamiltonian(h, psi)
    elif isinstance(h, DenseOperator):
        h_psi = h.matrix @ psi
    else:
        raise TypeError(f"unsupported Hamiltonian type {type(h).__name__}")
    mean = np.vdot(psi, h_psi).real
    second = np.vdot(h_psi, h_psi).real
    return float(np.sqrt(max(second - mean**2, 0.0)))


def format_hamiltonian(h: PauliSumHamiltonian) -> str:
    """Text export, one "coefficient pauli_string" line per term."""
    return "".join(f"{coeff!r} {term.to_label()}\n" for coeff, term in h.terms)
