"""Dense complex linear algebra for 2^n-dimensional operators.

Thin, contract-checked wrappers around the platform eigensolvers: Hermitian
eigendecomposition, unitary exponentials and logarithms, spectral norms, and
matrix-vector products.  Propagation is exact (eigenbasis, no Trotter step),
so discretisation error never enters downstream comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-12  # relative, against the largest entry
UNITARY_TOL = 1e-10
BRANCH_MARGIN = 1e-6  # eigenphases must stay this far from +/- pi


class BranchAmbiguityError(ValueError):
    """An eigenphase sits too close to the +/- pi branch cut."""


@dataclass(frozen=True)
class DenseOperator:
    """A dim x dim complex matrix tagged hermitian, unitary, or general."""

    matrix: np.ndarray
    kind: str = "general"

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be square, got shape {mat.shape}")
        if mat.shape[0] & (mat.shape[0] - 1):
            raise ValueError(f"dimension {mat.shape[0]} is not a power of two")
        if self.kind == "hermitian":
            scale = max(np.abs(mat).max(), 1.0)
            if np.abs(mat - mat.conj().T).max() > HERMITIAN_TOL * scale:
                raise ValueError("matrix tagged hermitian is not Hermitian")
        elif self.kind == "unitary":
            defect = mat.conj().T @ mat - np.eye(mat.shape[0])
            if np.abs(defect).max() > UNITARY_TOL:
                raise ValueError("matrix tagged unitary is not unitary")
        elif self.kind != "general":
            raise ValueError(f"unknown kind {self.kind!r}")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition A = V diag(eigenvalues) V^dag."""

    eigenvalues: np.ndarray
    eigenvectors: DenseOperator = field(repr=False)


def hermitian_eig(op: DenseOperator) -> Spectrum:
    """Eigenvalues (real, ascending) and a unitary eigenvector matrix."""
    _require(op, "hermitian")
    values, vectors = np.linalg.eigh(op.matrix)
    return Spectrum(values, DenseOperator(vectors, kind="unitary"))


def expm_hermitian(op: DenseOperator, t: float) -> DenseOperator:
    """exp(-i H t) for Hermitian H, via the eigenbasis (hbar = 1).

    The result is polar-projected onto the unitary group so long products
    of steps do not accumulate a norm bias.
    """
    spec = hermitian_eig(op)
    vec = spec.eigenvectors.matrix
    u = (vec * np.exp(-1j * spec.eigenvalues * t)) @ vec.conj().T
    w, _, vh = np.linalg.svd(u)
    return DenseOperator(w @ vh, kind="unitary")


def unitary_log(op: DenseOperator, duration: float) -> DenseOperator:
    """Hermitian H with op = exp(-i H duration), eigenphases in (-pi, pi].

    Raises BranchAmbiguityError when an eigenphase is within BRANCH_MARGIN
    of +/- pi, i.e. when the duration is too long to identify H uniquely.
    """
    _require(op, "unitary")
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    # A unitary matrix is normal, so its complex Schur form is diagonal and
    # the Schur basis is a unitary eigenbasis (robust under degeneracies).
    tri, basis = scipy.linalg.schur(op.matrix, output="complex")
    phases = np.angle(np.diag(tri))
    if np.abs(phases).max(initial=0.0) > np.pi - BRANCH_MARGIN:
        raise BranchAmbiguityError(
            "eigenphase within margin of +/- pi; shorten the duration to make "
            "the generator unambiguous"
        )
    herm = (basis * (-phases / duration)) @ basis.conj().T
    herm = (herm + herm.conj().T) / 2
    return DenseOperator(herm, kind="hermitian")


def spectral_norm(op: DenseOperator) -> float:
    """Largest |eigenvalue| of a Hermitian operator."""
    _require(op, "hermitian")
    return float(np.abs(np.linalg.eigvalsh(op.matrix)).max())


def matvec(op: DenseOperator, v: np.ndarray) -> np.ndarray:
    """A @ v with a dimension check; the engine's throughput kernel."""
    if v.shape[0] != op.dim:
        raise ValueError(f"state has dimension {v.shape[0]}, expected {op.dim}")
    return op.matrix @ v


def _require(op: DenseOperator, kind: str) -> None:
    if op.kind != kind:
        raise ValueError(f"operator tagged {op.kind!r}, expected {kind!r}")
