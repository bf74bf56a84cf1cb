"""Decoupling cycles: construction, verification, and frame sequences.

The deterministic cycle comes from a strength-2 orthogonal array over the
four symbols {I, X, Y, Z}: one row per time step, one column per qubit.
Strength 2 guarantees that every one- and two-local Pauli term anticommutes
with exactly half of the frames, so the first-order average of the
perturbation vanishes at cycle boundaries.

OA(2 q^2, 2q + 1, q, 2) with q = 4 is built from a maximal partial spread
of GF(2)^5: nine two-dimensional subspaces of binary 5-space that pairwise
intersect only in 0.  Column i of the array reads a pair of parity bits
<a_i, u>, <b_i, u> for each of the 32 vectors u, where (a_i, b_i) spans
subspace i; pairwise trivial intersection makes any four such functionals
independent, which is exactly the strength-2 balance condition.  Row u = 0
is automatically the identity frame.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import pauli
from .model import PauliSumHamiltonian
from .pauli import PauliString

SCHEME_KINDS = ("free", "bang_bang", "parec", "embedded")

# symbol -> (x, z) bit pair; 0=I, 1=X, 2=Y, 3=Z as in the frame map
_SYMBOL_XZ = ((0, 0), (1, 0), (1, 1), (0, 1))


@dataclass(frozen=True)
class SymbolArray:
    """R x C array over the alphabet {0, ..., q-1}."""

    q: int
    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("entries must be a 2-d array")
        if arr.min(initial=0) < 0 or arr.max(initial=0) >= self.q:
            raise ValueError(f"entries outside 0..{self.q - 1}")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class OACheck:
    """Outcome of an orthogonal-array verification."""

    ok: bool
    columns: Optional[tuple[int, ...]] = None
    symbols: Optional[tuple[int, ...]] = None
    count: Optional[int] = None
    expected: Optional[int] = None


@dataclass(frozen=True)
class DecouplingCycle:
    """Ordered frame operators d_0 ... d_{N-1}, one per step of length tau."""

    frames: tuple[PauliString, ...]
    step: float = 1.0

    def __post_init__(self):
        if not self.frames:
            raise ValueError("cycle needs at least one frame")
        n = self.frames[0].n_qubits
        if any(f.n_qubits != n for f in self.frames):
            raise ValueError("all frames must act on the same qubits")
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")
        object.__setattr__(self, "frames", tuple(self.frames))

    @property
    def n_qubits(self) -> int:
        return self.frames[0].n_qubits

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def cycle_time(self) -> float:
        return self.n_frames * self.step


@dataclass(frozen=True)
class SchemeSpec:
    """Which control scheme to run; bang_bang and embedded need a cycle."""

    kind: str
    cycle: Optional[DecouplingCycle] = None
    pulse_interval: float = 1.0

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"kind must be one of {SCHEME_KINDS}, got {self.kind!r}")
        if self.kind in ("bang_bang", "embedded"):
            if self.cycle is None:
                raise ValueError(f"scheme {self.kind!r} requires a cycle")
            if self.cycle.step != self.pulse_interval:
                raise ValueError("cycle step must equal the pulse interval")
        if self.pulse_interval <= 0:
            raise ValueError(f"pulse interval must be positive, got {self.pulse_interval}")

    @property
    def deterministic(self) -> bool:
        return self.kind in ("free", "bang_bang")


def _lines_gf2_5() -> list[tuple[int, int, int]]:
    """All 2-d subspaces of GF(2)^5 as sorted nonzero-point triples."""
    lines = set()
    for a in range(1, 32):
        for b in range(a + 1, 32):
            lines.add(tuple(sorted((a, b, a ^ b))))
    return sorted(lines)


def _partial_spread(n_lines: int) -> list[tuple[int, int, int]]:
    """First (lexicographic, backtracking) set of pairwise disjoint lines."""
    lines = _lines_gf2_5()
    chosen: list[tuple[int, int, int]] = []
    covered: set[int] = set()

    def extend() -> bool:
        if len(chosen) == n_lines:
            return True
        if 31 - len(covered) < 3 * (n_lines - len(chosen)):
            return False
        pivot = next(p for p in range(1, 32) if p not in covered)
        for line in lines:
            if pivot in line and not covered.intersection(line):
                chosen.append(line)
                covered.update(line)
                if extend():
                    return True
                chosen.pop()
                covered.difference_update(line)
        return False

    if not extend():
        raise RuntimeError(f"no partial spread of size {n_lines} found")
    return chosen


def construct_oa(q: int = 4, runs: int = 32, cols: int = 9) -> SymbolArray:
    """Strength-2 orthogonal array OA(2 q^2, 2q + 1, q, 2) for q = 4.

    The first row is all-zero by construction.  Raises if the requested
    parameters are not the supported (32, 9, 4) family.
    """
    if (q, runs, cols) != (4, 32, 9):
        raise ValueError(
            f"supported parameters are (q, runs, cols) = (4, 32, 9), "
            f"got ({q}, {runs}, {cols})"
        )
    spread = _partial_spread(cols)
    arr = np.zeros((runs, cols), dtype=np.int64)
    for u in range(runs):
        for i, line in enumerate(spread):
            hi = (u & line[0]).bit_count() & 1
            lo = (u & line[1]).bit_count() & 1
            arr[u, i] = 2 * hi + lo
    return SymbolArray(q, arr)


def verify_orthogonal_array(a: SymbolArray, strength: int = 2) -> OACheck:
    """Exact counting check: every choice of `strength` columns must contain
    each symbol tuple exactly rows / q**strength times."""
    if strength < 1:
        raise ValueError(f"strength must be positive, got {strength}")
    expected, rem = divmod(a.rows, a.q**strength)
    if rem:
        return OACheck(False, None, None, None, 0)
    for cols in itertools.combinations(range(a.cols), strength):
        counts: dict[tuple[int, ...], int] = {}
        for row in a.entries:
            key = tuple(int(row[c]) for c in cols)
            counts[key] = counts.get(key, 0) + 1
        for key in itertools.product(range(a.q), repeat=strength):
            if counts.get(key, 0) != expected:
                return OACheck(False, cols, key, counts.get(key, 0), expected)
    return OACheck(True, expected=expected)


def cycle_from_array(a: SymbolArray, step: float = 1.0) -> DecouplingCycle:
    """Row j -> frame d_j via 0->I, 1->X, 2->Y, 3->Z per column/qubit."""
    frames = []
    for row in a.entries:
        x = z = 0
        for k, s in enumerate(row):
            xk, zk = _SYMBOL_XZ[s]
            x |= xk << k
            z |= zk << k
        frames.append(PauliString(a.cols, x, z, 0))
    return DecouplingCycle(tuple(frames), step)


def verify_decoupling(cycle: DecouplingCycle, h: PauliSumHamiltonian) -> PauliSumHamiltonian:
    """First-order average sum_j (d_j^dag H d_j) * step, by exact sign counts.

    The per-term sign sums are integers, so an empty result certifies
    first-order decoupling exactly, with no floating-point slack.
    """
    if cycle.n_qubits != h.n_qubits:
        raise ValueError(
            f"qubit counts differ: cycle {cycle.n_qubits} vs H {h.n_qubits}"
        )
    residual = []
    for coeff, term in h.terms:
        sign_sum = sum(pauli.conj_sign(d, term) for d in cycle.frames)
        if sign_sum != 0:
            residual.append((coeff * sign_sum * cycle.step, term))
    return PauliSumHamiltonian(h.n_qubits, tuple(residual))


def frame_iter(spec: SchemeSpec, n_steps: int, rng: np.random.Generator, n_qubits: int) -> Iterator[PauliString]:
    """Lazily yield the frame operator for each step.

    free: identity; bang_bang: d_{j mod N}; parec: fresh uniform random
    string each step; embedded: d_{j mod N} composed with a random string
    refreshed at each cycle boundary.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be positive, got {n_steps}")
    if spec.kind == "free":
        ident = PauliString.identity(n_qubits)
        for _ in range(n_steps):
            yield ident
    elif spec.kind == "bang_bang":
        frames = spec.cycle.frames
        for j in range(n_steps):
            yield frames[j % len(frames)]
    elif spec.kind == "parec":
        for _ in range(n_steps):
            yield pauli.sample_uniform(rng, n_qubits)
    else:  # embedded
        frames = spec.cycle.frames
        n = len(frames)
        random_frame = None
        for j in range(n_steps):
            if j % n == 0:
                random_frame = pauli.sample_uniform(rng, n_qubits)
            yield pauli.compose(frames[j % n], random_frame)


def frame_sequence(spec: SchemeSpec, n_steps: int, rng: np.random.Generator, n_qubits: int) -> list[PauliString]:
    """Materialised frame_iter; the physical pulse at step j is g_j g_{j-1}^dag."""
    return list(frame_iter(spec, n_steps, rng, n_qubits))


def write_cycle(path, cycle: DecouplingCycle) -> None:
    """Cycle file: header "N n_qubits", then one Pauli label per line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{cycle.n_frames} {cycle.n_qubits}\n")
        for frame in cycle.frames:
            fh.write(frame.to_label() + "\n")


def read_cycle(path, step: float = 1.0) -> DecouplingCycle:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("cycle file header must be 'N n_qubits'")
        n_frames, n_qubits = (int(tok) for tok in header)
        frames = []
        for _ in range(n_frames):
            label = fh.readline().strip()
            if len(label) != n_qubits:
                raise ValueError(
                    f"cycle line {label!r} does not match {n_qubits} qubits"
                )
            frames.append(PauliString.from_label(label))
    return DecouplingCycle(tuple(frames), step)
