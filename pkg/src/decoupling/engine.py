"""Exact time evolution under any control scheme, fidelity measurement,
residual-generator extraction, and seeded Monte Carlo averaging.

The inner loop steps frames, not pulses: one interval advances the state by
g_j^dag E g_j with E = exp(-i H0 tau), which makes the free, bang-bang,
PAREC, and embedded code paths identical and keeps the recorded fidelity
frame-neutral (the closing frame inverse is always applied).

Monte Carlo runs are aggregated in fixed run order and each run draws from
its own generator, derived from the master seed by a counter-based split,
so results do not depend on scheduling or worker count.  Stochastic schemes
are stepped as one (n_runs x dim) state block: per step, every run applies
its own signed permutation and the dense step unitary is applied to the
whole block as a single matrix product.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import pauli
from .linalg import DenseOperator, expm_hermitian, matvec, unitary_log
from .model import PauliSumHamiltonian, to_dense
from .pauli import PauliString, _parity
from .schemes import DecouplingCycle, SchemeSpec, frame_iter

NORM_TOL = 1e-10

# spawn-key domains under one master seed; domain 0 is reserved for the
# disorder draw (see cli), domain 1 for per-run control randomness
RUN_STREAM_DOMAIN = 1


def run_rng(master_seed: int, run_index: int) -> np.random.Generator:
    """Generator for one Monte Carlo run; pure function of (seed, run)."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(RUN_STREAM_DOMAIN, run_index))
    return np.random.default_rng(seq)


@dataclass(frozen=True)
class FidelityTrace:
    """Sampled times (units of the pulse interval) with mean fidelity and
    standard error of the mean (zero for deterministic schemes)."""

    times: np.ndarray
    mean_fidelity: np.ndarray
    std_error: np.ndarray
    n_runs: int

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        mean = np.asarray(self.mean_fidelity, dtype=float)
        err = np.asarray(self.std_error, dtype=float)
        if not (times.shape == mean.shape == err.shape):
            raise ValueError("trace arrays must have equal lengths")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if mean.min(initial=1.0) < 0.0 or mean.max(initial=0.0) > 1.0 + 1e-10:
            raise ValueError("fidelities outside [0, 1 + 1e-10]")
        for name, arr in (("times", times), ("mean_fidelity", mean), ("std_error", err)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class PropagatorCache:
    """Shared read-only propagators: the step unitary E = exp(-i H0 tau),
    and optionally one cycle unitary and its residual generator."""

    step_unitary: DenseOperator
    cycle_unitary: Optional[DenseOperator] = None
    residual: Optional[DenseOperator] = None


def build_cache(
    h0: PauliSumHamiltonian,
    pulse_interval: float = 1.0,
    cycle: Optional[DecouplingCycle] = None,
    with_residual: bool = False,
) -> PropagatorCache:
    dense = to_dense(h0)
    step = expm_hermitian(dense, pulse_interval)
    cycle_unitary = residual = None
    if cycle is not None:
        cycle_unitary = cycle_propagator(h0, cycle, step_unitary=step)
        if with_residual:
            residual = residual_hamiltonian(cycle_unitary, cycle.cycle_time)
    return PropagatorCache(step, cycle_unitary, residual)


def _conjugated_step(step_matrix: np.ndarray, frame: PauliString) -> np.ndarray:
    """Dense d^dag E d; global phases cancel, only signs and the index
    permutation survive."""
    dim = step_matrix.shape[0]
    idx = np.arange(dim)
    perm = idx ^ frame.x_bits
    signs = 1.0 - 2.0 * _parity(idx & frame.z_bits)
    return (signs[:, None] * signs[None, :]) * step_matrix[np.ix_(perm, perm)]


def cycle_propagator(
    h0: PauliSumHamiltonian,
    cycle: DecouplingCycle,
    step_unitary: Optional[DenseOperator] = None,
) -> DenseOperator:
    """U_c = prod_j d_j^dag E d_j, time ordered (j = N-1 ... 0, leftmost
    latest), polar-projected onto the unitary group."""
    if cycle.n_qubits != h0.n_qubits:
        raise ValueError("cycle and Hamiltonian qubit counts differ")
    if step_unitary is None:
        step_unitary = expm_hermitian(to_dense(h0), cycle.step)
    u = np.eye(step_unitary.dim, dtype=complex)
    for frame in cycle.frames:
        u = _conjugated_step(step_unitary.matrix, frame) @ u
    w, _, vh = np.linalg.svd(u)
    return DenseOperator(w @ vh, kind="unitary")


def residual_hamiltonian(cycle_unitary: DenseOperator, cycle_time: float) -> DenseOperator:
    """Hermitian generator of one cycle: U_c = exp(-i Hres T_c)."""
    return unitary_log(cycle_unitary, cycle_time)


def _check_state(psi: np.ndarray, dim: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (dim,):
        raise ValueError(f"state has shape {psi.shape}, expected ({dim},)")
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise ValueError("initial state is not normalised")
    return psi


def evolve(
    h0: PauliSumHamiltonian,
    spec: SchemeSpec,
    psi0: np.ndarray,
    n_steps: int,
    record_stride: int,
    rng: Optional[np.random.Generator] = None,
    cache: Optional[PropagatorCache] = None,
) -> FidelityTrace:
    """Single run, stepwise: per step the state advances by g^dag E g.

    Fidelity |<psi0|state>|^2 is recorded at t = 0 and then every
    record_stride steps; record_stride must divide n_steps.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be positive, got {n_steps}")
    if record_stride < 1 or n_steps % record_stride:
        raise ValueError("record_stride must be positive and divide n_steps")
    if cache is None:
        cache = build_cache(h0, spec.pulse_interval)
    step = cache.step_unitary
    psi0 = _check_state(psi0, step.dim)
    state = psi0.copy()
    fidelities = [1.0]
    for j, frame in enumerate(frame_iter(spec, n_steps, rng, h0.n_qubits)):
        if frame.is_identity:
            state = matvec(step, state)
        else:
            state = pauli.apply(frame.adjoint(), matvec(step, pauli.apply(frame, state)))
        if (j + 1) % record_stride == 0:
            fidelities.append(abs(np.vdot(psi0, state)) ** 2)
    times = np.arange(0, n_steps + 1, record_stride, dtype=float) * spec.pulse_interval
    fid = np.asarray(fidelities)
    return FidelityTrace(times, fid, np.zeros_like(fid), 1)


def evolve_embedded_fast(
    h0: PauliSumHamiltonian,
    cycle: DecouplingCycle,
    psi0: np.ndarray,
    n_cycles: int,
    rng: np.random.Generator,
    cache: Optional[PropagatorCache] = None,
) -> FidelityTrace:
    """Embedded scheme, one cycle at a time: state <- r_m^dag U_c r_m state.

    Draws one random frame per cycle in the same stream order as the
    stepwise path, so equal seeds give identical traces (to rounding).
    """
    if n_cycles < 1:
        raise ValueError(f"n_cycles must be positive, got {n_cycles}")
    if cache is None or cache.cycle_unitary is None:
        cache = build_cache(h0, cycle.step, cycle)
    u_c = cache.cycle_unitary
    psi0 = _check_state(psi0, u_c.dim)
    state = psi0.copy()
    fidelities = [1.0]
    for _ in range(n_cycles):
        frame = pauli.sample_uniform(rng, h0.n_qubits)
        state = pauli.apply(frame.adjoint(), matvec(u_c, pauli.apply(frame, state)))
        fidelities.append(abs(np.vdot(psi0, state)) ** 2)
    times = np.arange(0, n_cycles + 1, dtype=float) * cycle.cycle_time
    fid = np.asarray(fidelities)
    return FidelityTrace(times, fid, np.zeros_like(fid), 1)


class _BlockStepper:
    """Advances an (n_runs, dim) state block by conjugated-unitary steps.

    Per step, row r undergoes g_r^dag U g_r.  Because each frame and its
    adjoint act within the same step, the frames' global phases cancel
    exactly, so only the index permutation and the Z-mask signs are applied.
    """

    def __init__(self, unitary: np.ndarray, psi0: np.ndarray, n_runs: int):
        dim = psi0.shape[0]
        self.unitary_t = np.ascontiguousarray(unitary.T)
        self.states = np.tile(psi0, (n_runs, 1))
        self.idx = np.arange(dim)
        self.row_offsets = (np.arange(n_runs) * dim)[:, None]
        self.sign_table = 1.0 - 2.0 * _parity(self.idx)
        self.bra = psi0.conj()

    def _signed_permute(self, x_masks, z_masks):
        perm = x_masks[:, None] ^ self.idx[None, :]
        out = np.take(self.states.reshape(-1), self.row_offsets + perm)
        out *= self.sign_table[perm & z_masks[:, None]]
        self.states = out

    def step_masks(self, x_masks: np.ndarray, z_masks: np.ndarray) -> None:
        self._signed_permute(x_masks, z_masks)
        self.states = self.states @ self.unitary_t
        self._signed_permute(x_masks, z_masks)

    def step(self, frames: list[PauliString]) -> None:
        self.step_masks(
            np.array([f.x_bits for f in frames], dtype=np.int64),
            np.array([f.z_bits for f in frames], dtype=np.int64),
        )

    def fidelities(self) -> np.ndarray:
        return np.abs(self.states @ self.bra) ** 2


_DRAW_CHUNK = 256  # steps of per-run randomness drawn per block


def _batched_stochastic(
    spec: SchemeSpec,
    cache: PropagatorCache,
    psi0: np.ndarray,
    n_steps: int,
    record_stride: int,
    n_runs: int,
    master_seed: int,
    n_qubits: int,
) -> np.ndarray:
    """Step all runs together; returns (n_runs, n_records+1) fidelities."""
    stepper = _BlockStepper(cache.step_unitary.matrix, psi0, n_runs)
    fids = [np.ones(n_runs)]
    if spec.kind == "parec":
        # chunked per-run draws; stream-identical to stepwise sampling
        gens = [run_rng(master_seed, r) for r in range(n_runs)]
        x_blk = np.empty((n_runs, _DRAW_CHUNK), dtype=np.int64)
        z_blk = np.empty_like(x_blk)
        for base in range(0, n_steps, _DRAW_CHUNK):
            width = min(_DRAW_CHUNK, n_steps - base)
            for r, gen in enumerate(gens):
                x_blk[r, :width], z_blk[r, :width] = pauli.sample_uniform_block(
                    gen, n_qubits, width
                )
            for c in range(width):
                stepper.step_masks(x_blk[:, c], z_blk[:, c])
                if (base + c + 1) % record_stride == 0:
                    fids.append(stepper.fidelities())
    else:
        iters = [
            frame_iter(spec, n_steps, run_rng(master_seed, r), n_qubits)
            for r in range(n_runs)
        ]
        for j in range(n_steps):
            stepper.step([next(it) for it in iters])
            if (j + 1) % record_stride == 0:
                fids.append(stepper.fidelities())
    return np.stack(fids, axis=1)


def _batched_embedded_cycles(
    cycle: DecouplingCycle,
    cache: PropagatorCache,
    psi0: np.ndarray,
    n_cycles: int,
    cycles_per_record: int,
    n_runs: int,
    master_seed: int,
) -> np.ndarray:
    stepper = _BlockStepper(cache.cycle_unitary.matrix, psi0, n_runs)
    gens = [run_rng(master_seed, r) for r in range(n_runs)]
    n = cycle.n_qubits
    fids = [np.ones(n_runs)]
    x_blk = np.empty((n_runs, _DRAW_CHUNK), dtype=np.int64)
    z_blk = np.empty_like(x_blk)
    for base in range(0, n_cycles, _DRAW_CHUNK):
        width = min(_DRAW_CHUNK, n_cycles - base)
        for r, gen in enumerate(gens):
            x_blk[r, :width], z_blk[r, :width] = pauli.sample_uniform_block(
                gen, n, width
            )
        for c in range(width):
            stepper.step_masks(x_blk[:, c], z_blk[:, c])
            if (base + c + 1) % cycles_per_record == 0:
                fids.append(stepper.fidelities())
    return np.stack(fids, axis=1)


def monte_carlo(
    h0: PauliSumHamiltonian,
    spec: SchemeSpec,
    psi0: np.ndarray,
    n_steps: int,
    record_stride: int,
    n_runs: int,
    master_seed: int,
    cache: Optional[PropagatorCache] = None,
) -> FidelityTrace:
    """Mean and standard error of the per-run fidelity at each recorded time.

    Deterministic schemes collapse to a single run (reported with n_runs = 1
    and zero standard error), so the mean equals the run exactly.  The
    embedded scheme uses the per-cycle fast path whenever the recording
    stride is a whole number of cycles.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be positive, got {n_runs}")
    if n_steps < 1 or record_stride < 1 or n_steps % record_stride:
        raise ValueError("record_stride must be positive and divide n_steps")
    if spec.deterministic:
        return evolve(h0, spec, psi0, n_steps, record_stride, None, cache)

    need_cycle = spec.kind == "embedded"
    if cache is None or (need_cycle and cache.cycle_unitary is None):
        cache = build_cache(h0, spec.pulse_interval, spec.cycle if need_cycle else None)
    psi0 = _check_state(psi0, cache.step_unitary.dim)

    if need_cycle and record_stride % spec.cycle.n_frames == 0 and n_steps % spec.cycle.n_frames == 0:
        per_run = _batched_embedded_cycles(
            spec.cycle,
            cache,
            psi0,
            n_steps // spec.cycle.n_frames,
            record_stride // spec.cycle.n_frames,
            n_runs,
            master_seed,
        )
    else:
        per_run = _batched_stochastic(
            spec, cache, psi0, n_steps, record_stride, n_runs, master_seed, h0.n_qubits
        )

    mean = per_run.mean(axis=0)
    if n_runs > 1:
        err = per_run.std(axis=0, ddof=1) / np.sqrt(n_runs)
    else:
        err = np.zeros_like(mean)
    times = np.arange(0, n_steps + 1, record_stride, dtype=float) * spec.pulse_interval
    return FidelityTrace(times, mean, err, n_runs)


TRACE_HEADER = "time_tau,mean_fidelity,std_error,n_runs"


def write_trace(path, trace: FidelityTrace, pulse_interval: float = 1.0) -> None:
    """Trace CSV with times in units of the pulse interval, 17 significant
    digits, byte-deterministic."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(TRACE_HEADER + "\n")
        for t, f, e in zip(trace.times, trace.mean_fidelity, trace.std_error):
            fh.write(f"{t / pulse_interval:.17g},{f:.17g},{e:.17g},{trace.n_runs}\n")


def read_trace(path) -> FidelityTrace:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != TRACE_HEADER:
            raise ValueError(f"unexpected trace header {header!r}")
        rows = [line.split(",") for line in fh if line.strip()]
    if not rows:
        raise ValueError(f"trace file {path} has no data rows")
    data = np.array([[float(x) for x in row[:3]] for row in rows])
    return FidelityTrace(data[:, 0], data[:, 1], data[:, 2], int(rows[0][3]))
