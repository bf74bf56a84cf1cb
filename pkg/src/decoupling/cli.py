"""Configuration-driven experiment orchestration.

Subcommands:
    run          --config FILE --out DIR    traces + scalars for each scheme
    verify-cycle --cycle FILE [--locality K]   first-order decoupling check
    bounds       --config FILE --out FILE   bound/approximation curves

A single JSON document configures an experiment; every field has a
documented default (see README).  The whole experiment is reproducible from
master_seed: the disorder draw uses spawn-key domain 0 and run r of the
Monte Carlo uses domain (1, r), so fixing disorder_seed varies the control
randomness while pinning the Hamiltonian.  The environment variable
DECOUPLING_WORKERS caps the threads used by the dense linear algebra.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis, engine, model, schemes
from .engine import PropagatorCache
from .linalg import BranchAmbiguityError, spectral_norm
from .model import (
    DEFAULT_COUPLING_BOUND,
    CouplingGraph,
    PauliSumHamiltonian,
    build_hamiltonian,
    energy_uncertainty,
    format_hamiltonian,
    grid_graph,
    initial_coherent_state,
    sample_params,
)
from .pauli import PauliString
from .schemes import DecouplingCycle, SchemeSpec, cycle_from_array, construct_oa

DISORDER_STREAM_DOMAIN = 0

_DEFAULT_N_STEPS = 1024


@dataclass(frozen=True)
class SchemeConfig:
    kind: str
    n_steps: int
    record_stride: Optional[int]  # None -> per-kind default


@dataclass(frozen=True)
class ExperimentConfig:
    n_qubits: int
    graph: CouplingGraph
    coupling_bound: float
    delta_mode: str
    pulse_interval: float
    schemes: tuple[SchemeConfig, ...]
    n_runs: int
    master_seed: int
    disorder_seed: Optional[int] = None
    cycle_file: Optional[str] = None
    output_dir: Optional[str] = None

    def __post_init__(self):
        if not 1 <= self.n_qubits <= model.MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{model.MAX_QUBITS}")
        if self.n_qubits != self.graph.n_qubits:
            raise ValueError("graph size does not match n_qubits")
        if self.n_runs < 1:
            raise ValueError("n_runs must be at least 1")
        if self.coupling_bound < 0:
            raise ValueError("coupling_bound must be nonnegative")


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    known = {
        "n_qubits", "rows", "cols", "edges", "coupling_bound", "delta_mode",
        "pulse_interval", "schemes", "n_steps", "record_stride", "n_runs",
        "master_seed", "disorder_seed", "cycle_file", "output_dir",
    }
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    if "n_qubits" not in raw or "master_seed" not in raw:
        raise ValueError("config requires n_qubits and master_seed")
    n_qubits = int(raw["n_qubits"])
    if "edges" in raw:
        graph = CouplingGraph(n_qubits, tuple(tuple(e) for e in raw["edges"]))
    else:
        rows = int(raw.get("rows", 1))
        cols = int(raw.get("cols", n_qubits))
        if rows * cols != n_qubits:
            raise ValueError(f"rows*cols = {rows * cols} does not equal n_qubits")
        graph = grid_graph(rows, cols)
    default_steps = int(raw.get("n_steps", _DEFAULT_N_STEPS))
    default_stride = raw.get("record_stride")
    scheme_cfgs = []
    for entry in raw.get("schemes", ["free"]):
        if isinstance(entry, str):
            entry = {"kind": entry}
        kind = entry["kind"]
        if kind not in schemes.SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {kind!r}")
        stride = entry.get("record_stride", default_stride)
        scheme_cfgs.append(
            SchemeConfig(
                kind,
                int(entry.get("n_steps", default_steps)),
                None if stride is None else int(stride),
            )
        )
    if not scheme_cfgs:
        raise ValueError("config lists no schemes")
    return ExperimentConfig(
        n_qubits=n_qubits,
        graph=graph,
        coupling_bound=float(raw.get("coupling_bound", DEFAULT_COUPLING_BOUND)),
        delta_mode=raw.get("delta_mode", "sample"),
        pulse_interval=float(raw.get("pulse_interval", 1.0)),
        schemes=tuple(scheme_cfgs),
        n_runs=int(raw.get("n_runs", 200)),
        master_seed=int(raw["master_seed"]),
        disorder_seed=raw.get("disorder_seed"),
        cycle_file=raw.get("cycle_file"),
        output_dir=raw.get("output_dir"),
    )


def disorder_rng(config: ExperimentConfig) -> np.random.Generator:
    seed = config.master_seed if config.disorder_seed is None else config.disorder_seed
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(DISORDER_STREAM_DOMAIN,))
    )


def resolve_cycle(config: ExperimentConfig) -> DecouplingCycle:
    """Explicit cycle file if given, else the built-in strength-2 cycle
    restricted to the first n_qubits columns (n_qubits <= 9 only)."""
    if config.cycle_file is not None:
        return schemes.read_cycle(config.cycle_file, step=config.pulse_interval)
    if config.n_qubits > 9:
        raise ValueError("no built-in cycle beyond 9 qubits; provide cycle_file")
    array = construct_oa()
    sub = schemes.SymbolArray(array.q, array.entries[:, : config.n_qubits])
    return cycle_from_array(sub, step=config.pulse_interval)


def build_instance(config: ExperimentConfig) -> PauliSumHamiltonian:
    params = sample_params(
        disorder_rng(config), config.coupling_bound, config.graph, config.delta_mode
    )
    return build_hamiltonian(params, config.graph)


def _resolved_stride(cfg: SchemeConfig, cycle: DecouplingCycle) -> int:
    if cfg.record_stride is not None:
        return cfg.record_stride
    return cycle.n_frames if cfg.kind in ("bang_bang", "embedded") else 1


def _scalars(config, h0, cycle, cache: PropagatorCache, psi0) -> dict[str, object]:
    h0_norm = spectral_norm(model.to_dense(h0))
    delta_h0 = energy_uncertainty(h0, psi0)
    hbar_norm = spectral_norm(cache.residual)
    delta_hbar = energy_uncertainty(cache.residual, psi0)
    t_c = cycle.cycle_time
    dt = config.pulse_interval
    x = h0_norm * t_c
    try:
        norm_bound = analysis.residual_norm_bound(h0_norm, t_c)
    except analysis.BoundDomainError:
        norm_bound = math.nan
    return {
        "n_qubits": config.n_qubits,
        "n_runs": config.n_runs,
        "master_seed": config.master_seed,
        "disorder_seed": config.master_seed if config.disorder_seed is None else config.disorder_seed,
        "coupling_bound": config.coupling_bound,
        "pulse_interval": dt,
        "cycle_frames": cycle.n_frames,
        "cycle_time": t_c,
        "h0_norm": h0_norm,
        "delta_h0": delta_h0,
        "hbar_norm": hbar_norm,
        "delta_hbar": delta_hbar,
        "x_h0_tc": x,
        "residual_norm_bound": norm_bound,
        "parec_rate": analysis.parec_rate(delta_h0, dt),
        "embedded_rate": analysis.embedded_rate(delta_hbar, t_c),
    }


def write_scalars(path, scalars: dict[str, object]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("name,value\n")
        for key, value in scalars.items():
            text = f"{value:.17g}" if isinstance(value, float) else str(value)
            fh.write(f"{key},{text}\n")


def _bound_inputs(scalars: dict[str, object]) -> analysis.BoundInputs:
    return analysis.BoundInputs(
        h0_norm=scalars["h0_norm"],
        delta_h0=scalars["delta_h0"],
        hbar_norm=scalars["hbar_norm"],
        delta_hbar=scalars["delta_hbar"],
        t_c=scalars["cycle_time"],
        dt=scalars["pulse_interval"],
    )


def run_experiment(config: ExperimentConfig, out_dir: Path) -> dict[str, object]:
    """Run every configured scheme and write one trace CSV per scheme plus
    scalars.csv and the Hamiltonian export; returns the scalars."""
    out_dir.mkdir(parents=True, exist_ok=True)
    h0 = build_instance(config)
    cycle = resolve_cycle(config)
    cache = engine.build_cache(h0, config.pulse_interval, cycle, with_residual=True)
    psi0 = initial_coherent_state(config.n_qubits)
    for cfg in config.schemes:
        spec = SchemeSpec(
            cfg.kind,
            cycle if cfg.kind in ("bang_bang", "embedded") else None,
            config.pulse_interval,
        )
        trace = engine.monte_carlo(
            h0,
            spec,
            psi0,
            cfg.n_steps,
            _resolved_stride(cfg, cycle),
            config.n_runs,
            config.master_seed,
            cache,
        )
        engine.write_trace(out_dir / f"trace_{cfg.kind}.csv", trace, config.pulse_interval)
    scalars = _scalars(config, h0, cycle, cache, psi0)
    write_scalars(out_dir / "scalars.csv", scalars)
    (out_dir / "hamiltonian.txt").write_text(format_hamiltonian(h0), encoding="ascii")
    return scalars


def run_bounds(config: ExperimentConfig, out_path: Path) -> None:
    h0 = build_instance(config)
    cycle = resolve_cycle(config)
    cache = engine.build_cache(h0, config.pulse_interval, cycle, with_residual=True)
    psi0 = initial_coherent_state(config.n_qubits)
    scalars = _scalars(config, h0, cycle, cache, psi0)
    # surface the domain error before writing anything
    analysis.residual_norm_bound(scalars["h0_norm"], scalars["cycle_time"])
    max_steps = max(cfg.n_steps for cfg in config.schemes)
    stride = min(_resolved_stride(cfg, cycle) for cfg in config.schemes)
    times = np.arange(0, max_steps + 1, stride, dtype=float) * config.pulse_interval
    table = analysis.bounds_table(_bound_inputs(scalars), times)
    table["time_tau"] = times / config.pulse_interval
    analysis.write_bounds(out_path, table)


def _all_terms_up_to(n_qubits: int, locality: int):
    """Every Pauli string of weight 1..locality, in deterministic order."""
    single = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
    for weight in range(1, locality + 1):
        for qubits in itertools.combinations(range(n_qubits), weight):
            for symbols in itertools.product("XYZ", repeat=weight):
                x = z = 0
                for q, sym in zip(qubits, symbols):
                    xb, zb = single[sym]
                    x |= xb << q
                    z |= zb << q
                yield PauliString(n_qubits, x, z)


def verify_cycle_file(cycle_path, locality: int, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        cycle = schemes.read_cycle(cycle_path)
    except (OSError, ValueError) as exc:
        print(f"cannot parse cycle file: {exc}", file=out)
        return 2
    terms = tuple((1.0, t) for t in _all_terms_up_to(cycle.n_qubits, locality))
    residual = schemes.verify_decoupling(
        cycle, PauliSumHamiltonian(cycle.n_qubits, terms)
    )
    if residual.terms:
        coeff, term = residual.terms[0]
        print(f"not decoupled at locality {locality}: {term.to_label()} "
              f"(residual coefficient {coeff:g})", file=out)
        return 1
    print(f"cycle decouples all terms up to locality {locality}", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoupling",
        description="Exact simulator for deterministic, stochastic, and "
        "embedded dynamical decoupling on small qubit registers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run configured schemes, write CSVs")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_ver = sub.add_parser("verify-cycle", help="check first-order decoupling")
    p_ver.add_argument("--cycle", required=True)
    p_ver.add_argument("--locality", type=int, default=2)
    p_bounds = sub.add_parser("bounds", help="write bound/approximation curves")
    p_bounds.add_argument("--config", required=True)
    p_bounds.add_argument("--out", required=True)
    return parser


def _dispatch(args) -> int:
    if args.command == "verify-cycle":
        return verify_cycle_file(args.cycle, args.locality)
    try:
        config = load_config(args.config)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "run":
            scalars = run_experiment(config, Path(args.out))
            print(f"wrote traces for {len(config.schemes)} scheme(s) to {args.out} "
                  f"(|H0| = {scalars['h0_norm']:.3e}, |Hres| = {scalars['hbar_norm']:.3e})")
        else:
            run_bounds(config, Path(args.out))
            print(f"wrote bounds table to {args.out}")
    except BranchAmbiguityError as exc:
        print(f"residual extraction failed: {exc}", file=sys.stderr)
        return 1
    except analysis.BoundDomainError as exc:
        print(f"bound undefined: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    workers = os.environ.get("DECOUPLING_WORKERS")
    if workers:
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=int(workers)):
            return _dispatch(args)
    return _dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
