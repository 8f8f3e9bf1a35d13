"""Parameter sweeps and compound-error scans.

Sweeps perturb one parameter at a time over an inclusive evenly spaced grid
(the default symmetric ranges with odd point counts contain delta = 0
exactly). The compound scan draws error vectors uniformly from the sphere of
a given radius in parameter space and reports worst/best/mean infidelity.

Everything is deterministic: each grid point or (radius, vector) pair gets
its own derived RNG stream, so results do not depend on worker count or
scheduling. Worker processes recompute independent tasks; outputs are
reassembled in task order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .elements import Circuit
from .fidelity import HERALD_EPS, SeededRng, _fidelities, gate_fidelity_mc, haar_states
from .gates import circuit_for, conditional_map

DEFAULT_SWEEP_SIGNAL = np.ones(3) / math.sqrt(3.0)


def deviation_vector(gate, param: str, delta: float) -> np.ndarray:
    """All-zero deviation vector with one entry set."""
    circuit = circuit_for(gate)
    dev = np.zeros(circuit.n_parameters)
    dev[circuit.parameter_index(param)] = delta
    return dev


def sweep_grid(lo: float, hi: float, n_points: int) -> np.ndarray:
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    return np.linspace(lo, hi, n_points)


@dataclass
class SuccessRow:
    gate: str
    param: str
    delta: float
    success_prob: float


def sweep_success_probability(gate, param: str, lo: float, hi: float,
                              n_points: int, signal=None) -> list[SuccessRow]:
    """Heralding probability vs single-parameter deviation at a fixed input.

    Default input is the balanced signal (1,1,1)/sqrt(3). Deterministic:
    no sampling is involved.
    """
    circuit = circuit_for(gate)
    sig = np.asarray(DEFAULT_SWEEP_SIGNAL if signal is None else signal, dtype=complex)
    sig = sig / np.linalg.norm(sig)
    rows = []
    for delta in sweep_grid(lo, hi, n_points):
        cmap = conditional_map(circuit, deviation_vector(circuit, param, float(delta)))
        raw = cmap @ sig
        prob = float(np.real(np.vdot(raw, raw)))
        rows.append(SuccessRow(circuit.name, param, float(delta), prob))
    return rows


@dataclass
class SweepRow:
    gate: str
    param: str
    delta: float
    mean_fidelity: float
    std_error: float
    mean_success_prob: float
    n_samples: int


def _sweep_point(task) -> SweepRow:
    circuit, param, delta, n_samples, seed = task
    est = gate_fidelity_mc(circuit, deviation_vector(circuit, param, delta),
                           n_samples, seed)
    return SweepRow(circuit.name, param, delta, est.mean, est.std_error,
                    est.mean_success_prob, est.n_samples)


def _run_tasks(fn, tasks, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (workers * 4))
        return list(pool.map(fn, tasks, chunksize=chunk))


def sweep_fidelity(gate, param: str, lo: float, hi: float, n_points: int,
                   n_samples: int = 10_000, seed: SeededRng = SeededRng(0),
                   workers: int = 1) -> list[SweepRow]:
    """Haar-averaged fidelity vs single-parameter deviation.

    Grid point i draws from seed.derive(i); results are identical for any
    worker count.
    """
    circuit = circuit_for(gate)
    tasks = [(circuit, param, float(delta), n_samples, seed.derive(i))
             for i, delta in enumerate(sweep_grid(lo, hi, n_points))]
    return _run_tasks(_sweep_point, tasks, workers)


def sample_error_sphere(rng, radius: float, dim: int = 8) -> np.ndarray:
    """Uniform point on the sphere of the given radius in parameter space."""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    from .fidelity import _as_generator
    g = _as_generator(rng)
    z = g.standard_normal(dim)
    n = np.linalg.norm(z)
    while n < 1e-12:
        z = g.standard_normal(dim)
        n = np.linalg.norm(z)
    return z * (radius / n)


@dataclass
class CompoundRow:
    gate: str
    radius: float
    min_infid: float
    max_infid: float
    mean_infid: float
    n_vectors: int
    n_states: int


def _compound_chunk(task) -> np.ndarray:
    circuit, radius, r_index, j_start, j_end, n_states, seed = task
    out = np.empty(j_end - j_start)
    for j in range(j_start, j_end):
        rng = seed.derive(r_index, j).generator()
        dev = sample_error_sphere(rng, radius, circuit.n_parameters)
        cmap = conditional_map(circuit, dev)
        psis = haar_states(rng, n_states)
        fid, _, included = _fidelities(cmap, psis, HERALD_EPS)
        out[j - j_start] = 1.0 - fid[included].mean() if included.any() else np.nan
    return out


def compound_scan(gate, radii, n_vectors: int, n_states: int,
                  seed: SeededRng = SeededRng(0), workers: int = 1,
                  chunk_size: int = 64) -> list[CompoundRow]:
    """Worst/best/mean infidelity over random error vectors per radius.

    The (radius index, vector index) pair fixes the RNG stream for both the
    sphere point and that vector's Haar input states, so the scan is a pure
    function of (gate, radii, n_vectors, n_states, seed). Vectors whose
    samples are all unheraldable are dropped from the statistics.
    """
    circuit = circuit_for(gate)
    radii = [float(r) for r in radii]
    tasks = []
    for i, radius in enumerate(radii):
        for j0 in range(0, n_vectors, chunk_size):
            tasks.append((circuit, radius, i, j0, min(j0 + chunk_size, n_vectors),
                          n_states, seed))
    chunks = _run_tasks(_compound_chunk, tasks, workers)
    rows = []
    pos = 0
    for i, radius in enumerate(radii):
        parts = []
        for j0 in range(0, n_vectors, chunk_size):
            parts.append(chunks[pos])
            pos += 1
        infid = np.concatenate(parts)
        valid = infid[~np.isnan(infid)]
        if valid.size == 0:
            rows.append(CompoundRow(circuit.name, radius, math.nan, math.nan,
                                    math.nan, n_vectors, n_states))
        else:
            rows.append(CompoundRow(circuit.name, radius, float(valid.min()),
                                    float(valid.max()), float(valid.mean()),
                                    n_vectors, n_states))
    return rows
