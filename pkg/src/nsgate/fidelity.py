"""Haar-averaged gate fidelity: Monte Carlo estimator and quadrature oracle.

Per-sample fidelity is |<target|output>|^2 between the normalized heralded
output and the ideal NS image of the input, unweighted by the heralding
probability. Input states are drawn Haar-uniformly: three i.i.d. standard
complex normals, normalized.

Randomness is fully reproducible. SeededRng wraps a counter-based Philox bit
generator keyed by (seed, stream key); derived streams extend the key, so any
quantity is a pure function of its seed and stream regardless of scheduling
or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gates import conditional_map

HERALD_EPS = 1e-14


@dataclass(frozen=True)
class SeededRng:
    """Reproducible RNG identity: root seed plus a hierarchical stream key."""

    seed: int
    stream: tuple[int, ...] = ()

    def derive(self, *key: int) -> "SeededRng":
        """Child stream; identical (seed, stream) always yields identical draws."""
        return SeededRng(self.seed, self.stream + tuple(int(k) for k in key))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected SeededRng or numpy Generator, got {type(rng)!r}")


def haar_states(rng, n: int, dim: int = 3) -> np.ndarray:
    """(n, dim) array of Haar-uniform pure states.

    Each row: dim standard complex normals (real parts first in the draw
    order, then imaginary parts), normalized. A zero draw is redrawn.
    """
    g = _as_generator(rng)
    z = g.standard_normal((n, 2 * dim))
    psi = z[:, :dim] + 1j * z[:, dim:]
    norms = np.linalg.norm(psi, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        z = g.standard_normal((int(bad.sum()), 2 * dim))
        psi[bad] = z[:, :dim] + 1j * z[:, dim:]
        norms = np.linalg.norm(psi, axis=1)
    return psi / norms[:, None]


def state_fidelity(a, b) -> float:
    """|<a|b>|^2 for normalized pure states."""
    return float(np.abs(np.vdot(np.asarray(a), np.asarray(b))) ** 2)


@dataclass
class FidelityEstimate:
    """Monte Carlo estimate of the Haar-averaged gate fidelity.

    std_error is the sample standard deviation over included samples divided
    by sqrt(n_included). Samples whose heralding probability falls below the
    exclusion threshold are dropped from the mean and counted in n_excluded;
    if every sample is excluded the mean and std_error are NaN.
    """

    mean: float
    std_error: float
    mean_success_prob: float
    n_samples: int
    n_excluded: int


def _fidelities(cmap: np.ndarray, psis: np.ndarray,
                min_prob: float = HERALD_EPS) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-sample fidelity and heralding probability for a batch of signals."""
    raw = psis @ cmap.T
    prob = np.sum(np.abs(raw) ** 2, axis=1)
    target = psis.copy()
    target[:, 2] = -target[:, 2]
    overlap = np.abs(np.sum(np.conj(target) * raw, axis=1)) ** 2
    included = prob >= min_prob
    fid = np.full(psis.shape[0], np.nan)
    fid[included] = overlap[included] / prob[included]
    return fid, prob, included


def gate_fidelity_mc(gate, deviations, n_samples: int, seed: SeededRng,
                     min_prob: float = HERALD_EPS) -> FidelityEstimate:
    """Estimate the Haar-averaged gate fidelity by Monte Carlo.

    Deterministic in (gate, deviations, n_samples, seed); the sample set is
    drawn in one pass from the seed's stream.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    cmap = conditional_map(gate, deviations)
    psis = haar_states(seed, n_samples)
    fid, prob, included = _fidelities(cmap, psis, min_prob)
    n_inc = int(included.sum())
    if n_inc == 0:
        return FidelityEstimate(math.nan, math.nan, 0.0, n_samples, n_samples)
    f = fid[included]
    std_error = float(f.std(ddof=1) / math.sqrt(n_inc)) if n_inc > 1 else math.nan
    return FidelityEstimate(
        mean=float(f.mean()),
        std_error=std_error,
        mean_success_prob=float(prob[included].mean()),
        n_samples=n_samples,
        n_excluded=n_samples - n_inc,
    )


def haar_average_fidelity(gate, deviations=None, n_radial: int = 48,
                          n_phase: int = 24) -> float:
    """Deterministic quadrature for the Haar-averaged gate fidelity.

    Integrates over the state space directly: moduli-squared live uniformly
    on the simplex, reached from the unit square by the area-preserving map
    (x0, x1, x2) = (1 - sqrt(u), sqrt(u)(1 - v), sqrt(u) v), integrated with
    Gauss-Legendre nodes; the two relative phases are periodic and use the
    trapezoid rule. At the default resolution the result is accurate to a few
    parts in 1e6, far below Monte Carlo std errors at 1e4 samples, so this
    serves as a sampling-free oracle for the estimator.
    """
    cmap = conditional_map(gate, deviations)
    nodes, weights = np.polynomial.legendre.leggauss(n_radial)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    u, v = np.meshgrid(nodes, nodes, indexing="ij")
    w2 = np.outer(weights, weights)
    root = np.sqrt(u)
    x = np.stack([1.0 - root, root * (1.0 - v), root * v])
    moduli = np.sqrt(x)
    phases = 2.0 * np.pi * np.arange(n_phase) / n_phase
    total = 0.0
    for p1 in phases:
        for p2 in phases:
            psi = np.stack([
                moduli[0].astype(complex),
                moduli[1] * np.exp(1j * p1),
                moduli[2] * np.exp(1j * p2),
            ])
            raw = np.einsum("ij,jkl->ikl", cmap, psi)
            prob = np.sum(np.abs(raw) ** 2, axis=0)
            target = psi.copy()
            target[2] = -target[2]
            overlap = np.abs(np.sum(np.conj(target) * raw, axis=0)) ** 2
            total += float(np.sum(overlap / prob * w2))
    return total / n_phase ** 2
