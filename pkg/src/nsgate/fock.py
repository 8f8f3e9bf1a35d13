"""Truncated Fock space for few-mode optical circuits.

The basis is graded by total photon number and ordered lexicographically
within each grade. This ordering is deterministic and other modules (and
serialized outputs) rely on it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class FockBasis:
    """Number-state basis for ``mode_count`` modes with a total-photon cutoff.

    States are tuples of occupation numbers. The basis contains every state
    with total photon number from 0 through ``cutoff``, so a passive circuit
    (which conserves photon number) never leaks amplitude out of it.
    """

    def __init__(self, mode_count: int, cutoff: int):
        if mode_count < 1:
            raise ValueError(f"mode_count must be >= 1, got {mode_count}")
        if cutoff < 0:
            raise ValueError(f"cutoff must be >= 0, got {cutoff}")
        states = []
        for total in range(cutoff + 1):
            grade = [occ for occ in itertools.product(range(total + 1), repeat=mode_count)
                     if sum(occ) == total]
            grade.sort()
            states.extend(grade)
        self.mode_count = mode_count
        self.cutoff = cutoff
        self.states: tuple[tuple[int, ...], ...] = tuple(states)
        self.index: dict[tuple[int, ...], int] = {s: i for i, s in enumerate(states)}
        occ = np.array(states, dtype=np.int64)
        occ.flags.writeable = False
        self.occupations = occ

    @property
    def dim(self) -> int:
        return len(self.states)

    def index_of(self, occupation) -> int:
        """Index of an occupation tuple; raises KeyError if out of basis."""
        key = tuple(int(n) for n in occupation)
        if len(key) != self.mode_count or any(n < 0 for n in key):
            raise KeyError(f"invalid occupation {occupation!r} for {self!r}")
        return self.index[key]

    def __eq__(self, other):
        return (isinstance(other, FockBasis)
                and other.mode_count == self.mode_count
                and other.cutoff == self.cutoff)

    def __hash__(self):
        return hash((self.mode_count, self.cutoff))

    def __repr__(self):
        return f"FockBasis(mode_count={self.mode_count}, cutoff={self.cutoff})"


@lru_cache(maxsize=None)
def enumerate_basis(mode_count: int, cutoff: int) -> FockBasis:
    """Shared, cached basis instance for the given shape."""
    return FockBasis(mode_count, cutoff)


@dataclass
class StateVector:
    """Complex amplitude vector tagged with its basis."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected ({self.basis.dim},)")
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.basis, self.amplitudes / n)

    def amplitude(self, occupation) -> complex:
        return complex(self.amplitudes[self.basis.index_of(occupation)])


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.basis != b.basis:
        raise ValueError(f"basis mismatch: {a.basis!r} vs {b.basis!r}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def basis_state(basis: FockBasis, occupation) -> StateVector:
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index_of(occupation)] = 1.0
    return StateVector(basis, amps)


def tensor_signal_ancilla(signal, basis: FockBasis,
                          ancilla: tuple[int, ...] = (1, 0)) -> StateVector:
    """Embed a single-mode signal (amplitudes for 0,1,2 photons in mode 0)
    alongside a fixed ancilla occupation of the remaining modes.

    The basis cutoff must accommodate the largest signal component plus the
    ancilla photons.
    """
    sig = np.asarray(signal, dtype=complex)
    if sig.ndim != 1 or sig.shape[0] < 1:
        raise ValueError(f"signal must be a 1-d amplitude vector, got shape {sig.shape}")
    if basis.mode_count != 1 + len(ancilla):
        raise ValueError(
            f"basis has {basis.mode_count} modes, need {1 + len(ancilla)} "
            f"for signal plus ancilla {ancilla}")
    top = (sig.shape[0] - 1) + sum(ancilla)
    if top > basis.cutoff:
        raise ValueError(
            f"cutoff {basis.cutoff} too small: signal photon number "
            f"{sig.shape[0] - 1} plus ancilla {ancilla} needs {top}")
    amps = np.zeros(basis.dim, dtype=complex)
    for n, a in enumerate(sig):
        amps[basis.index_of((n, *ancilla))] = a
    return StateVector(basis, amps)
