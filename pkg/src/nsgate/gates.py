"""Post-selected nonlinear-sign (NS) gates.

An NS gate maps a signal mode state a|0> + b|1> + c|2> to a|0> + b|1> - c|2>,
conditioned on detecting the single ancilla photon back in its input mode and
nothing in the second ancilla mode. Both designs below realize the transform
exactly at their nominal parameters with heralding probability 1/4,
independent of the input.

Two designs are provided:

* KLM: the signal meets only the middle beam splitter; the first and third
  splitters act on the ancilla pair. The classic eta values are intensity
  parameters, so the mixing angles are theta1 = arccos(sqrt(eta1)) = pi/8 and
  theta2 = arccos(-sqrt(eta2)); theta3 = -theta1 on the reversed mode pair,
  which keeps the first/third success-probability curves exact mirror images.
  The heralded map is -1/2 times the NS transform (a global phase).

* Reverse: the signal meets the first and third splitters (angles xi1 =
  arctan(chi1), xi3 = -xi1) and the middle splitter mixes the ancilla pair
  (xi2 = pi + arctan(chi2)). The heralded map is +1/2 times the NS transform.

Each gate carries five phase shifters, nominally zero: two on the ancilla
inputs (provably inert: a global phase on the single-photon mode, the
identity on the vacuum mode) and three on interior segments between the beam
splitters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .elements import BeamSplitter, Circuit, PhaseShifter, apply_circuit, circuit_unitary
from .fock import FockBasis, StateVector, enumerate_basis, tensor_signal_ancilla

SIGNAL_DIM = 3
MODE_COUNT = 3
CUTOFF = 3

PARAMETER_IDS = ("angle1", "angle2", "angle3",
                 "phase1", "phase2", "phase3", "phase4", "phase5")


class NSGateKind(str, Enum):
    KLM = "klm"
    REVERSE = "reverse"


@dataclass(frozen=True)
class GateConstants:
    """Design constants of the two gates.

    eta1 and eta2 are intensity (cos^2) parameters of the KLM splitters;
    chi1 and chi2 are amplitude tangent parameters of the Reverse splitters.
    """

    eta1: float = 1.0 / (4.0 - 2.0 * math.sqrt(2.0))
    eta2: float = 3.0 - 2.0 * math.sqrt(2.0)
    chi1: float = 8.0 ** 0.25
    chi2: float = math.sqrt(16.0 * math.sqrt(2.0) - 13.0) / 7.0


CONSTANTS = GateConstants()


def klm_angles() -> tuple[float, float, float]:
    """(theta1, theta2, theta3) with theta1 = pi/8 and theta3 = -theta1."""
    theta1 = math.acos(math.sqrt(CONSTANTS.eta1))
    theta2 = math.acos(-math.sqrt(CONSTANTS.eta2))
    return theta1, theta2, -theta1


def reverse_angles() -> tuple[float, float, float]:
    """(xi1, xi2, xi3) with xi2 = pi + arctan(chi2) and xi3 = -xi1."""
    xi1 = math.atan(CONSTANTS.chi1)
    xi2 = math.pi + math.atan(CONSTANTS.chi2)
    return xi1, xi2, -xi1


@lru_cache(maxsize=None)
def klm_circuit() -> Circuit:
    """KLM NS gate: splitters on (1,2), (0,1), (2,1); five zero phases."""
    t1, t2, t3 = klm_angles()
    return Circuit(
        name="klm",
        mode_count=MODE_COUNT,
        cutoff=CUTOFF,
        elements=(
            PhaseShifter(1, 0.0, "phase1"),
            PhaseShifter(2, 0.0, "phase2"),
            BeamSplitter((1, 2), t1, "angle1"),
            PhaseShifter(1, 0.0, "phase3"),
            BeamSplitter((0, 1), t2, "angle2"),
            PhaseShifter(1, 0.0, "phase4"),
            PhaseShifter(2, 0.0, "phase5"),
            BeamSplitter((2, 1), t3, "angle3"),
        ),
        parameter_ids=PARAMETER_IDS,
    )


@lru_cache(maxsize=None)
def reverse_circuit() -> Circuit:
    """Reverse NS gate: splitters on (0,1), (1,2), (0,1); five zero phases."""
    x1, x2, x3 = reverse_angles()
    return Circuit(
        name="reverse",
        mode_count=MODE_COUNT,
        cutoff=CUTOFF,
        elements=(
            PhaseShifter(1, 0.0, "phase1"),
            PhaseShifter(2, 0.0, "phase2"),
            BeamSplitter((0, 1), x1, "angle1"),
            PhaseShifter(1, 0.0, "phase3"),
            BeamSplitter((1, 2), x2, "angle2"),
            PhaseShifter(1, 0.0, "phase4"),
            PhaseShifter(0, 0.0, "phase5"),
            BeamSplitter((0, 1), x3, "angle3"),
        ),
        parameter_ids=PARAMETER_IDS,
    )


def circuit_for(gate) -> Circuit:
    """Resolve a gate argument: an NSGateKind, its string value, or a Circuit."""
    if isinstance(gate, Circuit):
        return gate
    kind = NSGateKind(gate)
    return klm_circuit() if kind is NSGateKind.KLM else reverse_circuit()


def ideal_ns_target(signal) -> np.ndarray:
    """The exact NS image (a, b, -c) of a signal (a, b, c)."""
    sig = np.asarray(signal, dtype=complex)
    if sig.shape != (SIGNAL_DIM,):
        raise ValueError(f"signal must have shape ({SIGNAL_DIM},), got {sig.shape}")
    out = sig.copy()
    out[2] = -out[2]
    return out


@dataclass
class ConditionalOutcome:
    """Heralded signal-mode output.

    ``amplitudes`` are the raw (unnormalized) coefficients of 0, 1, 2 signal
    photons; ``probability`` is their squared norm, the heralding
    probability. ``output`` is the normalized conditional state, or None when
    the herald never fires.
    """

    amplitudes: np.ndarray
    probability: float

    @property
    def heralded(self) -> bool:
        return self.probability > 0.0

    @property
    def output(self) -> np.ndarray | None:
        if not self.heralded:
            return None
        return self.amplitudes / math.sqrt(self.probability)


def post_select(state: StateVector, herald: tuple[int, ...] = (1, 0),
                herald_modes: tuple[int, ...] = (1, 2)) -> ConditionalOutcome:
    """Project onto a detector pattern on the ancilla modes.

    Returns the signal-mode coefficients c_n for every occupation (n, *herald)
    present in the basis, and the heralding probability sum |c_n|^2.
    """
    basis = state.basis
    n_max = basis.cutoff - sum(herald)
    if set(herald_modes) | {0} != set(range(basis.mode_count)):
        raise ValueError(f"herald modes {herald_modes} must cover all non-signal modes")
    amps = np.empty(n_max + 1, dtype=complex)
    occ = [0] * basis.mode_count
    for m, h in zip(herald_modes, herald):
        occ[m] = h
    for n in range(n_max + 1):
        occ[0] = n
        amps[n] = state.amplitudes[basis.index_of(tuple(occ))]
    prob = float(np.sum(np.abs(amps) ** 2))
    return ConditionalOutcome(amplitudes=amps, probability=prob)


def _check_signal(signal) -> np.ndarray:
    sig = np.asarray(signal, dtype=complex)
    if sig.shape != (SIGNAL_DIM,):
        raise ValueError(f"signal must have shape ({SIGNAL_DIM},), got {sig.shape}")
    n = np.linalg.norm(sig)
    if abs(n - 1.0) > 1e-8:
        raise ValueError(f"signal must be normalized, got norm {n}")
    return sig


def apply_ns(gate, deviations, signal) -> ConditionalOutcome:
    """Run a normalized signal through the gate and herald on the ancilla.

    Full state-vector route: tensor with the ancilla, propagate through every
    element, project on the detector pattern.
    """
    circuit = circuit_for(gate)
    sig = _check_signal(signal)
    state = tensor_signal_ancilla(sig, circuit.basis(), circuit.ancilla)
    out = apply_circuit(circuit, deviations, state)
    res = post_select(out, circuit.herald, circuit.ancilla_modes)
    return ConditionalOutcome(res.amplitudes[:SIGNAL_DIM], res.probability)


def conditional_map(gate, deviations=None) -> np.ndarray:
    """3x3 matrix L with raw heralded coefficients = L @ (a, b, c).

    The heralded map is linear in the signal amplitudes, so a single circuit
    unitary gives the whole map; column k is the heralded output for a signal
    of k photons. Agrees with apply_ns column by column.
    """
    circuit = circuit_for(gate)
    basis = circuit.basis()
    u = circuit_unitary(circuit, deviations)
    occ_in, occ_out = [0] * basis.mode_count, [0] * basis.mode_count
    for m, a, h in zip(circuit.ancilla_modes, circuit.ancilla, circuit.herald):
        occ_in[m], occ_out[m] = a, h
    rows, cols = [], []
    for n in range(SIGNAL_DIM):
        occ_out[0] = occ_in[0] = n
        rows.append(basis.index_of(tuple(occ_out)))
        cols.append(basis.index_of(tuple(occ_in)))
    return u[np.ix_(rows, cols)]
