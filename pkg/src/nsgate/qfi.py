"""Per-component sensitivity from generator variances.

The quantum Fisher information for a small deviation of one circuit
component is bounded by the variance of that component's generator in the
state entering it. For each component c this module reports the variance
(Delta G_c)^2 averaged over Haar-random signal inputs in three flavors:

* weighted: mean of p_Psi * (Delta G_c)^2, with p_Psi the full circuit's
  heralding probability for that input (at zero deviations p_Psi = 1/4 for
  every input, so weighted = mean_variance / 4 there);
* mean_variance: the unweighted mean;
* max_variance: the largest sampled variance among heraldable inputs, a
  lower bound for the variance attainable by an optimal conditional input.

Values are variances, not Fisher informations; multiply by 4 for the
pure-state QFI bound.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .elements import apply_circuit, circuit_unitary, generator_of
from .fidelity import HERALD_EPS, SeededRng, haar_states
from .fock import StateVector, tensor_signal_ancilla
from .gates import circuit_for, conditional_map


@dataclass
class ComponentSensitivity:
    gate: str
    component: str
    component_index: int
    weighted: float
    mean_variance: float
    max_variance: float
    n_samples: int


def _check_index(circuit, component_index: int):
    if not 0 <= component_index < len(circuit.elements):
        raise ValueError(
            f"component_index {component_index} outside 0..{len(circuit.elements) - 1}")


def _head(circuit, component_index: int):
    """Circuit truncated to the elements before the component."""
    return replace(circuit, elements=circuit.elements[:component_index])


def conditional_state_before(gate, deviations, component_index: int,
                             signal) -> StateVector:
    """State entering component ``component_index``, no post-selection.

    Propagates signal tensor ancilla through every earlier element; the
    result stays normalized because the elements are unitary.
    """
    circuit = circuit_for(gate)
    _check_index(circuit, component_index)
    sig = np.asarray(signal, dtype=complex)
    state = tensor_signal_ancilla(sig / np.linalg.norm(sig), circuit.basis(),
                                  circuit.ancilla)
    return apply_circuit(_head(circuit, component_index), deviations, state)


def generator_variance(state: StateVector, generator: np.ndarray) -> float:
    """<G^2> - <G>^2 for a normalized state and Hermitian G."""
    psi = state.amplitudes
    gpsi = generator @ psi
    mean = float(np.real(np.vdot(psi, gpsi)))
    second = float(np.real(np.vdot(gpsi, gpsi)))
    return second - mean * mean


def component_name(circuit, component_index: int) -> str:
    el = circuit.elements[component_index]
    return el.param if el.param is not None else f"element{component_index}"


def weighted_sensitivity(gate, component_index: int, n_samples: int,
                         seed: SeededRng) -> ComponentSensitivity:
    """Haar-averaged generator variance of one component at zero deviations."""
    circuit = circuit_for(gate)
    _check_index(circuit, component_index)
    basis = circuit.basis()
    gen = generator_of(circuit.elements[component_index], basis)
    cmap = conditional_map(circuit)
    psis = haar_states(seed, n_samples)

    # batch the embedded inputs and propagate up to the component
    u_head = circuit_unitary(_head(circuit, component_index))
    states = np.zeros((basis.dim, n_samples), dtype=complex)
    occ = [0] * basis.mode_count
    for m, a in zip(circuit.ancilla_modes, circuit.ancilla):
        occ[m] = a
    for n in range(3):
        occ[0] = n
        states[basis.index_of(tuple(occ))] = psis[:, n]
    pre = u_head @ states

    gpre = gen @ pre
    mean_g = np.real(np.einsum("ij,ij->j", np.conj(pre), gpre))
    second = np.real(np.einsum("ij,ij->j", np.conj(gpre), gpre))
    variances = second - mean_g ** 2

    raw = cmap @ psis.T
    probs = np.sum(np.abs(raw) ** 2, axis=0)
    heraldable = probs >= HERALD_EPS
    max_var = float(variances[heraldable].max()) if heraldable.any() else float("nan")
    return ComponentSensitivity(
        gate=circuit.name,
        component=component_name(circuit, component_index),
        component_index=component_index,
        weighted=float(np.mean(probs * variances)),
        mean_variance=float(np.mean(variances)),
        max_variance=max_var,
        n_samples=n_samples,
    )


def all_components(gate, n_samples: int, seed: SeededRng) -> list[ComponentSensitivity]:
    """Sensitivities for every element, one derived stream per component."""
    circuit = circuit_for(gate)
    return [weighted_sensitivity(circuit, i, n_samples, seed.derive(i))
            for i in range(len(circuit.elements))]
