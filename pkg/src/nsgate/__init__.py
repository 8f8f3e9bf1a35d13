"""Simulation and sensitivity analysis of post-selected nonlinear-sign gates.

Small linear-optical circuits on three modes are simulated in a truncated
Fock space. Two built-in three-splitter designs realize the nonlinear sign
flip on one signal mode with a single heralded ancilla photon; the rest of
the package measures how their fidelity and heralding probability respond
to errors in the splitter angles and path phases.
"""

__version__ = "0.1.0"

from .elements import (BeamSplitter, Circuit, PhaseShifter,
                       beam_splitter_unitary, circuit_unitary, format_circuit,
                       generator_of, parse_circuit, phase_unitary)
from .fidelity import (FidelityEstimate, SeededRng, gate_fidelity_mc,
                       haar_average_fidelity, haar_states, state_fidelity)
from .fock import (FockBasis, StateVector, basis_state, enumerate_basis,
                   inner_product, tensor_signal_ancilla)
from .gates import (CONSTANTS, NSGateKind, apply_ns, circuit_for,
                    conditional_map, ideal_ns_target, klm_circuit,
                    post_select, reverse_circuit)
from .qfi import (ComponentSensitivity, all_components,
                  conditional_state_before, generator_variance,
                  weighted_sensitivity)
from .sensitivity import (CompoundRow, SweepRow, SuccessRow, compound_scan,
                          deviation_vector, sample_error_sphere, sweep_fidelity,
                          sweep_grid, sweep_success_probability)

__all__ = [
    "__version__",
    "BeamSplitter", "Circuit", "PhaseShifter", "beam_splitter_unitary",
    "circuit_unitary", "format_circuit", "generator_of", "parse_circuit",
    "phase_unitary",
    "FidelityEstimate", "SeededRng", "gate_fidelity_mc",
    "haar_average_fidelity", "haar_states", "state_fidelity",
    "FockBasis", "StateVector", "basis_state", "enumerate_basis",
    "inner_product", "tensor_signal_ancilla",
    "CONSTANTS", "NSGateKind", "apply_ns", "circuit_for", "conditional_map",
    "ideal_ns_target", "klm_circuit", "post_select", "reverse_circuit",
    "ComponentSensitivity", "all_components", "conditional_state_before",
    "generator_variance", "weighted_sensitivity",
    "CompoundRow", "SweepRow", "SuccessRow", "compound_scan",
    "deviation_vector", "sample_error_sphere", "sweep_fidelity", "sweep_grid",
    "sweep_success_probability",
]
