"""Sampling, Monte Carlo fidelity estimation, and the quadrature oracle.

A circuit with one extra phase shifter on the signal input has a closed-form
Haar-averaged fidelity, 1/2 + cos(phi)/3 + cos(2*phi)/6, which pins down both
the estimator and the quadrature independently of the gate designs.
"""

import math

import numpy as np
import pytest

from nsgate.elements import BeamSplitter, Circuit, PhaseShifter
from nsgate.fidelity import (HERALD_EPS, SeededRng, gate_fidelity_mc,
                             haar_average_fidelity, haar_states, state_fidelity)
from nsgate.gates import klm_circuit


def klm_with_signal_phase() -> Circuit:
    base = klm_circuit()
    return Circuit(name="klm-signal-phase", mode_count=3, cutoff=3,
                   elements=(PhaseShifter(mode=0, phi=0.0, param="sig"),)
                   + base.elements,
                   parameter_ids=("sig",) + base.parameter_ids)


def dephasing_mean_fidelity(phi: float) -> float:
    return 0.5 + math.cos(phi) / 3.0 + math.cos(2.0 * phi) / 6.0


def test_seeded_rng_is_reproducible():
    a = SeededRng(42).generator().standard_normal(8)
    b = SeededRng(42).generator().standard_normal(8)
    assert np.array_equal(a, b)
    c = SeededRng(43).generator().standard_normal(8)
    assert not np.array_equal(a, c)


def test_seeded_rng_streams_are_independent_and_composable():
    root = SeededRng(7)
    s12 = root.derive(1, 2).generator().standard_normal(6)
    s12b = root.derive(1).derive(2).generator().standard_normal(6)
    assert np.array_equal(s12, s12b)
    s21 = root.derive(2, 1).generator().standard_normal(6)
    assert not np.array_equal(s12, s21)
    assert not np.array_equal(s12, root.generator().standard_normal(6))


def test_haar_states_normalized_and_uniform_moment():
    psis = haar_states(SeededRng(3), 100_000)
    assert psis.shape == (100_000, 3)
    norms = np.linalg.norm(psis, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-12
    # first-component intensity averages 1/3 for Haar states
    moment = float(np.mean(np.abs(psis[:, 0]) ** 2))
    assert abs(moment - 1.0 / 3.0) < 0.005


def test_haar_states_accepts_generator_directly():
    a = haar_states(SeededRng(3), 10)
    b = haar_states(SeededRng(3).generator(), 10)
    assert np.array_equal(a, b)


def test_haar_distribution_is_rotation_invariant():
    # statistics of f(V psi) match statistics of f(psi) for fixed unitary V
    rng = np.random.default_rng(77)
    v, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    psis = haar_states(SeededRng(78), 40_000)
    rotated = psis @ v.T
    for batch in (psis, rotated):
        assert np.max(np.abs(np.linalg.norm(batch, axis=1) - 1.0)) < 1e-12
    m_plain = np.mean(np.abs(psis) ** 2, axis=0)
    m_rot = np.mean(np.abs(rotated) ** 2, axis=0)
    assert np.max(np.abs(m_plain - m_rot)) < 0.01
    q_plain = float(np.mean(np.abs(psis[:, 0]) ** 4))
    q_rot = float(np.mean(np.abs(rotated[:, 0]) ** 4))
    assert abs(q_plain - q_rot) < 0.01  # both near 1/6


def test_state_fidelity_limits():
    e0 = np.array([1.0, 0.0, 0.0])
    e1 = np.array([0.0, 1.0, 0.0])
    assert abs(state_fidelity(e0, e0) - 1.0) < 1e-15
    assert state_fidelity(e0, e1) < 1e-15
    plus = (e0 + e1) / math.sqrt(2.0)
    assert abs(state_fidelity(e0, plus) - 0.5) < 1e-12
    # global phase does not matter
    assert abs(state_fidelity(e0, np.exp(0.7j) * e0) - 1.0) < 1e-12


def test_nominal_estimate_is_exact():
    est = gate_fidelity_mc("klm", None, 2_000, SeededRng(0))
    assert abs(est.mean - 1.0) < 1e-12
    assert est.n_samples == 2_000
    assert est.n_excluded == 0
    assert abs(est.mean_success_prob - 0.25) < 1e-12
    assert est.std_error < 1e-12


@pytest.mark.parametrize("phi", [0.4, math.pi / 2, 2 * math.pi / 3, math.pi, 1.9])
def test_quadrature_matches_dephasing_closed_form(phi):
    circuit = klm_with_signal_phase()
    dev = np.zeros(9)
    dev[circuit.parameter_index("sig")] = phi
    got = haar_average_fidelity(circuit, dev)
    assert abs(got - dephasing_mean_fidelity(phi)) < 5e-6


def test_estimator_matches_dephasing_closed_form():
    circuit = klm_with_signal_phase()
    phi = 2.0
    dev = np.zeros(9)
    dev[circuit.parameter_index("sig")] = phi
    est = gate_fidelity_mc(circuit, dev, 20_000, SeededRng(12))
    want = dephasing_mean_fidelity(phi)
    assert abs(est.mean - want) < 5 * est.std_error
    assert abs(est.mean_success_prob - 0.25) < 1e-12  # phase cannot change p


def test_estimator_matches_quadrature_on_gate_errors():
    dev = np.zeros(8)
    dev[klm_circuit().parameter_index("angle2")] = 0.3
    est = gate_fidelity_mc("klm", dev, 50_000, SeededRng(21))
    oracle = haar_average_fidelity("klm", dev)
    assert abs(est.mean - oracle) < 5 * est.std_error
    assert est.std_error < 0.005


def test_quadrature_node_convergence():
    dev = np.zeros(8)
    dev[klm_circuit().parameter_index("angle2")] = 0.2
    coarse = haar_average_fidelity("klm", dev, n_radial=32, n_phase=16)
    fine = haar_average_fidelity("klm", dev, n_radial=64, n_phase=32)
    assert abs(coarse - fine) < 5e-6


def test_quadrature_nominal_is_one():
    for gate in ("klm", "reverse"):
        assert abs(haar_average_fidelity(gate) - 1.0) < 1e-9


def test_all_samples_excluded_yields_nan():
    # one splitter at pi/2 routes the ancilla photon away from the herald
    detour = Circuit(name="detour", mode_count=3, cutoff=3,
                     elements=(BeamSplitter(modes=(1, 2), theta=math.pi / 2),),
                     parameter_ids=())
    est = gate_fidelity_mc(detour, None, 500, SeededRng(1))
    assert math.isnan(est.mean)
    assert math.isnan(est.std_error)
    assert est.n_excluded == 500
    assert est.mean_success_prob == 0.0


def test_min_prob_threshold_is_tiny():
    assert HERALD_EPS <= 1e-12


def test_estimator_rejects_zero_samples():
    with pytest.raises(ValueError):
        gate_fidelity_mc("klm", None, 0, SeededRng(0))
