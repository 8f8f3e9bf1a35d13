"""Acceptance gate: nine criteria, one printed PASS/FAIL line each.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines. Each
test prints its verdict with the measured numbers and then asserts, so a
plain ``pytest`` run enforces the same gate.
"""

import math
import time

import numpy as np

from nsgate.cli import main
from nsgate.elements import (BeamSplitter, PhaseShifter, beam_splitter_unitary,
                             circuit_unitary, generator_of, phase_unitary)
from nsgate.fidelity import (SeededRng, gate_fidelity_mc, haar_average_fidelity,
                             haar_states, state_fidelity)
from nsgate.fock import StateVector, basis_state, enumerate_basis
from nsgate.gates import (NSGateKind, apply_ns, ideal_ns_target, klm_circuit,
                          reverse_circuit)
from nsgate.qfi import generator_variance, weighted_sensitivity
from nsgate.sensitivity import (compound_scan, deviation_vector,
                                sample_error_sphere, sweep_fidelity,
                                sweep_success_probability)

GATES = (NSGateKind.KLM, NSGateKind.REVERSE)
BASIS = enumerate_basis(3, 3)


def _report(num: int, desc: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {desc}"
    if detail:
        line += f" [{detail}]"
    print(line)
    assert ok, line


def test_criterion_1_ideal_gate_contract():
    psis = haar_states(SeededRng(100), 1000)
    worst_fid, worst_p = 1.0, 0.0
    for gate in GATES:
        for psi in psis:
            outcome = apply_ns(gate, None, psi)
            fid = state_fidelity(ideal_ns_target(psi), outcome.output)
            worst_fid = min(worst_fid, fid)
            worst_p = max(worst_p, abs(outcome.probability - 0.25))
    ok = worst_fid >= 1.0 - 1e-10 and worst_p <= 1e-10
    _report(1, "both gates apply (a,b,-c) with heralding probability 1/4 "
               "on 1000 Haar signals", ok,
            f"min fidelity {worst_fid:.2e} from 1, max |p-0.25| {worst_p:.2e}")


def test_criterion_2_success_probability_sweeps():
    center_ok, excursion = True, 0.0
    curves = {}
    for gate in GATES:
        for param in ("angle1", "angle2", "angle3"):
            rows = sweep_success_probability(gate, param, -1.0, 1.0, 41)
            probs = [r.success_prob for r in rows]
            curves[(gate, param)] = probs
            center_ok &= abs(probs[20] - 0.25) <= 1e-10
            excursion = max(excursion, max(probs))
    mirror = max(abs(a - b) for a, b in zip(curves[(NSGateKind.KLM, "angle1")],
                                            reversed(curves[(NSGateKind.KLM, "angle3")])))
    ok = center_ok and excursion > 0.25 and mirror <= 1e-8
    _report(2, "success sweeps hit 0.25 at zero, exceed 0.25 in-window, "
               "and the first/third splitter curves mirror", ok,
            f"max p {excursion:.4f}, mirror asymmetry {mirror:.2e}")


def _window_edge(param: str, sign: float, tag: int) -> float:
    """Outer |delta| where the KLM mean fidelity crosses 0.999, by bisection."""
    def fid(delta: float, k: int) -> float:
        est = gate_fidelity_mc("klm", deviation_vector("klm", param, delta),
                               10_000, SeededRng(300).derive(tag, k))
        return est.mean

    lo, hi, k = 0.0, 0.005, 0
    while fid(sign * hi, k) >= 0.999 and hi < 1.0:
        lo, hi = hi, hi * 2.0
        k += 1
    for j in range(20):
        mid = 0.5 * (lo + hi)
        if fid(sign * mid, 100 + j) >= 0.999:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_criterion_3_window_ratio_exceeds_three():
    widths = {}
    for i, param in enumerate(("angle1", "angle2", "angle3")):
        widths[param] = (_window_edge(param, +1.0, 2 * i)
                         + _window_edge(param, -1.0, 2 * i + 1))
    r1 = widths["angle1"] / widths["angle2"]
    r3 = widths["angle3"] / widths["angle2"]
    ok = r1 > 3.0 and r3 > 3.0
    _report(3, "0.999-fidelity window is >3x wider for the outer splitters "
               "than the middle one (10000 samples/point)", ok,
            f"widths {widths['angle1']:.4f}/{widths['angle2']:.4f}/"
            f"{widths['angle3']:.4f}, ratios {r1:.2f}, {r3:.2f}")


def test_criterion_4_ancilla_input_phases_inert():
    worst = 0.0
    for param in ("phase1", "phase2"):
        rows = sweep_fidelity("klm", param, -math.pi, math.pi, 41, 2_000,
                              SeededRng(400))
        worst = max(worst, max(abs(r.mean_fidelity - 1.0) for r in rows))
    ok = worst <= 1e-10
    _report(4, "ancilla input phases leave the mean fidelity at 1 across "
               "[-pi, pi]", ok, f"max |F-1| {worst:.2e}")


def test_criterion_5_phase_ordering_at_pi():
    drops = {}
    for gate in GATES:
        per_phase = {}
        for param in ("phase1", "phase2", "phase3", "phase4", "phase5"):
            f = haar_average_fidelity(gate, deviation_vector(gate, param, math.pi))
            per_phase[param] = 1.0 - f
        drops[gate] = per_phase
    worst_klm = max(drops[NSGateKind.KLM].values())
    worst_rev = max(drops[NSGateKind.REVERSE].values())
    ok = worst_klm < worst_rev
    # conditional finding: the interior-phase drop is not at the percent
    # scale for this wiring; report the measured value alongside the verdict
    note = (f"klm worst drop {worst_klm:.4f} (interior phases, not ~0.01 "
            f"for this wiring), reverse worst drop {worst_rev:.4f}")
    _report(5, "worst per-phase fidelity drop at pi is strictly smaller "
               "for klm than for reverse", ok, note)


def test_criterion_6_compound_plateau_and_ordering():
    seed = SeededRng(7)
    max_at_2 = {}
    for gate in GATES:
        row = compound_scan(gate, [2.0], 2_000, 200, seed)[0]
        max_at_2[gate] = row.max_infid
    plateau_ok = all(0.71 <= v <= 0.81 for v in max_at_2.values())

    radii = [0.2, 0.4, 0.6, 0.8, 1.0]
    means = {gate: [r.mean_infid for r in
                    compound_scan(gate, radii, 2_000, 200, seed)]
             for gate in GATES}
    # SE of each mean is below 0.5/sqrt(2000*200) ~ 8e-4; require 3x the
    # combined bound so the ordering is beyond sampling noise
    margin = 3.0 * math.sqrt(2.0) * 0.5 / math.sqrt(2_000 * 200)
    gaps = [rev - klm for klm, rev in zip(means[NSGateKind.KLM],
                                          means[NSGateKind.REVERSE])]
    order_ok = all(g > margin for g in gaps)

    t0 = time.perf_counter()
    for gate in GATES:
        compound_scan(gate, [0.5, 1.0], 200, 50, SeededRng(8))
    smoke_seconds = time.perf_counter() - t0

    ok = plateau_ok and order_ok and smoke_seconds < 60.0
    _report(6, "max infidelity at radius 2 sits at 0.76+-0.05 for both gates "
               "and reverse degrades faster at every radius in [0.2, 1.0]", ok,
            f"max klm {max_at_2[NSGateKind.KLM]:.4f}, "
            f"max reverse {max_at_2[NSGateKind.REVERSE]:.4f}, "
            f"min ordering gap {min(gaps):.4f} (margin {margin:.4f}), "
            f"smoke {smoke_seconds:.1f}s")


def test_criterion_7_estimator_matches_oracle():
    settings = [("angle1", 0.15), ("angle2", 0.3), ("angle3", -0.2),
                ("phase3", 0.8), ("phase4", -1.1)]
    quad_error_budget = 1e-5
    worst_pull = 0.0
    for gate in GATES:
        for i, (param, delta) in enumerate(settings):
            dev = deviation_vector(gate, param, delta)
            est = gate_fidelity_mc(gate, dev, 10_000, SeededRng(700).derive(i))
            oracle = haar_average_fidelity(gate, dev)
            pull = abs(est.mean - oracle) / (est.std_error + quad_error_budget)
            worst_pull = max(worst_pull, pull)
    ok = worst_pull < 3.0
    _report(7, "10000-sample estimates match the deterministic quadrature "
               "oracle at 5 deviation settings per gate", ok,
            f"worst pull {worst_pull:.2f} sigma")


def test_criterion_8_property_suite():
    checks = []
    rng = np.random.default_rng(80)

    # unitarity with and without deviations
    unit_err = 0.0
    for circuit in (klm_circuit(), reverse_circuit()):
        for dev in (None, rng.standard_normal(8)):
            u = circuit_unitary(circuit, dev)
            unit_err = max(unit_err, float(np.max(np.abs(u.conj().T @ u - np.eye(20)))))
    checks.append(("unitarity", unit_err < 1e-12))

    # photon-number conservation
    totals = BASIS.occupations.sum(axis=1)
    mixing = totals[:, None] != totals[None, :]
    u = beam_splitter_unitary(0.7, (1, 2), BASIS)
    checks.append(("photon conservation", float(np.max(np.abs(u[mixing]))) < 1e-13))

    # angle additivity
    ua = beam_splitter_unitary(0.31, (0, 1), BASIS)
    ub = beam_splitter_unitary(-0.83, (0, 1), BASIS)
    uab = beam_splitter_unitary(0.31 - 0.83, (0, 1), BASIS)
    checks.append(("angle additivity", float(np.max(np.abs(ua @ ub - uab))) < 1e-12))

    # forward finite difference error scales like epsilon
    bs = BeamSplitter(modes=(0, 1), theta=0.0)
    g = generator_of(bs, BASIS)
    errs = []
    for eps in (1e-4, 1e-5):
        diff = (beam_splitter_unitary(eps, (0, 1), BASIS) - np.eye(20)) / eps
        errs.append(float(np.max(np.abs(diff + 1j * g))))
    ratio = errs[0] / errs[1]
    checks.append(("finite difference O(eps)", 3.0 < ratio < 30.0 and errs[1] < 1e-4))

    # Haar moment
    psis = haar_states(SeededRng(800), 100_000)
    moment = float(np.mean(np.abs(psis[:, 0]) ** 2))
    checks.append(("Haar moment 1/3", abs(moment - 1.0 / 3.0) < 0.005))

    # sphere moment
    gen = SeededRng(801).generator()
    samples = np.stack([sample_error_sphere(gen, 1.3) for _ in range(4000)])
    sphere_err = float(np.max(np.abs((samples ** 2).mean(axis=0) - 1.3 ** 2 / 8.0)))
    checks.append(("sphere moment r^2/8", sphere_err < 0.02))

    # inert phases carry zero weighted sensitivity
    wc = max(abs(weighted_sensitivity(g_, i, 200, SeededRng(802)).weighted)
             for g_ in GATES for i in (0, 1))
    checks.append(("W_c = 0 for inert phases", wc < 1e-12))

    # exact variance examples
    amps = np.zeros(20, dtype=complex)
    amps[BASIS.index_of((0, 0, 0))] = 1.0 / math.sqrt(2.0)
    amps[BASIS.index_of((2, 0, 0))] = 1.0 / math.sqrt(2.0)
    var_phase = generator_variance(StateVector(BASIS, amps),
                                   generator_of(PhaseShifter(mode=0, phi=0.0), BASIS))
    var_bs = generator_variance(basis_state(BASIS, (1, 0, 0)),
                                generator_of(bs, BASIS))
    checks.append(("variance examples exact",
                   abs(var_phase - 1.0) < 1e-12 and abs(var_bs - 1.0) < 1e-12))

    failed = [name for name, ok in checks if not ok]
    _report(8, "property suite (unitarity, conservation, additivity, "
               "generators, sampler moments, inert W_c, exact variances)",
            not failed, "all 8 properties hold" if not failed
            else "failed: " + ", ".join(failed))


def test_criterion_9_byte_identical_csvs_across_workers(tmp_path):
    outputs = {}
    for workers in (1, 2, 8):
        sweep = tmp_path / f"sweep-w{workers}.csv"
        comp = tmp_path / f"comp-w{workers}.csv"
        assert main(["fidelity-sweep", "--gate", "klm", "--param", "angle2",
                     "--points", "5", "--samples", "1000", "--seed", "7",
                     "--workers", str(workers), "--out", str(sweep)]) == 0
        assert main(["compound", "--gate", "reverse", "--radii", "0.5,1.5",
                     "--vectors", "60", "--states", "30", "--seed", "7",
                     "--workers", str(workers), "--out", str(comp)]) == 0
        outputs[workers] = sweep.read_bytes() + comp.read_bytes()
    ok = outputs[1] == outputs[2] == outputs[8]
    _report(9, "identical CLI invocations produce byte-identical CSVs with "
               "1, 2, and 8 workers", ok,
            f"{len(outputs[1])} bytes compared")
