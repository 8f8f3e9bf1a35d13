"""Command-line interface.

Subcommands write CSV files (or stdout) with deterministic content: comment
lines carry the version, command, config, and seed; identical configurations
produce byte-identical CSVs for any worker count. Wall-clock time and worker
count go to stderr instead. All angles and phases are in radians; a path
length variation of half a wavelength is a phase of pi.

When --out is given, the sweep and compound commands also emit a static
matplotlib companion script <out>.plot.py that reads the CSV.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .elements import format_circuit, parse_circuit
from .fidelity import SeededRng, gate_fidelity_mc, haar_average_fidelity
from .gates import (NSGateKind, circuit_for, conditional_map, klm_circuit,
                    reverse_circuit)
from .qfi import all_components
from .sensitivity import (compound_scan, deviation_vector, sample_error_sphere,
                          sweep_fidelity, sweep_success_probability)

PHASE_PARAMS = ("phase1", "phase2", "phase3", "phase4", "phase5")
ALL_PARAMS = ("angle1", "angle2", "angle3") + PHASE_PARAMS


def _default_workers() -> int:
    raw = os.environ.get("NSGATE_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _resolve_gate(args):
    if getattr(args, "circuit", None):
        with open(args.circuit, encoding="utf-8") as fh:
            return parse_circuit(fh.read())
    return circuit_for(args.gate)


def _write_output(args, command: str, config: str, seed, header: str,
                  rows: list[list], plot: dict | None) -> None:
    lines = [f"# nsgate {__version__}", f"# command: {command}"]
    if config:
        lines.append(f"# config: {config}")
    if seed is not None:
        lines.append(f"# seed: {seed}")
    lines.append(header)
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        if plot is not None:
            _write_plot_script(args.out, plot)


PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Companion plot for {csv_name} (generated; reads the CSV, needs matplotlib)."""

import csv
from collections import defaultdict

import matplotlib.pyplot as plt

CSV = {csv_name!r}
X = {x_col!r}
SERIES = {series!r}
ERR = {err_col!r}
GROUP = {group_cols!r}

with open(CSV, newline="") as fh:
    rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
header, data = rows[0], rows[1:]
col = {{name: i for i, name in enumerate(header)}}

groups = defaultdict(list)
for row in data:
    key = tuple(row[col[g]] for g in GROUP)
    groups[key].append(row)

fig, ax = plt.subplots(figsize=(7, 4.5))
for key, rows_ in sorted(groups.items()):
    x = [float(r[col[X]]) for r in rows_]
    for series_col in SERIES:
        y = [float(r[col[series_col]]) for r in rows_]
        label = " ".join(key) if len(SERIES) == 1 else " ".join(key) + " " + series_col
        if ERR and len(SERIES) == 1:
            err = [float(r[col[ERR]]) for r in rows_]
            ax.errorbar(x, y, yerr=err, label=label, capsize=2)
        else:
            ax.plot(x, y, label=label)
ax.set_xlabel(X)
ax.set_ylabel({y_label!r})
ax.legend()
ax.grid(True, alpha=0.3)
fig.tight_layout()
fig.savefig(CSV + ".png", dpi=150)
print("wrote", CSV + ".png")
'''


def _write_plot_script(out_path: str, plot: dict) -> None:
    script = PLOT_TEMPLATE.format(csv_name=os.path.basename(out_path), **plot)
    with open(out_path + ".plot.py", "w", encoding="utf-8") as fh:
        fh.write(script)


def _report(args, t0: float, what: str) -> None:
    dest = args.out if args.out else "stdout"
    print(f"{what} -> {dest} in {time.perf_counter() - t0:.2f}s "
          f"(workers={getattr(args, 'workers', 1)})", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_success_sweep(args) -> int:
    t0 = time.perf_counter()
    gate = _resolve_gate(args)
    rows = []
    for param in args.param:
        rows.extend(sweep_success_probability(gate, param, args.min, args.max,
                                              args.points))
    config = (f"gate={gate.name} param={','.join(args.param)} min={_fmt(args.min)} "
              f"max={_fmt(args.max)} points={args.points}")
    _write_output(args, "success-sweep", config, None,
                  "gate,param,delta,success_prob",
                  [[r.gate, r.param, r.delta, r.success_prob] for r in rows],
                  {"x_col": "delta", "series": ["success_prob"], "err_col": "",
                   "group_cols": ["gate", "param"], "y_label": "success probability"})
    _report(args, t0, f"success-sweep {len(rows)} rows")
    return 0


def _sweep_rows(gate, params, args):
    rows = []
    seed = SeededRng(args.seed)
    for k, param in enumerate(params):
        rows.extend(sweep_fidelity(gate, param, args.min, args.max, args.points,
                                   args.samples, seed.derive(k), args.workers))
    return rows


def _emit_fidelity_rows(args, command, gate, params, rows, t0) -> int:
    config = (f"gate={gate.name} param={','.join(params)} min={_fmt(args.min)} "
              f"max={_fmt(args.max)} points={args.points} samples={args.samples}")
    _write_output(args, command, config, args.seed,
                  "gate,param,delta,mean_fidelity,std_error,mean_success_prob,n_samples",
                  [[r.gate, r.param, r.delta, r.mean_fidelity, r.std_error,
                    r.mean_success_prob, r.n_samples] for r in rows],
                  {"x_col": "delta", "series": ["mean_fidelity"], "err_col": "std_error",
                   "group_cols": ["gate", "param"], "y_label": "mean gate fidelity"})
    _report(args, t0, f"{command} {len(rows)} rows")
    return 0


def _cmd_fidelity_sweep(args) -> int:
    t0 = time.perf_counter()
    gate = _resolve_gate(args)
    rows = _sweep_rows(gate, args.param, args)
    return _emit_fidelity_rows(args, "fidelity-sweep", gate, args.param, rows, t0)


def _cmd_phase_sweep(args) -> int:
    t0 = time.perf_counter()
    gate = _resolve_gate(args)
    params = args.param if args.param else list(PHASE_PARAMS)
    rows = _sweep_rows(gate, params, args)
    return _emit_fidelity_rows(args, "phase-sweep", gate, params, rows, t0)


def _parse_radii(spec: str) -> list[float]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"radii spec must be start:stop:count, got {spec!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError(f"radii count must be >= 1, got {count}")
        return [float(r) for r in np.linspace(start, stop, count)]
    return [float(tok) for tok in spec.split(",") if tok]


def _cmd_compound(args) -> int:
    t0 = time.perf_counter()
    gate = _resolve_gate(args)
    radii = _parse_radii(args.radii)
    rows = compound_scan(gate, radii, args.vectors, args.states,
                         SeededRng(args.seed), args.workers)
    config = (f"gate={gate.name} radii={args.radii} vectors={args.vectors} "
              f"states={args.states}")
    _write_output(args, "compound", config, args.seed,
                  "gate,radius,min_infid,max_infid,mean_infid,n_vectors,n_states",
                  [[r.gate, r.radius, r.min_infid, r.max_infid, r.mean_infid,
                    r.n_vectors, r.n_states] for r in rows],
                  {"x_col": "radius", "series": ["min_infid", "max_infid", "mean_infid"],
                   "err_col": "", "group_cols": ["gate"], "y_label": "infidelity"})
    _report(args, t0, f"compound {len(rows)} rows")
    return 0


def _cmd_qfi(args) -> int:
    t0 = time.perf_counter()
    gate = _resolve_gate(args)
    comps = all_components(gate, args.samples, SeededRng(args.seed))
    config = f"gate={gate.name} samples={args.samples}"
    _write_output(args, "qfi", config, args.seed,
                  "gate,component,W_c,mean_var,max_var,n_samples",
                  [[c.gate, c.component, c.weighted, c.mean_variance,
                    c.max_variance, c.n_samples] for c in comps],
                  None)
    _report(args, t0, f"qfi {len(comps)} rows")
    return 0


def _cmd_dump_circuit(args) -> int:
    gate = _resolve_gate(args)
    text = format_circuit(gate)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def _cmd_selftest(args) -> int:
    failures = 0

    def check(label: str, ok: bool, detail: str = ""):
        nonlocal failures
        if ok:
            print(f"ok: {label}")
        else:
            failures += 1
            print(f"FAIL: {label}" + (f" ({detail})" if detail else ""))

    from .fock import enumerate_basis
    basis = enumerate_basis(3, 3)
    check("basis has 20 states, graded order", basis.dim == 20
          and basis.states[0] == (0, 0, 0) and basis.states[1] == (0, 0, 1)
          and basis.states[-1] == (3, 0, 0))

    from .elements import beam_splitter_unitary
    u = beam_splitter_unitary(math.pi / 4, (0, 1), basis)
    i11 = basis.index_of((1, 1, 0))
    hom = (abs(u[basis.index_of((0, 2, 0)), i11] - 1 / math.sqrt(2)) < 1e-12
           and abs(u[basis.index_of((2, 0, 0)), i11] + 1 / math.sqrt(2)) < 1e-12
           and abs(u[i11, i11]) < 1e-12)
    check("Hong-Ou-Mandel amplitudes at theta=pi/4", hom)

    for kind in (NSGateKind.KLM, NSGateKind.REVERSE):
        cmap = conditional_map(kind)
        lam = cmap[0, 0]
        target = lam * np.diag([1.0, 1.0, -1.0])
        check(f"{kind.value}: heralded map is lambda*diag(1,1,-1), |lambda|=1/2",
              bool(np.allclose(cmap, target, atol=1e-12)
                   and abs(abs(lam) - 0.5) < 1e-12))
        rng = SeededRng(17).generator()
        z = rng.standard_normal((50, 6))
        psis = z[:, :3] + 1j * z[:, 3:]
        psis /= np.linalg.norm(psis, axis=1, keepdims=True)
        probs = np.sum(np.abs(psis @ cmap.T) ** 2, axis=1)
        check(f"{kind.value}: heralding probability 1/4 for all inputs",
              bool(np.max(np.abs(probs - 0.25)) < 1e-12))

        p1 = [r.success_prob for r in sweep_success_probability(kind, "angle1", -1, 1, 21)]
        p3 = [r.success_prob for r in sweep_success_probability(kind, "angle3", -1, 1, 21)]
        worst = max(abs(a - b) for a, b in zip(p1, reversed(p3)))
        check(f"{kind.value}: first/third splitter curves mirror (<1e-10)", worst < 1e-10,
              f"max diff {worst:.2e}")

        for param in ("phase1", "phase2"):
            f = haar_average_fidelity(kind, deviation_vector(kind, param, math.pi),
                                      n_radial=24, n_phase=12)
            check(f"{kind.value}: ancilla input {param} inert at pi", abs(f - 1.0) < 1e-9,
                  f"F={f!r}")

    est = gate_fidelity_mc(NSGateKind.KLM, deviation_vector(NSGateKind.KLM, "angle2", 0.1),
                           2000, SeededRng(23))
    oracle = haar_average_fidelity(NSGateKind.KLM,
                                   deviation_vector(NSGateKind.KLM, "angle2", 0.1))
    check("Monte Carlo estimator matches quadrature oracle (4 sigma)",
          abs(est.mean - oracle) < 4 * est.std_error,
          f"mc={est.mean:.5f} oracle={oracle:.5f}")

    vec = sample_error_sphere(SeededRng(5).generator(), 1.5)
    check("error sphere sample has exact radius",
          abs(float(np.linalg.norm(vec)) - 1.5) < 1e-12)

    print(f"selftest: {'PASS' if failures == 0 else f'{failures} FAILURES'}")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# parser


def _add_gate_args(sub, circuit_ok=True):
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--gate", choices=[k.value for k in NSGateKind],
                       help="built-in gate design")
    if circuit_ok:
        group.add_argument("--circuit", metavar="PATH",
                           help="plain-text circuit description to load instead")


def _add_common(sub, samples_default=None):
    sub.add_argument("--out", metavar="PATH", default=None,
                     help="output CSV path (default: stdout)")
    sub.add_argument("--workers", type=int, default=_default_workers(),
                     help="worker processes (default: $NSGATE_WORKERS or 1); "
                          "results are identical for any value")
    sub.add_argument("--seed", type=int, default=0, help="root RNG seed")
    if samples_default is not None:
        sub.add_argument("--samples", type=int, default=samples_default,
                         help=f"Haar samples per point (default {samples_default})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsgate",
        description="Simulate post-selected NS gates and analyze parameter "
                    "sensitivity. All parameters are in radians; half a "
                    "wavelength of path variation is a phase of pi.")
    parser.add_argument("--version", action="version", version=f"nsgate {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("success-sweep",
                        help="heralding probability vs one parameter, fixed "
                             "input (1,1,1)/sqrt(3); CSV: gate,param,delta,success_prob")
    _add_gate_args(s)
    s.add_argument("--param", action="append", required=True, help="parameter id, repeatable")
    s.add_argument("--min", type=float, default=-1.0)
    s.add_argument("--max", type=float, default=1.0)
    s.add_argument("--points", type=int, default=41)
    s.add_argument("--out", metavar="PATH", default=None)
    s.set_defaults(func=_cmd_success_sweep, workers=1)

    s = subs.add_parser("fidelity-sweep",
                        help="Haar-mean gate fidelity vs one parameter; CSV: "
                             "gate,param,delta,mean_fidelity,std_error,"
                             "mean_success_prob,n_samples")
    _add_gate_args(s)
    s.add_argument("--param", action="append", required=True, help="parameter id, repeatable")
    s.add_argument("--min", type=float, default=-0.5)
    s.add_argument("--max", type=float, default=0.5)
    s.add_argument("--points", type=int, default=41)
    _add_common(s, samples_default=10_000)
    s.set_defaults(func=_cmd_fidelity_sweep)

    s = subs.add_parser("phase-sweep",
                        help="fidelity sweep over the five phases (default "
                             "range -pi..pi); same CSV schema as fidelity-sweep")
    _add_gate_args(s)
    s.add_argument("--param", action="append", default=None,
                   help="phase id (default: all five phases)")
    s.add_argument("--min", type=float, default=-math.pi)
    s.add_argument("--max", type=float, default=math.pi)
    s.add_argument("--points", type=int, default=41)
    _add_common(s, samples_default=10_000)
    s.set_defaults(func=_cmd_phase_sweep)

    s = subs.add_parser("compound",
                        help="random error vectors on spheres of given radii; "
                             "CSV: gate,radius,min_infid,max_infid,mean_infid,"
                             "n_vectors,n_states")
    _add_gate_args(s)
    s.add_argument("--radii", default="0:2:21",
                   help="start:stop:count or comma list (default 0:2:21)")
    s.add_argument("--vectors", type=int, default=2000,
                   help="error vectors per radius (default 2000)")
    s.add_argument("--states", type=int, default=200,
                   help="Haar input states per vector (default 200)")
    _add_common(s)
    s.set_defaults(func=_cmd_compound)

    s = subs.add_parser("qfi",
                        help="per-component generator variances; CSV: "
                             "gate,component,W_c,mean_var,max_var,n_samples")
    _add_gate_args(s)
    _add_common(s, samples_default=10_000)
    s.set_defaults(func=_cmd_qfi)

    s = subs.add_parser("dump-circuit",
                        help="write the plain-text circuit description "
                             "(round-trips through the parser)")
    _add_gate_args(s)
    s.add_argument("--out", metavar="PATH", default=None)
    s.set_defaults(func=_cmd_dump_circuit)

    s = subs.add_parser("selftest", help="fast deterministic checks; exit 0 on pass")
    s.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
