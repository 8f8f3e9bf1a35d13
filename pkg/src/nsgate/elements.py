"""Linear optical elements and parametrized circuits.

Beam splitter convention on an ordered mode pair (j, k):

    U a_j U+ =  cos(theta) a_j + sin(theta) a_k
    U a_k U+ = -sin(theta) a_j + cos(theta) a_k

so a single photon in mode j maps to cos(theta)|1,0> + sin(theta)|0,1> on the
pair. All complex phases live in explicit phase shifters, which act as
|n> -> exp(i n phi)|n> on their mode. Every parameter is in radians.

Each element carries a Hermitian generator G with U(x) = exp(-i x G):
G = -i(a_j+ a_k - a_k+ a_j) for a beam splitter, the mode number operator for
a phase shifter. Unitaries are built from a cached eigendecomposition of the
generator, which is exact on the truncated basis because both generators
conserve total photon number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .fock import FockBasis, StateVector, enumerate_basis


@dataclass(frozen=True)
class BeamSplitter:
    """Beam splitter on an ordered pair of modes with mixing angle theta."""

    modes: tuple[int, int]
    theta: float
    param: str | None = None


@dataclass(frozen=True)
class PhaseShifter:
    """Phase shifter on one mode: |n> -> exp(i n phi)|n>."""

    mode: int
    phi: float
    param: str | None = None


Element = Union[BeamSplitter, PhaseShifter]


@dataclass(frozen=True)
class Circuit:
    """Ordered sequence of elements; list order is temporal order.

    ``parameter_ids`` fixes the deviation-vector layout: entry i of a
    deviation vector is added to the nominal value of the element whose
    ``param`` equals ``parameter_ids[i]``.
    """

    name: str
    mode_count: int
    cutoff: int
    elements: tuple[Element, ...]
    parameter_ids: tuple[str, ...]
    ancilla_modes: tuple[int, ...] = (1, 2)
    ancilla: tuple[int, ...] = (1, 0)
    herald: tuple[int, ...] = (1, 0)

    def __post_init__(self):
        seen = set()
        for pid in self.parameter_ids:
            if pid in seen:
                raise ValueError(f"duplicate parameter id {pid!r}")
            seen.add(pid)
        for el in self.elements:
            modes = el.modes if isinstance(el, BeamSplitter) else (el.mode,)
            for m in modes:
                if not 0 <= m < self.mode_count:
                    raise ValueError(f"element {el} uses mode {m} outside 0..{self.mode_count - 1}")
            if isinstance(el, BeamSplitter) and el.modes[0] == el.modes[1]:
                raise ValueError(f"beam splitter must couple two distinct modes, got {el.modes}")
            if el.param is not None and el.param not in seen:
                raise ValueError(f"element parameter {el.param!r} missing from parameter_ids")
        if len(self.ancilla) != len(self.ancilla_modes) or len(self.herald) != len(self.ancilla_modes):
            raise ValueError("ancilla, herald and ancilla_modes must have equal length")

    @property
    def n_parameters(self) -> int:
        return len(self.parameter_ids)

    def parameter_index(self, param: str) -> int:
        try:
            return self.parameter_ids.index(param)
        except ValueError:
            raise KeyError(f"unknown parameter {param!r}; have {self.parameter_ids}") from None

    def basis(self) -> FockBasis:
        return enumerate_basis(self.mode_count, self.cutoff)


# ---------------------------------------------------------------------------
# generators and unitaries


@lru_cache(maxsize=None)
def _lowering(mode_count: int, cutoff: int, mode: int) -> np.ndarray:
    basis = enumerate_basis(mode_count, cutoff)
    a = np.zeros((basis.dim, basis.dim))
    for col, occ in enumerate(basis.states):
        n = occ[mode]
        if n > 0:
            tgt = list(occ)
            tgt[mode] = n - 1
            a[basis.index[tuple(tgt)], col] = np.sqrt(n)
    a.flags.writeable = False
    return a


def beam_splitter_generator(modes: tuple[int, int], basis: FockBasis) -> np.ndarray:
    """Hermitian G = -i(a_j+ a_k - a_k+ a_j) on the ordered pair (j, k)."""
    j, k = modes
    aj = _lowering(basis.mode_count, basis.cutoff, j)
    ak = _lowering(basis.mode_count, basis.cutoff, k)
    return -1j * (aj.T @ ak - ak.T @ aj)


def number_generator(mode: int, basis: FockBasis) -> np.ndarray:
    """Photon number operator of one mode, as a diagonal matrix."""
    return np.diag(basis.occupations[:, mode].astype(float))


def generator_of(element: Element, basis: FockBasis) -> np.ndarray:
    """Generator G of an element, with U(x) = exp(-i x G).

    For a phase shifter the parameter convention |n> -> exp(+i n phi)|n>
    corresponds to G = -n, so the returned generator is the negated number
    operator.
    """
    if isinstance(element, BeamSplitter):
        return beam_splitter_generator(element.modes, basis)
    return -number_generator(element.mode, basis)


@lru_cache(maxsize=None)
def _bs_eigensystem(mode_count: int, cutoff: int, modes: tuple[int, int]):
    basis = enumerate_basis(mode_count, cutoff)
    g = beam_splitter_generator(modes, basis)
    w, v = np.linalg.eigh(g)
    w.flags.writeable = False
    v.flags.writeable = False
    return w, v


def beam_splitter_unitary(theta: float, modes: tuple[int, int], basis: FockBasis) -> np.ndarray:
    """Full basis matrix of a beam splitter, exp(-i theta G)."""
    w, v = _bs_eigensystem(basis.mode_count, basis.cutoff, modes)
    return (v * np.exp(-1j * theta * w)) @ v.conj().T


def _phase_diagonal(phi: float, mode: int, basis: FockBasis) -> np.ndarray:
    return np.exp(1j * phi * basis.occupations[:, mode])


def phase_unitary(phi: float, mode: int, basis: FockBasis) -> np.ndarray:
    """Full basis matrix of a phase shifter, diag(exp(i n phi))."""
    return np.diag(_phase_diagonal(phi, mode, basis))


def _element_value(element: Element, circuit: Circuit, deviations: np.ndarray) -> float:
    nominal = element.theta if isinstance(element, BeamSplitter) else element.phi
    if element.param is None:
        return nominal
    return nominal + float(deviations[circuit.parameter_index(element.param)])


def _check_deviations(circuit: Circuit, deviations) -> np.ndarray:
    if deviations is None:
        return np.zeros(circuit.n_parameters)
    dev = np.asarray(deviations, dtype=float)
    if dev.shape != (circuit.n_parameters,):
        raise ValueError(
            f"deviation vector has shape {dev.shape}, expected ({circuit.n_parameters},)")
    if not np.all(np.isfinite(dev)):
        raise ValueError("deviation vector must be finite")
    return dev


def apply_circuit(circuit: Circuit, deviations, state: StateVector) -> StateVector:
    """Propagate a state through the circuit with additive parameter deviations."""
    basis = circuit.basis()
    if state.basis != basis:
        raise ValueError(f"state basis {state.basis!r} does not match circuit basis {basis!r}")
    dev = _check_deviations(circuit, deviations)
    amps = state.amplitudes
    for el in circuit.elements:
        value = _element_value(el, circuit, dev)
        if isinstance(el, PhaseShifter):
            amps = _phase_diagonal(value, el.mode, basis) * amps
        else:
            amps = beam_splitter_unitary(value, el.modes, basis) @ amps
    return StateVector(basis, amps)


def circuit_unitary(circuit: Circuit, deviations=None) -> np.ndarray:
    """Full basis matrix of the circuit at the given deviations."""
    basis = circuit.basis()
    dev = _check_deviations(circuit, deviations)
    u = np.eye(basis.dim, dtype=complex)
    for el in circuit.elements:
        value = _element_value(el, circuit, dev)
        if isinstance(el, PhaseShifter):
            u = _phase_diagonal(value, el.mode, basis)[:, None] * u
        else:
            u = beam_splitter_unitary(value, el.modes, basis) @ u
    return u


# ---------------------------------------------------------------------------
# plain-text serialization (key = value lines)


def format_circuit(circuit: Circuit) -> str:
    """Serialize a circuit to the plain-text key=value format."""
    lines = [
        f"name = {circuit.name}",
        f"modes = {circuit.mode_count}",
        f"cutoff = {circuit.cutoff}",
        f"parameters = {','.join(circuit.parameter_ids)}",
        f"ancilla_modes = {','.join(str(m) for m in circuit.ancilla_modes)}",
        f"ancilla = {','.join(str(n) for n in circuit.ancilla)}",
        f"herald = {','.join(str(n) for n in circuit.herald)}",
    ]
    for el in circuit.elements:
        param = el.param if el.param is not None else "-"
        if isinstance(el, BeamSplitter):
            lines.append(
                f"element = bs modes={el.modes[0]},{el.modes[1]} param={param} value={el.theta!r}")
        else:
            lines.append(f"element = ps mode={el.mode} param={param} value={el.phi!r}")
    return "\n".join(lines) + "\n"


def _parse_tokens(rest: str) -> dict[str, str]:
    out = {}
    for tok in rest.split()[1:]:
        if "=" not in tok:
            raise ValueError(f"malformed element token {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def parse_circuit(text: str) -> Circuit:
    """Parse the plain-text circuit format; inverse of format_circuit."""
    fields: dict[str, str] = {}
    elements: list[Element] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "element":
            kind = value.split()[0]
            toks = _parse_tokens(value)
            param = None if toks.get("param", "-") == "-" else toks["param"]
            if kind == "bs":
                j, k = (int(m) for m in toks["modes"].split(","))
                elements.append(BeamSplitter((j, k), float(toks["value"]), param))
            elif kind == "ps":
                elements.append(PhaseShifter(int(toks["mode"]), float(toks["value"]), param))
            else:
                raise ValueError(f"unknown element kind {kind!r}")
        else:
            fields[key] = value
    missing = {"modes", "cutoff", "parameters"} - set(fields)
    if missing:
        raise ValueError(f"circuit description missing fields: {sorted(missing)}")

    def int_tuple(key, default):
        if key not in fields:
            return default
        return tuple(int(x) for x in fields[key].split(",")) if fields[key] else ()

    params = tuple(p for p in fields["parameters"].split(",") if p)
    return Circuit(
        name=fields.get("name", "custom"),
        mode_count=int(fields["modes"]),
        cutoff=int(fields["cutoff"]),
        elements=tuple(elements),
        parameter_ids=params,
        ancilla_modes=int_tuple("ancilla_modes", (1, 2)),
        ancilla=int_tuple("ancilla", (1, 0)),
        herald=int_tuple("herald", (1, 0)),
    )
