"""Gate-level circuit IR over named qubit registers.

Gate kinds:
  ry     -- real rotation, one or two targets (a two-target gate is the
            tensor pair RotY(theta) x RotY(theta) acting with equal angle);
            RotY(theta)|0> = cos(theta/2)|0> + sin(theta/2)|1>.
  x      -- Pauli X / NOT; with one control this is the elementary CNOT.
  block  -- an opaque unitary over a target list (used for the basis
            conversion), carrying a declared resource estimate instead of a
            gate-level decomposition; matrix may be None for counting-only
            circuits, in which case simulation rejects it.

Controls carry a polarity: positive fires on |1>, negative on |0>.  The
cost model charges the same either way (negative controls are X-conjugated
positives, which the coefficients absorb).

Resource counting expands every gate through a configurable cost model
keyed on (kind, number of controls); depth is greedy ASAP layering, both on
IR gates (depth_native) and with each gate occupying its expanded
elementary-depth on its own qubit set (depth_serial).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

UNITARY_TOL = 1e-12

GATE_KINDS = ("ry", "x", "block")


@dataclass(frozen=True)
class QubitRegister:
    name: str
    width: int
    offset: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError(f"register {self.name!r} must have width >= 1")
        if self.offset < 0:
            raise ValueError(f"register {self.name!r} has negative offset")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.offset, self.offset + self.width))

    def qubit(self, i: int) -> int:
        if not 0 <= i < self.width:
            raise ValueError(f"qubit index {i} outside register {self.name!r}")
        return self.offset + i


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, bool], ...] = ()
    angle: float | None = None
    matrix: np.ndarray | None = None
    label: str | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if not self.targets:
            raise ValueError("gate needs at least one target")
        tset = set(self.targets)
        if len(tset) != len(self.targets):
            raise ValueError("duplicate target qubits")
        cset = {c for c, _ in self.controls}
        if len(cset) != len(self.controls):
            raise ValueError("duplicate control qubits")
        if tset & cset:
            raise ValueError("targets and controls must be disjoint")
        if self.kind == "ry":
            if self.angle is None:
                raise ValueError("ry gate needs an angle")
            if len(self.targets) > 2:
                raise ValueError("ry supports one or two targets")
        if self.kind == "x" and len(self.targets) != 1:
            raise ValueError("x acts on exactly one target")
        if self.kind == "block":
            if self.matrix is not None:
                dim = 2 ** len(self.targets)
                if self.matrix.shape != (dim, dim):
                    raise ValueError(
                        f"block matrix shape {self.matrix.shape} does not match "
                        f"{len(self.targets)} targets"
                    )
                defect = np.max(
                    np.abs(self.matrix.conj().T @ self.matrix - np.eye(dim))
                )
                if defect > UNITARY_TOL:
                    raise ValueError(f"block matrix not unitary: defect {defect:.3e}")
                m = self.matrix.astype(complex)
                m.flags.writeable = False
                object.__setattr__(self, "matrix", m)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.targets, self.controls, self.label) != (
            other.kind,
            other.targets,
            other.controls,
            other.label,
        ):
            return False
        if (self.angle is None) != (other.angle is None):
            return False
        if self.angle is not None and self.angle != other.angle:
            return False
        if (self.matrix is None) != (other.matrix is None):
            return False
        if self.matrix is not None and not np.array_equal(self.matrix, other.matrix):
            return False
        return True

    @classmethod
    def ry(cls, angle: float, targets, controls=()) -> "Gate":
        if isinstance(targets, int):
            targets = (targets,)
        return cls(kind="ry", targets=tuple(targets), controls=tuple(controls),
                   angle=float(angle))

    @classmethod
    def x(cls, target: int, controls=()) -> "Gate":
        return cls(kind="x", targets=(target,), controls=tuple(controls))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls.x(target, controls=((control, True),))

    @classmethod
    def block(cls, matrix, targets, label: str) -> "Gate":
        return cls(kind="block", targets=tuple(targets),
                   matrix=None if matrix is None else np.asarray(matrix, dtype=complex),
                   label=label)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(c for c, _ in self.controls)

    def adjoint(self) -> "Gate":
        if self.kind == "ry":
            return replace(self, angle=-self.angle)
        if self.kind == "x":
            return self
        matrix = None if self.matrix is None else self.matrix.conj().T
        label = self.label
        if label is not None:
            label = label[:-1] if label.endswith("†") else label + "†"
        return Gate(kind="block", targets=self.targets, controls=self.controls,
                    matrix=matrix, label=label)


class Circuit:
    """Ordered gates over a fixed register layout; immutable once built."""

    def __init__(self, registers, gates=()):
        regs = tuple(registers)
        spans = sorted((r.offset, r.offset + r.width, r.name) for r in regs)
        position = 0
        for lo, hi, name in spans:
            if lo != position:
                raise ValueError(f"registers do not tile qubit range at {name!r}")
            position = hi
        self.registers = regs
        self.num_qubits = position
        gates = tuple(gates)
        for g in gates:
            bad = [q for q in g.qubits if not 0 <= q < self.num_qubits]
            if bad:
                raise ValueError(f"gate {g.kind!r} touches out-of-range qubits {bad}")
        self.gates = gates
        self._by_name = {r.name: r for r in regs}

    def register(self, name: str) -> QubitRegister:
        return self._by_name[name]

    def append(self, gate: Gate) -> "Circuit":
        return Circuit(self.registers, self.gates + (gate,))

    def compose(self, other: "Circuit") -> "Circuit":
        if other.registers != self.registers:
            raise ValueError("compose requires identical register layouts")
        return Circuit(self.registers, self.gates + other.gates)

    def adjoint(self) -> "Circuit":
        return Circuit(self.registers, tuple(g.adjoint() for g in reversed(self.gates)))

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


def append(circuit: Circuit, gate: Gate) -> Circuit:
    return circuit.append(gate)


def compose(a: Circuit, b: Circuit) -> Circuit:
    return a.compose(b)


def adjoint(circuit: Circuit) -> Circuit:
    return circuit.adjoint()


@dataclass(frozen=True)
class CostModel:
    """Elementary-gate counts per (kind, #controls).

    Anchors: an uncontrolled rotation or NOT is elementary; CNOT is
    elementary; a singly-controlled rotation costs 2; a doubly-controlled
    rotation unit costs 8; everything wider falls back to the linear
    multi-control construction at linear_coefficient * (controls - 1).
    Block gates are charged a declared estimate
    block_coefficient * targets**2.
    """

    ry_base: tuple[int, ...] = (1, 2, 8)
    x_base: tuple[int, ...] = (1, 1)
    linear_coefficient: int = 16
    block_coefficient: float = 2.0

    def gate_cost(self, gate: Gate) -> int:
        c = len(gate.controls)
        if gate.kind == "ry":
            if c < len(self.ry_base):
                return self.ry_base[c]
            return self.linear_coefficient * (c - 1)
        if gate.kind == "x":
            if c < len(self.x_base):
                return self.x_base[c]
            return self.linear_coefficient * (c - 1)
        if gate.kind == "block":
            t = len(gate.targets)
            base = math.ceil(self.block_coefficient * t * t)
            if c:
                base += self.linear_coefficient * c
            return base
        raise ValueError(f"unknown gate kind {gate.kind!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "CostModel":
        kwargs = {}
        if "ry_base" in data:
            kwargs["ry_base"] = tuple(int(v) for v in data["ry_base"])
        if "x_base" in data:
            kwargs["x_base"] = tuple(int(v) for v in data["x_base"])
        if "linear_coefficient" in data:
            kwargs["linear_coefficient"] = int(data["linear_coefficient"])
        if "block_coefficient" in data:
            kwargs["block_coefficient"] = float(data["block_coefficient"])
        return cls(**kwargs)

    @classmethod
    def from_env(cls, env_var: str = "QPS_COST_MODEL") -> "CostModel":
        path = os.environ.get(env_var)
        if not path:
            return cls()
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


DEFAULT_COST_MODEL = CostModel()


@dataclass(frozen=True)
class ResourceReport:
    qubits: int
    elementary_gates: int
    depth_serial: int
    depth_native: int

    def to_dict(self) -> dict:
        return {
            "qubits": self.qubits,
            "elementary_gates": self.elementary_gates,
            "depth_serial": self.depth_serial,
            "depth_native": self.depth_native,
        }


def _asap_depth(circuit: Circuit, spans) -> int:
    frontier = [0] * circuit.num_qubits
    for gate, span in zip(circuit.gates, spans):
        qubits = gate.qubits
        start = max(frontier[q] for q in qubits)
        for q in qubits:
            frontier[q] = start + span
    return max(frontier, default=0)


def depth(circuit: Circuit, cost_model: CostModel | None = None) -> int:
    """Expanded ASAP depth (each gate occupies its elementary-depth)."""
    cm = cost_model or DEFAULT_COST_MODEL
    return _asap_depth(circuit, [cm.gate_cost(g) for g in circuit.gates])


def native_depth(circuit: Circuit) -> int:
    return _asap_depth(circuit, [1] * len(circuit.gates))


def count_resources(circuit: Circuit, cost_model: CostModel | None = None) -> ResourceReport:
    cm = cost_model or DEFAULT_COST_MODEL
    costs = [cm.gate_cost(g) for g in circuit.gates]
    return ResourceReport(
        qubits=circuit.num_qubits,
        elementary_gates=sum(costs),
        depth_serial=_asap_depth(circuit, costs),
        depth_native=_asap_depth(circuit, [1] * len(costs)),
    )


def serialize_circuit(circuit: Circuit) -> str:
    """One gate per line: kind, angle, targets, controls with polarity."""
    lines = []
    for g in circuit.gates:
        head = g.kind if g.label is None else f"{g.kind}[{g.label}]"
        parts = [head]
        if g.angle is not None:
            parts.append(repr(g.angle))
        parts.append("t=" + ",".join(str(t) for t in g.targets))
        if g.controls:
            parts.append("c=" + ",".join(
                ("+" if pol else "-") + str(q) for q, pol in g.controls
            ))
        lines.append(" ".join(parts))
    return "\n".join(lines)
