"""The ten rule implementations, each a pure function of (IR, flow relation)."""

from __future__ import annotations

from dataclasses import dataclass

from ..frontend.nodes import SourceSpan
from ..qflow import FlowRelation, QubitKey
from ..qir.model import CircuitDecl, CircuitKind, EventKind, QuantumIR


@dataclass(frozen=True)
class Warning:
    rule: str
    span: SourceSpan
    message: str
    circuit: str | None = None
    severity: str = "warning"

    def sort_key(self) -> tuple[str, int, int, str]:
        return (self.span.file, self.span.line, self.span.column, self.rule)


def _qubit_label(ir: QuantumIR, key: QubitKey) -> str:
    register = ir.registers[key[1]]
    return f"{register.display_name()}[{key[2]}]"


def run_double_meas(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """Two measurements read the same qubit with nothing in between."""
    out = []
    for a, b, key in flow.directly_pairs:
        first, second = flow.event(a), flow.event(b)
        if first.kind is EventKind.MEASUREMENT and second.kind is EventKind.MEASUREMENT:
            out.append(
                Warning(
                    "double-meas",
                    second.span,
                    f"Redundant measurement on qubit {_qubit_label(ir, key)}; "
                    "its state was already measured",
                    circuit=second.circuit,
                )
            )
    return out


def run_op_after_meas(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """A non-conditional gate acts on a qubit right after it was measured."""
    out = []
    for a, b, key in flow.directly_pairs:
        measurement, gate = flow.event(a), flow.event(b)
        if (
            measurement.kind is EventKind.MEASUREMENT
            and gate.kind is EventKind.GATE
            and not gate.is_conditional
        ):
            out.append(
                Warning(
                    "op-after-meas",
                    gate.span,
                    f"Gate after measurement on qubit {_qubit_label(ir, key)}; "
                    "the measured state has collapsed",
                    circuit=gate.circuit,
                )
            )
    return out


def run_meas_all_abuse(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """measure_all() adds a fresh register although classical bits exist."""
    out = []
    for event in ir.events:
        if event.kind is not EventKind.MEASURE_ALL or not event.creates_new_register:
            continue
        if event.circuit is None:
            continue
        clbits = ir.circuits[event.circuit].num_clbits
        if clbits.is_known and clbits.value is not None and clbits.value > 0:
            out.append(
                Warning(
                    "meas-all-abuse",
                    event.span,
                    f"measure_all() creates a new classical register although the "
                    f"circuit already has {clbits.value} classical bits",
                    circuit=event.circuit,
                )
            )
    return out


def run_cond_wo_meas(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """A conditional gate fires on classical bits nothing has measured yet."""
    out = []
    measure_kinds = (EventKind.MEASUREMENT, EventKind.MEASURE_ALL)
    # Circuits derived from others (copies, transpiled or externally built
    # ones) may already contain measurements we cannot see.
    visible_kinds = (CircuitKind.CONSTRUCTOR, CircuitKind.BUILTIN_PARAMETRIZED)
    for event in ir.events:
        if event.kind is not EventKind.GATE or not event.is_conditional:
            continue
        circuit_id = event.circuit
        if circuit_id is None or ir.in_any_composition(circuit_id):
            continue
        if ir.circuits[circuit_id].kind not in visible_kinds:
            continue
        preceded = any(
            e.circuit == circuit_id and e.kind in measure_kinds and e.seq < event.seq
            for e in ir.events
        )
        if not preceded:
            out.append(
                Warning(
                    "cond-wo-meas",
                    event.span,
                    "Conditional gate with no preceding measurement; "
                    "the condition is constant",
                    circuit=circuit_id,
                )
            )
    return out


def run_const_clas_bit(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """A qubit is measured although no operation ever transformed it."""
    out = []
    transforming = (EventKind.GATE, EventKind.RESET, EventKind.INITIALIZE)
    for event in ir.events:
        if event.kind is not EventKind.MEASUREMENT or event.circuit is None:
            continue
        circuit_id = event.circuit
        if ir.circuits[circuit_id].kind is not CircuitKind.CONSTRUCTOR:
            # Derived or externally built circuits have content we cannot see.
            continue
        if ir.has_unknown_operator(circuit_id) or ir.is_composition_parent(circuit_id):
            continue
        if any(
            e.circuit == circuit_id
            and e.kind is EventKind.INITIALIZE
            and not e.qubits
            for e in ir.events
        ):
            # An initialize with unresolved targets may touch any qubit.
            continue
        ref = event.qubits[0] if event.qubits else None
        if ref is None or not ref.is_resolved:
            continue
        assert ref.register is not None and ref.index is not None
        key = (circuit_id, ref.register, ref.index)
        touched = any(
            flow.event(other).kind in transforming and flow.before(other, event.id)
            for other in flow.timelines.get(key, ())
        )
        if not touched:
            out.append(
                Warning(
                    "const-clas-bit",
                    event.span,
                    f"Measurement of untransformed qubit {_qubit_label(ir, key)}; "
                    "the result is always 0",
                    circuit=circuit_id,
                )
            )
    return out


def _measured_qubit_demand(ir: QuantumIR, circuit: CircuitDecl) -> int | None:
    """Distinct qubits the circuit measures, or None when nothing is measured."""
    measured: set[tuple[str, int]] = set()
    saw_measurement = False
    for event in ir.events_of(circuit.id):
        if event.kind is EventKind.MEASUREMENT:
            saw_measurement = True
            for ref in event.qubits:
                if ref.is_resolved:
                    assert ref.register is not None and ref.index is not None
                    measured.add((ref.register, ref.index))
        elif event.kind is EventKind.MEASURE_ALL:
            saw_measurement = True
            if event.qubits:
                measured.update(
                    (r.register, r.index)
                    for r in event.qubits
                    if r.is_resolved and r.register is not None and r.index is not None
                )
            elif circuit.num_qubits.is_known and circuit.num_qubits.value:
                return circuit.num_qubits.value
    if not saw_measurement:
        return None
    return len(measured)


def run_insuff_clas_reg(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """The classical register cannot hold results for the qubits measured."""
    out = []
    for circuit in ir.circuits.values():
        if circuit.kind is not CircuitKind.CONSTRUCTOR:
            continue
        nq, nc = circuit.num_qubits, circuit.num_clbits
        if not (nq.is_known and nc.is_known):
            continue
        assert nq.value is not None and nc.value is not None
        if nq.value <= nc.value:
            continue
        if ir.is_subcircuit(circuit.id):
            continue
        demand = _measured_qubit_demand(ir, circuit)
        if demand is None:
            demand = nq.value
        if demand > nc.value:
            out.append(
                Warning(
                    "insuff-clas-reg",
                    circuit.span,
                    f"Circuit has {nq.value} qubits but only {nc.value} classical "
                    "bits, not enough to measure them all",
                    circuit=circuit.id,
                )
            )
    return out


def run_oversized_circuit(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """Some qubit slot of the circuit is never used by any operator."""
    from ..qir.model import absolute_index

    out = []
    for circuit in ir.circuits.values():
        if circuit.kind is not CircuitKind.CONSTRUCTOR:
            continue
        nq = circuit.num_qubits
        if not nq.is_known or not nq.value:
            continue
        if any(
            not ir.registers[reg_id].size.is_known
            for reg_id in circuit.quantum_registers
        ):
            continue
        events = ir.events_of(circuit.id)
        if any(e.kind is EventKind.UNKNOWN for e in events):
            continue
        if any(e.kind is EventKind.INITIALIZE for e in events):
            continue
        if ir.is_composition_parent(circuit.id):
            continue
        touched: set[int] = set()
        for event in events:
            for ref in event.qubits:
                if not ref.is_resolved or ref.register not in circuit.quantum_registers:
                    continue
                position = absolute_index(ir, circuit.id, ref)
                if position.is_known and position.value is not None:
                    touched.add(position.value)
        unused = sorted(set(range(nq.value)) - touched)
        if unused:
            listing = ", ".join(str(i) for i in unused)
            noun = "position" if len(unused) == 1 else "positions"
            out.append(
                Warning(
                    "oversized-circuit",
                    circuit.span,
                    f"Circuit has unused qubits ({noun} {listing})",
                    circuit=circuit.id,
                )
            )
    return out


def run_ghost_compose(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """compose() result is dropped, so the composition never happens."""
    out = []
    for call in ir.compose_calls:
        if call.bare_statement and not call.inplace_true:
            out.append(
                Warning(
                    "ghost-compose",
                    call.span,
                    "Result of compose() is not used; assign it or pass "
                    "inplace=True",
                    circuit=call.circuit,
                )
            )
    return out


def run_op_after_transp(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """An operator is appended to a circuit transpiled at optimization level 3."""
    out = []
    acting = (EventKind.GATE, EventKind.MEASUREMENT, EventKind.MEASURE_ALL)
    for event in ir.events:
        if event.kind not in acting or event.circuit is None:
            continue
        circuit = ir.circuits[event.circuit]
        if circuit.kind is not CircuitKind.TRANSPILED:
            continue
        level = circuit.transpile_opt_level
        if level.is_known and level.value == 3:
            out.append(
                Warning(
                    "op-after-transp",
                    event.span,
                    "Operator added to a circuit transpiled with "
                    "optimization_level=3; late additions defeat its passes",
                    circuit=event.circuit,
                )
            )
    return out


def run_old_iden_gate(ir: QuantumIR, flow: FlowRelation) -> list[Warning]:
    """The removed iden() identity-gate API is called on a circuit."""
    out = []
    for event in ir.events:
        if event.gate_name == "iden" and event.circuit is not None:
            out.append(
                Warning(
                    "old-iden-gate",
                    event.span,
                    "iden() was removed from the circuit API; use id() or i()",
                    circuit=event.circuit,
                )
            )
    return out
