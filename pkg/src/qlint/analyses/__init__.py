"""Rule catalog and the merged runner."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass

from ..qflow import FlowRelation
from ..qir.model import QuantumIR
from .rules import (
    Warning,
    run_cond_wo_meas,
    run_const_clas_bit,
    run_double_meas,
    run_ghost_compose,
    run_insuff_clas_reg,
    run_meas_all_abuse,
    run_old_iden_gate,
    run_op_after_meas,
    run_op_after_transp,
    run_oversized_circuit,
)

RuleFn = Callable[[QuantumIR, FlowRelation], list[Warning]]


@dataclass(frozen=True)
class Rule:
    id: str
    summary: str
    run: RuleFn
    default: bool


RULES: tuple[Rule, ...] = (
    Rule(
        "double-meas",
        "Two measurements read the same qubit one after the other",
        run_double_meas,
        default=True,
    ),
    Rule(
        "op-after-meas",
        "A gate operates on a qubit after it has been measured",
        run_op_after_meas,
        default=True,
    ),
    Rule(
        "meas-all-abuse",
        "measure_all() adds a new register although classical bits exist",
        run_meas_all_abuse,
        default=True,
    ),
    Rule(
        "cond-wo-meas",
        "Conditional gate without a measurement feeding its condition",
        run_cond_wo_meas,
        default=True,
    ),
    Rule(
        "const-clas-bit",
        "A qubit is measured but was never transformed",
        run_const_clas_bit,
        default=False,
    ),
    Rule(
        "insuff-clas-reg",
        "Classical bits do not suffice to measure the qubits used",
        run_insuff_clas_reg,
        default=False,
    ),
    Rule(
        "oversized-circuit",
        "The circuit allocates qubits it never uses",
        run_oversized_circuit,
        default=False,
    ),
    Rule(
        "ghost-compose",
        "compose() result is dropped, so nothing is composed",
        run_ghost_compose,
        default=True,
    ),
    Rule(
        "op-after-transp",
        "An operator is added after transpilation at optimization level 3",
        run_op_after_transp,
        default=True,
    ),
    Rule(
        "old-iden-gate",
        "The removed iden() identity-gate API is used",
        run_old_iden_gate,
        default=False,
    ),
)

RULE_IDS: tuple[str, ...] = tuple(rule.id for rule in RULES)
RULES_BY_ID: dict[str, Rule] = {rule.id: rule for rule in RULES}
DEFAULT_PROFILE: frozenset[str] = frozenset(r.id for r in RULES if r.default)
ALL_RULES: frozenset[str] = frozenset(RULE_IDS)


def run_all(
    ir: QuantumIR, flow: FlowRelation, enabled: Iterable[str] | None = None
) -> list[Warning]:
    """Run the enabled rules, deduplicate by (rule, span), sort by position."""
    rule_ids = ALL_RULES if enabled is None else set(enabled)
    unknown = rule_ids - ALL_RULES
    if unknown:
        raise ValueError(f"unknown rule ids: {sorted(unknown)}")
    merged: list[Warning] = []
    seen: set[tuple[str, tuple[str, int, int], str]] = set()
    for rule in RULES:
        if rule.id not in rule_ids:
            continue
        for warning in rule.run(ir, flow):
            # Dedup collapses repeats of one finding (for example from loop
            # iterations); distinct messages at one span are distinct findings.
            dedup_key = (warning.rule, warning.span.anchor(), warning.message)
            if dedup_key in seen:
                continue
            seen.add(dedup_key)
            merged.append(warning)
    merged.sort(key=Warning.sort_key)
    return merged


__all__ = [
    "ALL_RULES",
    "DEFAULT_PROFILE",
    "RULES",
    "RULES_BY_ID",
    "RULE_IDS",
    "Rule",
    "Warning",
    "run_all",
]
