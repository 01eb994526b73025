"""Labeled corpus checks plus the structural invariant suites."""

from __future__ import annotations

import random

import pytest
from conftest import warnings_for
from corpus_defs import CASES

from qlint import Config, analyze_pipeline, analyze_source
from qlint.analyses import ALL_RULES, RULE_IDS, run_all
from qlint.qir import EventKind

_CONFIG = Config(rules=ALL_RULES)

_BUGGY = [c for c in CASES if c.buggy]
_CLEAN = [c for c in CASES if not c.buggy]


def _case_id(case):
    return f"{case.rule}/{case.name}"


class TestCorpusShape:
    def test_at_least_six_of_each_kind_per_rule(self):
        for rule in RULE_IDS:
            assert sum(1 for c in _BUGGY if c.rule == rule) >= 6
            assert sum(1 for c in _CLEAN if c.rule == rule) >= 6
        assert len(CASES) >= 120


@pytest.mark.parametrize("case", _BUGGY, ids=_case_id)
def test_seeded_bug_detected(case):
    warnings = warnings_for(case.source, f"{case.rule}_{case.name}.py")
    hits = [w for w in warnings if w.rule == case.rule]
    assert hits, f"{case.rule} missed its seeded bug"
    if case.line is not None:
        assert any(w.span.line == case.line for w in hits)


@pytest.mark.parametrize("case", _CLEAN, ids=_case_id)
def test_clean_twin_produces_no_warning(case):
    warnings = warnings_for(case.source, f"{case.rule}_{case.name}.py")
    assert [w for w in warnings if w.rule == case.rule] == []


class TestExclusionSoundness:
    def test_no_precision_rule_fires_on_tainted_circuits(self):
        """const-clas-bit and oversized-circuit never fire where unknown
        operators exist, across the whole labeled corpus."""
        guarded = {"const-clas-bit", "oversized-circuit"}
        for case in CASES:
            result = analyze_pipeline(case.source, "case.py", _CONFIG)
            tainted = {
                e.circuit
                for e in result.ir.events
                if e.kind is EventKind.UNKNOWN and e.circuit
            }
            for warning in result.warnings:
                if warning.rule in guarded and warning.circuit is not None:
                    assert warning.circuit not in tainted, _case_id(case)


class TestMonotoneConfiguration:
    def test_warnings_grow_with_the_rule_set(self):
        rng = random.Random(11)
        sources = [c.source for c in CASES[::7]]
        for source in sources:
            result = analyze_pipeline(source, "case.py", _CONFIG)
            for _ in range(6):
                smaller = frozenset(
                    r for r in RULE_IDS if rng.random() < 0.5
                )
                extra = frozenset(
                    r for r in RULE_IDS if rng.random() < 0.5
                )
                larger = smaller | extra
                got_small = {
                    (w.rule, w.span.line, w.message)
                    for w in run_all(result.ir, result.flow, smaller)
                }
                got_large = {
                    (w.rule, w.span.line, w.message)
                    for w in run_all(result.ir, result.flow, larger)
                }
                assert got_small <= got_large


class TestFixClosure:
    def test_every_rule_has_matched_bug_and_clean_names(self):
        # Each rule's clean twins document the fix for its seeded bugs.
        for rule in RULE_IDS:
            fixed = [c for c in _CLEAN if c.rule == rule]
            assert fixed, rule

    def test_corpus_files_on_disk(self, labeled_corpus_dir):
        files = sorted(labeled_corpus_dir.glob("*.py"))
        assert len(files) == len(CASES)
        for path in files:
            outcome = analyze_source(path.read_text("utf-8"), str(path), _CONFIG)
            assert outcome.skipped is None
