#!/usr/bin/env python3
"""
Unit tests for verdict records and the JSON run report (rpq_workbench.report).

Report writes must fail loudly (missing directory, permissions) instead of
leaving a partial file behind.
"""
import json
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

sys.path.insert(0, str(Path(__file__).parent.parent))

from colored_runner import run_tests

from rpq_workbench.debuglog import DebugLog
from rpq_workbench.deformation import preset
from rpq_workbench.errors import DegenerateWeights, WorkbenchError
from rpq_workbench.exactnum import PQ
from rpq_workbench.operators import l_op
from rpq_workbench.report import (
    Cell,
    IdentityReport,
    ReportStore,
    RunReport,
    report_lines,
    strip_wall_time,
    summarize,
)


def _sample_reports():
    ok = Cell("bell", "jagannathan-srinivasa", (2,), must_pass=True).passed()
    bad = Cell("crochet1", "jagannathan-srinivasa", (1, 0), {"basis_window": 2}).failed({"basis": "t^1"})
    skip = Cell("gsva:ll", "quesne", (1, 1)).skipped("MissingTauFactorization: no tau")
    return [ok, bad, skip]


class TestCells(unittest.TestCase):
    """Test building verdicts from cells."""

    def test_failure_needs_counterexample(self):
        """Test that a failing IdentityReport without counterexample is rejected"""
        with self.assertRaises(ValueError):
            IdentityReport("bell", "x", (1,), {}, "fail")

    def test_failed_records_indices(self):
        """Test that counterexamples carry the cell indices"""
        report = Cell("crochet1", "d", (1, -1)).failed({"basis": "t^0"})
        self.assertEqual(report.counterexample["indices"], [1, -1])
        self.assertFalse(report.passed)

    def test_sort_key_orders_indices_numerically(self):
        """Test that negative and multi-digit indices sort by value, ints before labels"""
        indices = [(10,), (2,), (-1, 0), (-2, 5), (1, 2, 3, "swap 0"), (1, 2, 3, 4)]
        reports = [Cell("antisymmetry", "d", ms).passed() for ms in indices]
        ordered = [r.indices for r in sorted(reports, key=lambda r: r.sort_key())]
        self.assertEqual(ordered, [(-2, 5), (-1, 0), (1, 2, 3, 4), (1, 2, 3, "swap 0"), (2,), (10,)])

    def test_compare_scalars(self):
        """Test scalar comparison verdicts and their difference field"""
        cell = Cell("deformed-numbers", "d", (2,))
        p, q = PQ.gen("p"), PQ.gen("q")
        self.assertTrue(cell.compare_scalars(p + q, q + p).passed)
        failed = cell.compare_scalars(p, q, "[2]")
        self.assertEqual(failed.counterexample["quantity"], "[2]")
        self.assertEqual(failed.counterexample["difference"], "p - q")

    def test_compare_operators(self):
        """Test that operator comparison reports the first differing basis element"""
        d = preset("jagannathan-srinivasa")
        cell = Cell("witt3", d.name, (1,))
        self.assertTrue(cell.compare_operators(l_op(d, 1), l_op(d, 1), 2).passed)
        failed = cell.compare_operators(l_op(d, 1), l_op(d, 2), 2)
        self.assertEqual(failed.counterexample["basis"], "t^1")

    def test_guard_skips_degenerate_inputs(self):
        """Test that skippable errors become skipped verdicts"""
        cell = Cell("crochet1", "d", (0, 0))

        def compute():
            raise DegenerateWeights("denominator vanishes")

        report = cell.guard(compute)
        self.assertEqual(report.verdict, "skipped")
        self.assertIn("DegenerateWeights", report.reason)

    def test_guard_propagates_other_errors(self):
        """Test that non-skippable errors are not swallowed"""
        cell = Cell("crochet1", "d", (0, 0))

        def compute():
            raise RuntimeError("bug")

        with self.assertRaises(RuntimeError):
            cell.guard(compute)


class TestRunReport(unittest.TestCase):
    """Test summaries and JSON rendering."""

    def test_summary(self):
        """Test verdict counts and must-pass tracking"""
        summary = summarize(_sample_reports())
        self.assertEqual(summary, {"pass": 1, "fail": 1, "skipped": 1, "must_pass_failures": 0})
        must = Cell("crochet3", "d", (0, 1), must_pass=True).failed({"basis": "t^0"})
        report = RunReport("0.1.0", {}, tuple(_sample_reports()) + (must,))
        self.assertTrue(report.must_pass_failed)

    def test_json_is_deterministic(self):
        """Test that equal reports serialize to identical JSON"""
        first = RunReport("0.1.0", {"preset": "x"}, tuple(_sample_reports()), 2.5)
        second = RunReport("0.1.0", {"preset": "x"}, tuple(_sample_reports()), 2.5)
        self.assertEqual(first.to_json(), second.to_json())
        document = json.loads(first.to_json())
        self.assertEqual(document["schema_version"], 1)
        self.assertEqual(document["wall_time_seconds"], 2.5)

    def test_strip_wall_time(self):
        """Test that only the wall time differs between reruns"""
        first = json.loads(RunReport("0.1.0", {}, tuple(_sample_reports()), 1.0).to_json())
        second = json.loads(RunReport("0.1.0", {}, tuple(_sample_reports()), 9.0).to_json())
        self.assertNotEqual(first, second)
        self.assertEqual(strip_wall_time(first), strip_wall_time(second))

    def test_report_lines(self):
        """Test the one-line verdict summaries"""
        lines = report_lines(_sample_reports())
        self.assertEqual(lines[0], "ok   bell [2] [must-pass]")
        self.assertTrue(lines[1].startswith("FAIL crochet1 [1, 0]"))
        self.assertTrue(lines[2].startswith("skip gsva:ll"))


class TestReportStore(unittest.TestCase):
    """Test atomic report writes."""

    def setUp(self) -> None:
        """Set up test fixtures."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.store = ReportStore(DebugLog(enabled=False))
        self.report = RunReport("0.1.0", {"preset": "x"}, tuple(_sample_reports()))

    def test_save_and_load(self):
        """Test that a saved report loads back with its summary and no temp file"""
        path = os.path.join(self.tmp.name, "report.json")
        self.store.save(path, self.report)
        self.assertFalse(os.path.exists(path + ".tmp"))
        self.assertEqual(self.store.load(path)["summary"]["fail"], 1)

    def test_missing_directory(self):
        """Test that writing into a missing directory raises WorkbenchError"""
        path = os.path.join(self.tmp.name, "missing", "report.json")
        with self.assertRaises(WorkbenchError) as context:
            self.store.save(path, self.report)
        self.assertIn("does not exist", str(context.exception))

    def test_write_failure_cleans_up(self):
        """Test that an OSError during replace is reported and the temp file removed"""
        path = os.path.join(self.tmp.name, "report.json")
        with patch("rpq_workbench.report.os.replace", side_effect=OSError("read-only")):
            with self.assertRaises(WorkbenchError) as context:
                self.store.save(path, self.report)
        self.assertIn("Check permissions", str(context.exception))
        self.assertFalse(os.path.exists(path + ".tmp"))
        self.assertFalse(os.path.exists(path))


if __name__ == '__main__':
    sys.exit(run_tests(sys.modules[__name__], "Run Reports"))
