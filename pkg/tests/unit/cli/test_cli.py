#!/usr/bin/env python3
"""
Unit tests for the command-line front end (rpq_workbench.cli).

These tests ensure that usage and config errors exit with 2, runtime
errors and must-pass failures exit with 1, and that errors are reported on
stderr instead of being swallowed.
"""
import io
import json
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

sys.path.insert(0, str(Path(__file__).parent.parent))

from colored_runner import run_tests

from rpq_workbench.brackets import Generator, super_virasoro_central
from rpq_workbench.cli import ExpressionParser, Program, WorkbenchCLI, evaluate_bracket
from rpq_workbench.deformation import preset
from rpq_workbench.errors import ExpressionParseError
from rpq_workbench.report import Cell, RunReport


class TestExpressionParser(unittest.TestCase):
    """Test parsing of bracket descriptors."""

    def setUp(self) -> None:
        """Set up test fixtures."""
        self.parser = ExpressionParser()

    def test_binary(self):
        """Test that a binary bracket parses to two generators"""
        self.assertEqual(self.parser.parse("[l 1, l 0]"), (Generator("l", 1), Generator("l", 0)))

    def test_signed_indices_and_spacing(self):
        """Test signed indices and optional whitespace"""
        self.assertEqual(
            self.parser.parse("[ l1 ,l +2,  G -3 ]"),
            (Generator("l", 1), Generator("l", 2), Generator("G", -3)),
        )

    def test_missing_open(self):
        """Test that a descriptor must start with '['"""
        with self.assertRaises(ExpressionParseError) as context:
            self.parser.parse("l 1, l 0]")
        self.assertEqual(context.exception.position, 0)
        self.assertIn("expected '['", str(context.exception))

    def test_bad_character_position(self):
        """Test that an unknown generator is reported at its position"""
        with self.assertRaises(ExpressionParseError) as context:
            self.parser.parse("[l 1, x 2]")
        self.assertEqual(context.exception.position, 6)
        self.assertIn("at position 6", str(context.exception))

    def test_missing_comma(self):
        """Test that two generators need a comma between them"""
        with self.assertRaises(ExpressionParseError) as context:
            self.parser.parse("[l 1 l 2]")
        self.assertEqual(context.exception.position, 5)

    def test_missing_close(self):
        """Test that an unterminated descriptor is reported at the end"""
        text = "[l 1, l 2"
        with self.assertRaises(ExpressionParseError) as context:
            self.parser.parse(text)
        self.assertEqual(context.exception.position, len(text))

    def test_trailing_input(self):
        """Test that nothing may follow the closing bracket"""
        with self.assertRaises(ExpressionParseError):
            self.parser.parse("[l 1, l 2] ,")

    def test_arity(self):
        """Test that brackets take between 2 and 6 generators"""
        with self.assertRaises(ExpressionParseError) as context:
            self.parser.parse("[l 1]")
        self.assertIn("2 to 6", str(context.exception))
        with self.assertRaises(ExpressionParseError):
            self.parser.parse("[" + ", ".join(f"l {k}" for k in range(7)) + "]")


class TestEvaluateBracket(unittest.TestCase):
    """Test evaluation of parsed brackets."""

    def setUp(self) -> None:
        """Set up test fixtures."""
        self.d = preset("jagannathan-srinivasa")

    def test_binary_central(self):
        """Test that [l_m, l_-m] carries the super Virasoro central coefficient"""
        result = evaluate_bracket(self.d, (Generator("l", 2), Generator("l", -2)))
        self.assertEqual(result.label, "[l_2, l_-2]")
        self.assertEqual(result.central, super_virasoro_central(self.d, 2))

    def test_odd_first_has_no_central(self):
        """Test that brackets opening with G carry no central coefficient"""
        result = evaluate_bracket(self.d, (Generator("G", 1), Generator("l", 2)))
        self.assertIsNone(result.central)
        self.assertEqual(result.op.parity, 1)

    def test_n_brackets(self):
        """Test bosonic and super n-bracket dispatch"""
        bosonic = evaluate_bracket(self.d, (Generator("l", 1), Generator("l", 0), Generator("l", -1)))
        self.assertEqual(bosonic.op.parity, 0)
        self.assertIsNone(bosonic.central)
        fermionic = evaluate_bracket(self.d, (Generator("l", 1), Generator("l", 2), Generator("G", 0)))
        self.assertEqual(fermionic.op.parity, 1)
        even = evaluate_bracket(self.d, tuple(Generator("l", m) for m in (2, -2, 3, -3)))
        self.assertIsNotNone(even.central)

    def test_unsupported_shape(self):
        """Test that G in a non-final slot of an n-bracket is rejected"""
        with self.assertRaises(ExpressionParseError):
            evaluate_bracket(self.d, (Generator("G", 1), Generator("l", 2), Generator("l", 0)))


class TestCommands(unittest.TestCase):
    """Test subcommands and exit codes."""

    def setUp(self) -> None:
        """Set up test fixtures."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def _run(self, argv):
        out, err = io.StringIO(), io.StringIO()
        with patch("sys.stdout", out), patch("sys.stderr", err):
            code = Program().main(argv)
        return code, out.getvalue(), err.getvalue()

    def test_list_presets(self):
        """Test that list-presets prints every preset with its checks"""
        code, out, _ = self._run(["list-presets"])
        self.assertEqual(code, 0)
        self.assertIn("jagannathan-srinivasa:", out)
        self.assertIn("tau = none", out)
        self.assertIn("ok   R(1,1)=0", out)

    def test_eval_text(self):
        """Test that eval prints the action on the basis window"""
        code, out, _ = self._run(["eval", "--preset", "arik-coon", "--expr", "[l 1, l 0]", "--window", "1"])
        self.assertEqual(code, 0)
        self.assertIn("[l_1, l_0] over arik-coon", out)
        self.assertIn("theta*t^1 ->", out)

    def test_eval_json(self):
        """Test that eval --json emits a parseable document"""
        code, out, _ = self._run(["eval", "--expr", "[l 2, l -2]", "--window", "2", "--json"])
        self.assertEqual(code, 0)
        document = json.loads(out)
        self.assertEqual(document["expression"], "[l_2, l_-2]")
        self.assertEqual(document["deformation"], "jagannathan-srinivasa")
        self.assertEqual(len(document["action"]), 10)
        self.assertIsNotNone(document["central"])

    def test_eval_parse_error_exit_code(self):
        """Test that a malformed expression exits 2 with an error on stderr"""
        code, out, err = self._run(["eval", "--expr", "[l 1, x 2]"])
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertIn("error: unexpected input", err)

    def test_unknown_preset_exit_code(self):
        """Test that an unknown preset exits 2"""
        code, _, err = self._run(["eval", "--preset", "arik", "--expr", "[l 1, l 0]"])
        self.assertEqual(code, 2)
        self.assertIn("unknown preset", err)

    def test_runtime_error_exit_code(self):
        """Test that unexpected errors exit 1 and are reported"""
        with patch("rpq_workbench.cli.evaluate_bracket", side_effect=RuntimeError("boom")):
            code, _, err = self._run(["eval", "--expr", "[l 1, l 0]"])
        self.assertEqual(code, 1)
        self.assertIn("error: boom", err)

    def test_missing_config_exit_code(self):
        """Test that verify with a missing config exits 2"""
        code, _, err = self._run(["verify", "--config", os.path.join(self.tmp.name, "none.yaml")])
        self.assertEqual(code, 2)
        self.assertIn("config file not found", err)

    def test_verify_writes_report(self):
        """Test that verify runs the configured suites and writes the report"""
        config = os.path.join(self.tmp.name, "run.yaml")
        report = os.path.join(self.tmp.name, "report.json")
        with open(config, "w", encoding="utf-8") as f:
            f.write("preset: jagannathan-srinivasa\nsuites: [tau-identities]\n")
        code, out, _ = self._run(["verify", "--config", config, "--out", report, "--jobs", "2"])
        self.assertEqual(code, 0)
        self.assertIn("must_pass_failures=0", out)
        with open(report, encoding="utf-8") as f:
            document = json.load(f)
        self.assertEqual(document["config"]["suites"], ["tau-identities"])
        self.assertEqual(document["summary"]["fail"], 0)

    def test_unwritable_report_still_prints_verdicts(self):
        """Test that verify prints the summary before a report write error exits 1"""
        config = os.path.join(self.tmp.name, "run.yaml")
        with open(config, "w", encoding="utf-8") as f:
            f.write("preset: jagannathan-srinivasa\nsuites: [tau-identities]\n")
        missing = os.path.join(self.tmp.name, "no-such-dir", "report.json")
        code, out, err = self._run(["verify", "--config", config, "--out", missing])
        self.assertEqual(code, 1)
        self.assertIn("must_pass_failures=0", out)
        self.assertIn("Cannot write report", err)
        self.assertFalse(os.path.exists(missing))

    def test_must_pass_failure_exit_code(self):
        """Test that verify exits 1 and lists the failure when a must-pass identity fails"""
        config = os.path.join(self.tmp.name, "run.yaml")
        with open(config, "w", encoding="utf-8") as f:
            f.write("preset: arik-coon\nsuites: [crochet3]\n")
        failing = Cell("crochet3", "arik-coon", (0, 1), must_pass=True).failed({"basis": "t^1"})
        fake = RunReport("0.1.0", {}, (failing,))
        with patch.object(WorkbenchCLI, "_run", return_value=fake):
            code, out, _ = self._run(["verify", "--config", config])
        self.assertEqual(code, 1)
        self.assertIn("FAIL crochet3 [0, 1] [must-pass]", out)

    def test_missing_subcommand(self):
        """Test that argparse usage errors exit 2 after printing help"""
        with patch("sys.stderr", io.StringIO()) as err:
            with self.assertRaises(SystemExit) as context:
                WorkbenchCLI().run([])
        self.assertEqual(context.exception.code, 2)
        self.assertIn("Examples:", err.getvalue())


if __name__ == '__main__':
    sys.exit(run_tests(sys.modules[__name__], "Command Line"))
