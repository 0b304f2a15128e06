#!/usr/bin/env python3
"""
Command-line front end: list-presets, eval and verify.

Exit codes: 0 success, 1 must-pass failure or runtime error, 2 usage or
config error.
"""

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

from . import __version__
from .brackets import (
    MAX_ARITY,
    Generator,
    central_term_2n,
    cs_term,
    generator_bracket,
    n_bracket_bosonic,
    n_bracket_super,
    super_virasoro_binary,
)
from .config import ConfigLoader, RunConfig, resolve_deformation
from .debuglog import DebugLog
from .deformation import Deformation, preset, preset_description, preset_names, validate
from .errors import ConfigError, ExpressionParseError, UnknownPreset
from .exactnum import Scalar
from .operators import GradedOperator, action_table
from .report import ReportStore, RunReport, report_lines
from .suites import SuiteContext, SuiteRunner

USAGE_ERRORS = (ConfigError, ExpressionParseError, UnknownPreset)


@dataclass(frozen=True)
class BracketResult:
    label: str
    op: GradedOperator
    central: Optional[Scalar] = None


class ExpressionParser:
    """Parses bracket descriptors such as ``[l 1, l 0]`` or ``[l 1, l 0, G -2]``."""

    token_re = re.compile(
        r"""
        (?P<space>\s+)
        | (?P<open>\[)
        | (?P<close>\])
        | (?P<comma>,)
        | (?P<kind>[lG])\s*(?P<index>[+-]?\d+)
        """,
        re.VERBOSE,
    )

    def tokens(self, text: str) -> List[Tuple[str, Any, int]]:
        tokens: List[Tuple[str, Any, int]] = []
        pos = 0
        for m in self.token_re.finditer(text):
            if m.start() != pos:
                break
            pos = m.end()
            if m.group("space"):
                continue
            if m.group("kind"):
                tokens.append(("gen", Generator(m.group("kind"), int(m.group("index"))), m.start()))
            else:
                tokens.append((m.lastgroup or "", m.group(0), m.start()))
        if pos != len(text):
            raise ExpressionParseError(f"unexpected input {text[pos:pos + 10]!r}", pos)
        return tokens

    def parse(self, text: str) -> Tuple[Generator, ...]:
        tokens = self.tokens(text)
        if not tokens or tokens[0][0] != "open":
            raise ExpressionParseError("expected '['", tokens[0][2] if tokens else 0)
        generators: List[Generator] = []
        expect_generator = True
        for kind, value, position in tokens[1:]:
            if expect_generator:
                if kind != "gen":
                    raise ExpressionParseError("expected a generator like 'l 1' or 'G -2'", position)
                generators.append(value)
                expect_generator = False
            elif kind == "comma":
                expect_generator = True
            elif kind == "close":
                if position != tokens[-1][2]:
                    raise ExpressionParseError("unexpected input after ']'", tokens[-1][2])
                return self._checked(tuple(generators), position)
            else:
                raise ExpressionParseError("expected ',' or ']'", position)
        raise ExpressionParseError("missing closing ']'", len(text))

    def _checked(self, generators: Tuple[Generator, ...], position: int) -> Tuple[Generator, ...]:
        if not 2 <= len(generators) <= MAX_ARITY:
            raise ExpressionParseError(f"brackets take 2 to {MAX_ARITY} generators, got {len(generators)}", position)
        return generators


def evaluate_bracket(d: Deformation, generators: Sequence[Generator]) -> BracketResult:
    """Operator (and central coefficient where one is defined) of a bracket descriptor."""
    label = "[" + ", ".join(g.label() for g in generators) + "]"
    if len(generators) == 2:
        a, b = generators
        op = generator_bracket(d, a, b, a.operator(d), b.operator(d))
        central = None
        if a.kind == "l" and d.has_tau:
            central = super_virasoro_binary(d, a.index, b.index, "ll" if b.kind == "l" else "lG").central
        return BracketResult(label, op, central)
    kinds = "".join(g.kind for g in generators)
    ms = [g.index for g in generators]
    even_arity = len(ms) % 2 == 0
    if set(kinds) == {"l"}:
        central = central_term_2n(d, ms) if even_arity and d.has_tau else None
        return BracketResult(label, n_bracket_bosonic(d, ms), central)
    if kinds[:-1] == "l" * (len(kinds) - 1):
        central = cs_term(d, ms) if even_arity and d.has_tau else None
        return BracketResult(label, n_bracket_super(d, ms), central)
    raise ExpressionParseError(f"n-brackets need l generators with at most a final G, got {label}")


class WorkbenchCLI:
    def __init__(self) -> None:
        self.parser = self._build_parser()

    def run(self, argv: Sequence[str]) -> int:
        args = self.parser.parse_args(argv)
        debug = DebugLog(args.debug)
        try:
            if args.command == "list-presets":
                return self.cmd_list_presets(debug)
            if args.command == "eval":
                return self.cmd_eval(args, debug)
            return self.cmd_verify(args, debug)
        except USAGE_ERRORS as e:
            self._emit_error(str(e))
            return 2
        except Exception as e:
            self._emit_error(str(e))
            return 1

    def cmd_list_presets(self, debug: DebugLog) -> int:
        for name in preset_names():
            d = preset(name, debug)
            sys.stdout.write(f"{name}: {preset_description(name)}\n")
            sys.stdout.write(f"  R   = {d.R.render()}\n")
            sys.stdout.write(f"  phi = {d.phi.render()}\n")
            if d.tau is not None:
                sys.stdout.write(f"  tau = ({d.tau.tau1.render()}, {d.tau.tau2.render()})\n")
            else:
                sys.stdout.write("  tau = none\n")
            for check in validate(d):
                sys.stdout.write(f"  {'ok  ' if check.passed else 'FAIL'} {check.name}: {check.detail}\n")
            for note in d.notes:
                sys.stdout.write(f"  note: {note}\n")
        return 0

    def cmd_eval(self, args: argparse.Namespace, debug: DebugLog) -> int:
        d = preset(args.preset, debug)
        generators = ExpressionParser().parse(args.expr)
        result = evaluate_bracket(d, generators)
        rows = action_table(result.op, args.window)
        if args.json:
            document = {
                "expression": result.label,
                "deformation": d.name,
                "action": dict(rows),
                "central": result.central.render() if result.central is not None else None,
            }
            sys.stdout.write(json.dumps(document, indent=2, sort_keys=True) + "\n")
            return 0
        sys.stdout.write(f"{result.label} over {d.name}\n")
        for basis, image in rows:
            sys.stdout.write(f"  {basis:>12} -> {image}\n")
        if result.central is not None:
            sys.stdout.write(f"  central: {result.central.render()}\n")
        return 0

    def cmd_verify(self, args: argparse.Namespace, debug: DebugLog) -> int:
        config = ConfigLoader(debug).load(args.config)
        output = args.out or config.output
        jobs = args.jobs or config.jobs
        started = time.monotonic()
        report = self._run(config, jobs, debug)
        report = RunReport(report.tool_version, report.config, report.reports, time.monotonic() - started)
        for line in report_lines(list(report.reports)):
            if args.verbose or not line.startswith("ok"):
                sys.stdout.write(line + "\n")
        summary = report.summary
        sys.stdout.write(
            f"pass={summary['pass']} fail={summary['fail']} skipped={summary['skipped']} "
            f"must_pass_failures={summary['must_pass_failures']}\n"
        )
        sys.stdout.flush()
        if output:
            ReportStore(debug).save(output, report)
        return 1 if report.must_pass_failed else 0

    def _run(self, config: RunConfig, jobs: int, debug: DebugLog) -> RunReport:
        d = resolve_deformation(config, debug)
        ctx = SuiteContext(d, config.window, config.prefactor_variant, config.truncation, debug)
        reports = SuiteRunner(ctx, jobs, debug).run(config.suites)
        return RunReport(__version__, dict(config.echo), tuple(reports))

    def _build_parser(self) -> argparse.ArgumentParser:
        class FriendlyParser(argparse.ArgumentParser):
            def error(self, message):  # type: ignore[override]
                self.print_help(sys.stderr)
                self.exit(2, f"\nerror: {message}\n")

        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--debug", action="store_true", help="Print debug info to stderr")

        p = FriendlyParser(
            prog="rpq-workbench",
            description="Exact checks of R(p,q)-deformed super Witt and Virasoro identities.",
            formatter_class=argparse.RawTextHelpFormatter,
            epilog=(
                "Examples:\n"
                "  rpq-workbench list-presets\n"
                "  rpq-workbench eval --preset jagannathan-srinivasa --expr '[l 1, l 0]'\n"
                "  rpq-workbench eval --preset arik-coon --expr '[l 1, l 0, l -1]' --window 4\n"
                "  rpq-workbench verify --config run.yaml --out report.json\n"
                "  rpq-workbench verify --config run.yaml --jobs 4 --debug\n"
            ),
        )
        p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
        sub = p.add_subparsers(dest="command", required=True, parser_class=FriendlyParser)

        sub.add_parser("list-presets", parents=[common], help="List deformation presets and their invariant checks")

        ev = sub.add_parser("eval", parents=[common], help="Evaluate one bracket on the basis window")
        ev.add_argument("--preset", default="jagannathan-srinivasa", help="Deformation preset name")
        ev.add_argument("--expr", required=True, help="Bracket descriptor, e.g. '[l 1, G 2]'")
        ev.add_argument("--window", type=int, default=3, help="Show t^n and theta*t^n for |n| <= window")
        ev.add_argument("--json", action="store_true", help="Emit JSON instead of text")

        ve = sub.add_parser("verify", parents=[common], help="Run verification suites from a config file")
        ve.add_argument("--config", required=True, help="YAML or JSON run config")
        ve.add_argument("--out", default=None, help="Report path (overrides 'output' in the config)")
        ve.add_argument("--jobs", type=int, default=None, help="Worker threads (overrides 'jobs' in the config)")
        ve.add_argument("--verbose", action="store_true", help="List passing verdicts too")
        return p

    def _emit_error(self, message: str) -> None:
        sys.stderr.write(f"error: {message}\n")


class Program:
    def main(self, argv: Sequence[str]) -> int:
        return WorkbenchCLI().run(argv)


def main() -> int:
    return Program().main(sys.argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
