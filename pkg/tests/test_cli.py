# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Unit tests for run configurations, the command session, the regression suite and the command line entry point
"""

import contextlib
import io
import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from frobsig.__main__ import main
from frobsig.frobsig import EXIT_OK, EXIT_USAGE, FrobSig, UsageError
from frobsig.report_printer import report_printer
from frobsig.runconfig import ConfigError, fixture_names, load_config, parse_config
from frobsig.splitting import SplittingReport, StabilizedIdeal, fsignature_estimate, splitting_prime
from frobsig.suite import collect_cases, lookup, run_case, suite_threads

KUMMER_COVER = {"base": {"vars": ["x"]}, "total": {"vars": ["y"]}, "images": ["y^2"], "basis": ["1", "y"]}


def run_main(folder, *args):
    """Runs main with the report written to a file and no settings file; returns the code and the report."""
    out = Path(folder) / "report.json"
    settings = Path(folder) / "no_settings.toml"
    with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
        code = main(list(args) + ["--format", "json", "--out", str(out), "--config", str(settings)])
    report = json.loads(out.read_text(encoding="utf-8")) if out.is_file() else None
    return code, report


class Test(unittest.TestCase):
    def test_fedder_command(self):
        """
        Test the Fedder verdict of the Fermat cubic at p = 3 through the command line
        """
        with tempfile.TemporaryDirectory() as folder:
            code, report = run_main(folder, "fedder", "fermat-cubic-p3")
        self.assertEqual(code, EXIT_OK, "fedder did not exit with 0")
        self.assertFalse(report["result"]["f_pure"], "Fermat cubic at p = 3 reported F-pure")
        self.assertEqual(report["header"]["p"], 3, "Characteristic missing from the header")
        self.assertEqual(report["exit_code"], EXIT_OK, "Exit code missing from the report")
        self.assertIn("frobsig_version", report["header"]["metadata"], "Metadata missing from the header")

    def test_cover_commands(self):
        """
        Test the trace and transposability of the Kummer cover through the command line
        """
        with tempfile.TemporaryDirectory() as folder:
            code, trace = run_main(folder, "cover-trace", "kummer-p5-trace")
            self.assertEqual(code, EXIT_OK, "cover-trace did not exit with 0")
            self.assertListEqual(trace["result"]["trace"], ["2", "0"], "Trace incorrect")
            code, found = run_main(folder, "transpose", "kummer-p5-trace", "--phi", "1")
            self.assertEqual(code, EXIT_OK, "Transposer and divisor criterion disagree")
            self.assertFalse(found["result"]["transposable"], "Φ(1·-) reported transposable along the trace")
            self.assertEqual(found["header"]["settings"]["phi"], "1", "Command line flag not echoed")

    def test_usage_errors(self):
        """
        Test missing configurations and csv output of a command without a table exit with 2
        """
        with tempfile.TemporaryDirectory() as folder:
            code, _ = run_main(folder, "fedder")
            self.assertEqual(code, EXIT_USAGE, "Missing configuration did not exit with 2")
            code, _ = run_main(folder, "fedder", str(Path(folder) / "missing.json"))
            self.assertEqual(code, EXIT_USAGE, "Missing configuration file did not exit with 2")
            stderr = io.StringIO()
            with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(stderr):
                code = main(["cover-trace", "kummer-p5-trace", "--format", "csv",
                             "--config", str(Path(folder) / "no_settings.toml")])
        self.assertEqual(code, EXIT_USAGE, "csv output of cover-trace did not exit with 2")
        self.assertTrue(stderr.getvalue().startswith("ERROR: "), "Usage error not reported on stderr")

    def test_parse_config_errors(self):
        """
        Test invalid run configurations name the first invalid field
        """
        mismatch = {"char": 5, "cover": dict(KUMMER_COVER, base={"char": 7, "vars": ["x"]})}
        with self.assertRaises(ConfigError, msg="Characteristic mismatch accepted") as caught:
            parse_config(mismatch)
        self.assertEqual(caught.exception.pointer, "cover.base.char", "Pointer of the mismatch incorrect")
        self.assertEqual(str(caught.exception), "cover.base.char: characteristic 7 differs from 5",
                         "Message of the mismatch incorrect")
        with self.assertRaises(ConfigError, msg="Unknown field accepted") as caught:
            parse_config({"char": 5, "ring": {"vars": ["x"]}, "colour": "blue"})
        self.assertEqual(caught.exception.pointer, "colour", "Pointer of the unknown field incorrect")
        with self.assertRaises(ConfigError, msg="Missing ring accepted") as caught:
            parse_config({"char": 5})
        self.assertEqual((caught.exception.pointer, caught.exception.message), ("ring", "missing"),
                         "Missing ring not reported")
        with self.assertRaises(ConfigError, msg="Unknown flag accepted") as caught:
            parse_config({"char": 5, "ring": {"vars": ["x"]}, "flags": {"speed": 3}})
        self.assertEqual(caught.exception.pointer, "flags.speed", "Pointer of the unknown flag incorrect")
        with self.assertRaises(ConfigError, msg="Malformed rational accepted"):
            parse_config({"char": 5, "ring": {"vars": ["x"]}, "flags": {"t": "1/0"}})
        with self.assertRaises(ConfigError, msg="Composite characteristic accepted"):
            parse_config({"char": 4, "ring": {"vars": ["x"]}})

    def test_parse_config(self):
        """
        Test a valid cover configuration is parsed with the base as the ring
        """
        config = parse_config({"char": 5, "cover": dict(KUMMER_COVER, T=["0", "1"]), "command": "cover-ram",
                               "flags": {"e_max": 2}}, "inline")
        self.assertEqual(config.p, 5, "Characteristic incorrect")
        self.assertEqual(config.cover.N, 2, "Cover rank incorrect")
        self.assertEqual(config.presentation.ambient.vars, config.cover.base.ambient.vars, "Ring is not the base")
        self.assertIsNotNone(config.section, "Section T not parsed")
        self.assertEqual(config.flags, {"e_max": 2}, "Flags not parsed")

    def test_fixtures(self):
        """
        Test every bundled fixture loads and a fixture is found by name with or without its suffix
        """
        names = fixture_names()
        self.assertIn("kummer-p5-trace.json", names, "Kummer fixture not bundled")
        for name in names:
            self.assertTrue(load_config(name).source.endswith(name), f"Fixture {name} not loaded")
        self.assertEqual(load_config("kummer-p5-trace").p, 5, "Fixture not found without its suffix")
        with self.assertRaises(ConfigError, msg="Missing fixture accepted"):
            load_config("no-such-fixture")

    def test_session(self):
        """
        Test flag precedence and commands that do not run on a single configuration
        """
        with tempfile.TemporaryDirectory() as folder, contextlib.redirect_stdout(io.StringIO()):
            session = FrobSig(str(Path(folder) / "no_settings.toml"), {"e_max": 4, "t": None})
        config = load_config("kummer-p5-trace")
        flags = session.flags_for(config, {"e_max": 3, "e_window": 1})
        self.assertEqual(flags["e_max"], 4, "Command line flag did not take precedence")
        self.assertEqual(flags["e_window"], 1, "Case flag not used")
        self.assertNotIn("t", flags, "Unset command line flag used")
        self.assertEqual(session.flags_for(config, use_cli=False)["e_max"], 2, "Configuration flag not used")
        with self.assertRaises(UsageError, msg="paper-suite ran on a configuration"):
            session.execute(config, "paper-suite", flags)
        with self.assertRaises(UsageError, msg="csv output without a table accepted"):
            session.write({}, None, "csv")

    def test_suite_case(self):
        """
        Test a suite case runs and passes and that dotted paths index lists
        """
        with tempfile.TemporaryDirectory() as folder, contextlib.redirect_stdout(io.StringIO()):
            session = FrobSig(str(Path(folder) / "no_settings.toml"))
        cases = collect_cases(["fermat-cubic-p3.json"])
        self.assertEqual(len(cases), 1, "Fermat cubic case not collected")
        row = run_case(session, cases[0])
        self.assertEqual(row["status"], "pass", f"Suite case did not pass: {row['observed']}")
        self.assertEqual(lookup({"a": [{"b": 1}, {"b": 2}]}, "a.1.b"), 2, "Dotted path lookup incorrect")

    def test_json_report_round_trip(self):
        """
        Test the json report of fsig and sp deserializes to the values the library returns
        """
        # Setup
        config = load_config("veronese-signature")

        # App result
        with tempfile.TemporaryDirectory() as folder:
            code, report = run_main(folder, "fsig", "veronese-signature", "--e-max", "2")
            sp_code, sp_report = run_main(folder, "sp", "cusp-p7", "--t", "1/2", "--e-max", "2")

        # Manual result
        expected = fsignature_estimate(config.presentation, config.spec, 2)
        cusp = load_config("cusp-p7")
        expected_sp = splitting_prime(cusp.presentation, cusp.spec.scale("1/2"), 2)

        # Compare
        self.assertEqual(code, EXIT_OK, "fsig did not exit with 0")
        self.assertEqual(SplittingReport.from_dict(report["result"]), expected, "fsig report differs from the library")
        self.assertEqual(sp_report["exit_code"], sp_code, "Exit code in the report differs from the process")
        self.assertEqual(StabilizedIdeal.from_dict(sp_report["result"], cusp.presentation.ambient), expected_sp,
                         "sp report differs from the library")

    def test_acceptance_cases(self):
        """
        Test the p = 2 Fedder verdict, the Veronese sections at p = 7, F_2 covers and the cusp at its threshold
        """
        with tempfile.TemporaryDirectory() as folder, contextlib.redirect_stdout(io.StringIO()):
            session = FrobSig(str(Path(folder) / "no_settings.toml"))
        cases = collect_cases(["f2-hypersurface.json", "veronese-2-2-p7.json", "veronese-2-3-p7.json",
                               "f2-cover.json", "cusp-p7.json"])
        names = [case.name for case in cases]
        for name in ("Fedder verdict p=2", "Powers of x, e=4", "Transposable e=2, a = (y^3 + uv)^3·z",
                     "Cusp tau at the threshold t=5/6"):
            self.assertIn(name, names, f"Suite case {name} missing")
        for case in cases:
            if case.command in ("fedder", "cover-trace", "cover-norm", "transpose") or "threshold" in case.name:
                row = run_case(session, case)
                self.assertEqual(row["status"], "pass", f"{case.name} did not pass: {row['observed']}")

    def test_suite_threads(self):
        """
        Test FROBSIG_THREADS overrides the settings and invalid values are ignored
        """
        settings = {"suite": {"threads": 3}}
        with mock.patch.dict(os.environ, {"FROBSIG_THREADS": "5"}):
            self.assertEqual(suite_threads(settings), 5, "FROBSIG_THREADS not used")
        with mock.patch.dict(os.environ, {"FROBSIG_THREADS": "many"}):
            self.assertEqual(suite_threads(settings), 3, "Invalid FROBSIG_THREADS not ignored")

    def test_report_printer(self):
        """
        Test nested reports are printed with indentation and flat lists on one line
        """
        lines = []
        report_printer({"header": {"command": "tau"}, "result": {"ideal": ["x"], "stabilized": True,
                                                                  "rows": [{"e": 1}]}}, 0, out=lines.append)
        self.assertListEqual(lines, ["header:", "    command: tau", "result:", "    ideal: [x]",
                                     "    stabilized: True", "    rows:", "        [0]", "            e: 1"],
                             "Printed report incorrect")


if __name__ == '__main__':
    unittest.main()
