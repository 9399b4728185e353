# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Command session: merges the settings layers, runs one command on a run configuration and writes the report.

Settings precedence is command line flags, then the run configuration, then the settings file, then the built-in
defaults. The effective flags are echoed in every report header.

"""

import json
import logging
import sys
from dataclasses import dataclass
from typing import Optional

import pandas as pd

from frobsig.cartier import FullSpec, PMinusLinearMap, PairSpec, fedder_data
from frobsig.covers import (f_torsion_exponent, find_generator_and_rho, min_poly, norm_element, trace_map, transpose,
                            transposability_divisor_check)
from frobsig.functions import add_metadata, find_config, merge_settings
from frobsig.ideals import colength
from frobsig.pairs import PairContext, sigma, tau
from frobsig.polys import ParseError, poly_format
from frobsig.report_printer import report_printer
from frobsig.runconfig import ConfigError
from frobsig.splitting import fedder_fpure, fsignature_estimate, nonsplit_ideal, splitting_number, splitting_prime, \
    splitting_ratio
from frobsig.verify import verify_fsig_rule, verify_sandwich, verify_sigma_rule, verify_sp_rule, verify_tau_rule

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_UNSTABLE = 3

TABLE_COMMANDS = ("ae", "fsig", "ratio", "paper-suite")


class UsageError(ValueError):
    """A command that cannot run with the given flags or output format."""


@dataclass
class Outcome:
    """
    Result of one command.

    Attributes:
        command (str): The command
        result (dict): JSON-ready result
        code (int): Exit code derived from the result
        frame (DataFrame): Per-e table, None for commands without one
    """
    command: str
    result: dict
    code: int = EXIT_OK
    frame: Optional[pd.DataFrame] = None


def _rule_code(report):
    if not report.holds:
        return EXIT_FAILED
    return EXIT_OK if report.stabilized else EXIT_UNSTABLE


class FrobSig:
    """
    One command line session.

    Attributes:
        settings (dict): Built-in defaults overlaid with the settings file
        cli_flags (dict): Flags given on the command line
    """

    def __init__(self, settings_file=None, cli_flags=None):
        self.settings = merge_settings(find_config(settings_file))
        self.cli_flags = {k: v for k, v in (cli_flags or {}).items() if v is not None}

    def flags_for(self, config, case_flags=None, use_cli=True):
        """Effective flags for a run: defaults, settings file, run configuration, suite case, command line."""
        flags = dict(self.settings["defaults"])
        if config is not None:
            flags.update(config.flags)
        flags.update(case_flags or {})
        if use_cli:
            flags.update(self.cli_flags)
        return flags

    def execute(self, config, command, flags):
        """
        Run ``command`` on ``config``.

        Returns:
            Outcome

        Raises:
            ConfigError: If the configuration lacks a block the command needs
            UsageError: If a flag the command needs is missing
            ValueError: For precondition violations of the library
        """
        handler = getattr(self, "_" + command.replace("-", "_"), None)
        if handler is None or command == "paper-suite":
            raise UsageError(f"{command} does not run on a single configuration")
        logger.info("running %s on %s", command, config.source)
        return handler(config, flags)

    # Ring commands

    def _spec(self, config, flags):
        spec = config.spec
        if "t" in flags:
            if not isinstance(spec, PairSpec):
                raise UsageError("--t scales a pair; the configuration has no pair")
            spec = spec.scale(flags["t"])
        return spec

    def _fedder(self, config, flags):
        P = config.presentation
        f_pure = fedder_fpure(P)
        data = fedder_data(FullSpec(), P, 1)
        result = {"f_pure": f_pure, "verdict": "F-pure" if f_pure else "not F-pure", "fedder_ideal": data.U.to_list()}
        return Outcome("fedder", result)

    def _ae(self, config, flags):
        P = config.presentation
        spec = self._spec(config, flags)
        degrees = [flags["e"]] if "e" in flags else list(range(1, flags["e_max"] + 1))
        rows = []
        for e in degrees:
            row = {"e": e, "q": P.p ** e, "a_e": splitting_number(P, spec, e, method=flags["method"])}
            if flags.get("check"):
                row["colength"] = colength(nonsplit_ideal(P, spec, e, check=True))
                row["consistent"] = row["colength"] == row["a_e"]
            rows.append(row)
        code = EXIT_OK if all(r.get("consistent", True) for r in rows) else EXIT_FAILED
        return Outcome("ae", {"rows": rows}, code, pd.DataFrame(rows))

    def _fsig(self, config, flags):
        report = fsignature_estimate(config.presentation, self._spec(config, flags), flags["e_max"],
                                     method=flags["method"])
        return Outcome("fsig", report.to_dict(), EXIT_OK if report.stabilized else EXIT_UNSTABLE, report.to_frame())

    def _sp(self, config, flags):
        sp = splitting_prime(config.presentation, self._spec(config, flags), flags["e_max"],
                             degree_bound=flags.get("degree_bound"))
        return Outcome("sp", sp.to_dict(), EXIT_OK if sp.stabilized else EXIT_UNSTABLE)

    def _ratio(self, config, flags):
        try:
            report = splitting_ratio(config.presentation, self._spec(config, flags), flags["e_max"],
                                     degree_bound=flags.get("degree_bound"))
        except ValueError as err:
            if "not F-pure" not in str(err):
                raise
            return Outcome("ratio", {"f_pure": False, "note": str(err)})
        return Outcome("ratio", report.to_dict(), EXIT_OK if report.stabilized else EXIT_UNSTABLE, report.to_frame())

    def _pair(self, config, flags):
        spec = self._spec(config, flags)
        if isinstance(spec, PairSpec):
            return PairContext(config.presentation, spec.divisor, spec.ideal_part)
        if isinstance(spec, FullSpec):
            return PairContext(config.presentation)
        raise UsageError("test ideals need a pair or the full algebra")

    def _tau(self, config, flags):
        found = tau(self._pair(config, flags), flags["e_window"])
        return Outcome("tau", found.to_dict(), EXIT_OK if found.stabilized else EXIT_UNSTABLE)

    def _sigma(self, config, flags):
        found = sigma(self._pair(config, flags), flags["e_window"])
        return Outcome("sigma", found.to_dict(), EXIT_OK if found.stabilized else EXIT_UNSTABLE)

    # Cover commands

    def _cover(self, config):
        if config.cover is None:
            raise ConfigError("cover", "missing; the command needs a cover block")
        return config.cover, config.section if config.section is not None else trace_map(config.cover)

    def _element(self, config, flags):
        cover, _ = self._cover(config)
        if "element" in flags:
            try:
                return cover.total.ambient.parse(flags["element"])
            except ParseError as err:
                raise UsageError(f"--element: {err}") from None
        if "element" in config.extras:
            return config.extras["element"]
        raise UsageError("no element given; use --element or cover.element")

    def _cover_trace(self, config, flags):
        cover, T = self._cover(config)
        trace = trace_map(cover)
        witness = T.maximal_witness()
        result = {"N": cover.N, "basis": [poly_format(b) for b in cover.basis],
                  "trace": [poly_format(v) for v in trace.values], "section": [poly_format(v) for v in T.values],
                  "section_of_one": poly_format(T(cover.total.ambient.one)),
                  "maximal_witness": poly_format(witness) if witness is not None else None}
        return Outcome("cover-trace", result)

    def _cover_norm(self, config, flags):
        cover, _ = self._cover(config)
        s = self._element(config, flags)
        result = {"element": poly_format(s), "norm": poly_format(norm_element(cover, s)),
                  "coordinates": [poly_format(c) for c in cover.coordinates(s)]}
        return Outcome("cover-norm", result)

    def _cover_minpoly(self, config, flags):
        cover, _ = self._cover(config)
        s = self._element(config, flags)
        ring, poly = min_poly(cover, s)
        result = {"element": poly_format(s), "variable": ring.vars[0], "min_poly": poly_format(poly),
                  "degree": poly.degree()}
        return Outcome("cover-minpoly", result)

    def _cover_ram(self, config, flags):
        cover, T = self._cover(config)
        ram = find_generator_and_rho(cover, T, flags.get("degree_bound") or 0)
        k = f_torsion_exponent(cover, ram.rho)
        result = {"N": cover.N, **ram.to_dict(), "k": k, "f_torsion": k == cover.N}
        return Outcome("cover-ram", result)

    def _transpose(self, config, flags):
        cover, T = self._cover(config)
        if "phi" in flags:
            try:
                u = cover.base.ambient.parse(flags["phi"])
            except ParseError as err:
                raise UsageError(f"--phi: {err}") from None
        elif "phi" in config.extras:
            u = config.extras["phi"]
        else:
            raise UsageError("no map given; use --phi or cover.phi")
        e = flags.get("e", 1)
        phi = PMinusLinearMap(e, u, cover.base)
        ram = find_generator_and_rho(cover, T, flags.get("degree_bound") or 0)
        found = transpose(cover, T, phi, ram)
        verdict, predicted = transposability_divisor_check(cover, ram, phi)
        result = {"e": e, "phi": poly_format(phi.u), **found.to_dict(), "criterion": verdict,
                  "predicted_divisor": predicted.to_list() if predicted is not None else None,
                  "agree": verdict == found.transposable}
        return Outcome("transpose", result, EXIT_OK if result["agree"] else EXIT_FAILED)

    def _verify_fsig(self, config, flags):
        cover, T = self._cover(config)
        report = verify_fsig_rule(cover, T, self._spec(config, flags), flags["e_max"], method=flags["method"])
        return Outcome("verify-fsig", report.to_dict(), _rule_code(report))

    def _verify_sp(self, config, flags):
        cover, T = self._cover(config)
        report = verify_sp_rule(cover, T, self._spec(config, flags), flags["e_max"],
                                degree_bound=flags.get("degree_bound"))
        return Outcome("verify-sp", report.to_dict(), _rule_code(report))

    def _divisor(self, config, flags):
        spec = self._spec(config, flags)
        if not isinstance(spec, PairSpec):
            raise UsageError("the rule needs a divisor pair in the cartier block")
        return spec.divisor

    def _verify_tau(self, config, flags):
        cover, T = self._cover(config)
        report = verify_tau_rule(cover, T, self._divisor(config, flags), flags["e_window"])
        return Outcome("verify-tau", report.to_dict(), _rule_code(report))

    def _verify_sigma(self, config, flags):
        cover, T = self._cover(config)
        report = verify_sigma_rule(cover, T, self._divisor(config, flags), flags["e_window"])
        return Outcome("verify-sigma", report.to_dict(), _rule_code(report))

    def _verify_sandwich(self, config, flags):
        cover, T = self._cover(config)
        report = verify_sandwich(cover, T, flags["e_max"], delta=config.extras.get("delta"),
                                 sharpened=config.extras.get("sharpened"))
        return Outcome("verify-sandwich", report.to_dict(), _rule_code(report))

    # Reports

    def report(self, outcome, flags, source="", p=None):
        """The full report: header with the effective flags and metadata, the result and the exit code."""
        header = {"command": outcome.command, "source": str(source), "p": p,
                  "settings": {k: v for k, v in flags.items() if k != "out"}}
        report = {"header": header, "result": outcome.result, "exit_code": outcome.code}
        return add_metadata(report, self.settings)

    def write(self, report, frame, fmt, out=None):
        """
        Write a report as 'json', 'csv' or 'table' to ``out`` or standard output.

        Raises:
            UsageError: For csv output of a report without a per-e table
        """
        if fmt == "csv":
            if frame is None:
                raise UsageError(f"csv output is only available for {', '.join(TABLE_COMMANDS)}")
            text = frame.to_csv(index=False)
        elif fmt == "json":
            text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
        elif fmt == "table":
            lines = []
            report_printer(report, 0, out=lines.append)
            if frame is not None:
                lines.append("")
                lines.append(frame.to_string(index=False))
            text = "\n".join(lines) + "\n"
        else:
            raise UsageError(f"unknown output format {fmt!r}")
        if out:
            with open(out, "w", encoding="utf-8") as f:
                f.write(text)
        else:
            sys.stdout.write(text)
