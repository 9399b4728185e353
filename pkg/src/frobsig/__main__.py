# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

import argparse
import sys

from frobsig.frobsig import EXIT_FAILED, EXIT_OK, EXIT_USAGE, FrobSig, Outcome, UsageError
from frobsig.logger import set_logging_level
from frobsig.runconfig import COMMANDS, load_config
from frobsig.suite import run_suite


def build_parser():
    parser = argparse.ArgumentParser(prog="frobsig",
                                     description="F-signatures, splitting primes, test ideals and their "
                                                 "transformation rules under finite covers.")
    parser.add_argument("command", choices=COMMANDS, help="What to compute")
    parser.add_argument("config", nargs="?", default=None,
                        help="Run configuration file, or the name of a bundled fixture")
    parser.add_argument("--e-max", dest="e_max", type=int, default=None, help="Largest Frobenius degree e")
    parser.add_argument("--e-window", dest="e_window", type=int, default=None,
                        help="Degrees summed over by the test ideal iterations")
    parser.add_argument("--degree-bound", dest="degree_bound", type=int, default=None,
                        help="Degree bound for splitting prime candidates and for free generators of a cover")
    parser.add_argument("--out", default=None, help="Write the report to this file")
    parser.add_argument("--format", choices=["json", "csv", "table"], default=None, help="Report format")
    parser.add_argument("--t", default=None, help="Scale the configured divisor by a/b")
    parser.add_argument("--e", type=int, default=None, help="Single degree for ae and transpose")
    parser.add_argument("--phi", default=None, help="Fedder element of the map to transpose")
    parser.add_argument("--element", default=None, help="Element of the cover for norms and minimal polynomials")
    parser.add_argument("--check", action="store_const", const=True, default=None,
                        help="Cross-check a_e against the colength of the nonsplit ideal")
    parser.add_argument("--method", choices=["pairing", "colength"], default=None,
                        help="How splitting numbers are computed")
    parser.add_argument("--config", dest="settings", default=None,
                        help="File path for the settings file: 'frobsig_config.toml'")
    parser.add_argument("--log-level", dest="log_level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    return parser


def main(argv=None):
    """
    Runs one command from the command line.

    Returns:
        int: Exit code, 0 on success, 1 when a rule or the suite failed, 2 for invalid input, 3 when an iteration
        did not stabilize
    """
    args = build_parser().parse_args(argv)
    cli_flags = {k: getattr(args, k) for k in ("e_max", "e_window", "degree_bound", "format", "t", "e", "phi",
                                               "element", "check", "method")}
    try:
        session = FrobSig(args.settings, cli_flags)
        set_logging_level(args.log_level or session.settings["logging"]["level"])
        if args.command == "paper-suite":
            flags = session.flags_for(None)
            frame = run_suite(session)
            failed = int((frame["status"] != "pass").sum())
            outcome = Outcome("paper-suite", {"cases": frame.to_dict(orient="records"), "failed": failed},
                              EXIT_FAILED if failed else EXIT_OK, frame)
            report = session.report(outcome, flags)
        else:
            if args.config is None:
                raise UsageError(f"{args.command} needs a configuration file")
            config = load_config(args.config)
            flags = session.flags_for(config)
            outcome = session.execute(config, args.command, flags)
            report = session.report(outcome, flags, config.source, config.p)
        session.write(report, outcome.frame, flags["format"], args.out)
    except ValueError as err:
        # ConfigError, CoverError, ParseError and UsageError included
        print(f"ERROR: {err}", file=sys.stderr)
        return EXIT_USAGE
    return outcome.code


def run():
    """
    Runs frobsig from the command line and exits with its exit code.
    """
    sys.exit(main())


if __name__ == "__main__":
    run()
