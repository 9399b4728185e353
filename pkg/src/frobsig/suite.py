# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Regression suite over the bundled fixtures.

Each fixture may carry a "suite" list of cases::

    {"case": "tau t=5/4", "command": "verify-tau", "flags": {"t": "5/4"},
     "expect": {"holds": true}, "close": {"values.up.estimate_float": [0.496, 0.01]}}

``expect`` compares values at dotted paths of the command result for equality, ``close`` within a tolerance.

"""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

import pandas as pd
from progress.bar import ChargingBar

from frobsig.runconfig import fixture_names, load_config

logger = logging.getLogger(__name__)

COLUMNS = ["case", "command", "expected", "observed", "status", "seconds"]


@dataclass
class SuiteCase:
    name: str
    fixture: str
    command: str
    flags: dict = field(default_factory=dict)
    expect: dict = field(default_factory=dict)
    close: dict = field(default_factory=dict)


def lookup(data, path):
    """Value at a dotted path; integer parts index lists."""
    for part in path.split("."):
        if isinstance(data, list):
            data = data[int(part)]
        else:
            data = data[part]
    return data


def collect_cases(names=None):
    """Suite cases of the bundled fixtures, in fixture order."""
    cases = []
    for name in names or fixture_names():
        for entry in load_config(name).suite:
            cases.append(SuiteCase(entry["case"], name, entry["command"], entry.get("flags", {}),
                                   entry.get("expect", {}), entry.get("close", {})))
    return cases


def run_case(session, case):
    """
    Run one case and compare the result with its expectations.

    Returns:
        dict: One row of the suite table
    """
    start = time.perf_counter()
    expected = [f"{k}={v}" for k, v in case.expect.items()] + [f"{k}≈{v[0]}±{v[1]}" for k, v in case.close.items()]
    try:
        config = load_config(case.fixture)
        outcome = session.execute(config, case.command, session.flags_for(config, case.flags, use_cli=False))
        observed = []
        passed = True
        for path, value in case.expect.items():
            found = lookup(outcome.result, path)
            observed.append(f"{path}={found}")
            passed = passed and found == value
        for path, (value, tolerance) in case.close.items():
            found = lookup(outcome.result, path)
            observed.append(f"{path}={found}")
            passed = passed and abs(float(found) - value) <= tolerance
        status = "pass" if passed else "fail"
    except Exception as err:  # a crashing case is reported, not raised
        logger.warning("case %s raised %r", case.name, err)
        observed, status = [f"{type(err).__name__}: {err}"], "error"
    return {"case": case.name, "command": case.command, "expected": "; ".join(expected),
            "observed": "; ".join(observed), "status": status, "seconds": round(time.perf_counter() - start, 2)}


def suite_threads(settings):
    """FROBSIG_THREADS when set, else the [suite] threads setting."""
    value = os.getenv("FROBSIG_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            logger.warning("ignoring FROBSIG_THREADS=%r", value)
    return settings["suite"]["threads"]


def run_suite(session, names=None, threads=None):
    """
    Run every case on a thread pool.

    Returns:
        DataFrame with the columns case, command, expected, observed, status and seconds, in case order
    """
    cases = collect_cases(names)
    threads = threads or suite_threads(session.settings)
    bar = ChargingBar("Running suite", max=len(cases))
    rows = [None] * len(cases)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(run_case, session, case): i for i, case in enumerate(cases)}
        for future in as_completed(futures):
            rows[futures[future]] = future.result()
            bar.next()
    bar.finish()
    return pd.DataFrame(rows, columns=COLUMNS)
