# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Settings file handling and report metadata for the command line front end.

"""

import copy
import datetime
import os
from pathlib import Path

import tomli

import frobsig

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

DEFAULT_SETTINGS = {"defaults": {"e_max": 3, "e_window": 2, "format": "table", "method": "pairing"},
                    "logging": {"level": "WARNING"},
                    "suite": {"threads": 1},
                    "metadata": {}}

ALLOWED_OPTIONS = {"defaults": {"e_max": range(1, 11),
                                "e_window": range(1, 6),
                                "degree_bound": range(0, 1001),
                                "format": ["json", "csv", "table"],
                                "method": ["pairing", "colength"]},
                   "logging": {"level": LOG_LEVELS},
                   "suite": {"threads": range(1, 65)},
                   "metadata": {}}


def validate_config(config):
    """
    Given a dictionary parsed from a settings file, ensures that no invalid elements or values are present.

    Args:
        config: Dictionary parsed from a settings file of sections, keys, and values

    Returns:
        True if the settings are valid, False if any invalid elements or values were found
    """
    keys = list(config.keys())
    if not all([key in ALLOWED_OPTIONS for key in keys]):
        return False
    for key in keys:
        if not isinstance(config[key], dict):
            return False
        if key == "metadata":
            vals = list(config[key].values())
            if len(vals) > 0 and not all(isinstance(item, str) for item in vals):
                return False
        else:
            if not all([k in ALLOWED_OPTIONS[key] for k in config[key]]):
                return False
            for subkey, value in config[key].items():
                # True == 1 would otherwise pass the integer ranges
                if isinstance(value, bool) or value not in ALLOWED_OPTIONS[key][subkey]:
                    return False
    return True


def find_config(config_file):
    """
    Looks for a frobsig_config.toml settings file. If found, validates it and returns its contents.

    Uses the path given on the command line first, then the environment variable 'FROBSIG_CONFIG'. If neither is
    set, looks in the current working directory and then in either '%APPDATA%\\frobsig\\frobsig_config.toml' on
    Windows or '~/.config/frobsig/frobsig_config.toml' on Linux and macOS.

    Args:
        config_file (str): Path given on the command line, None or empty string if none was given

    Returns:
        If a valid settings file was found, the dictionary of its values. If none was found or it is invalid, an empty
        dictionary.
    """
    config_path = os.getenv('FROBSIG_CONFIG')
    if config_file:
        config_path = Path(config_file)
    elif config_path:
        config_path = Path(config_path)
    else:
        config_path = Path.cwd() / "frobsig_config.toml"
        if not config_path.is_file():
            if os.name == 'nt':  # Windows
                config_path = Path(os.getenv('APPDATA', Path.home())) / 'frobsig' / 'frobsig_config.toml'
            else:  # Unix-based systems (Linux/macOS)
                config_path = Path.home() / ".config" / "frobsig" / "frobsig_config.toml"
    try:
        with open(config_path, 'rb') as f:
            config = tomli.load(f)
    except FileNotFoundError:
        return {}
    except tomli.TOMLDecodeError:
        print(f"Invalid configuration file ignored. File found at {config_path}")
        return {}
    if validate_config(config):
        print(f"Valid configuration file found at {config_path}")
        return config
    print(f"Invalid configuration file ignored. File found at {config_path}")
    return {}


def merge_settings(found):
    """
    Built-in defaults overlaid with the sections of a validated settings file.

    Args:
        found (dict): Settings as returned by :func:`find_config`

    Returns:
        dict: A new settings dictionary with every section present
    """
    settings = copy.deepcopy(DEFAULT_SETTINGS)
    for section, values in found.items():
        settings[section].update(values)
    return settings


def add_metadata(report, settings):
    """
    Adds the global metadata fields to a report header.

    Args:
        report (dict): Report about to be exported, with a "header" section
        settings (dict): Effective settings; the values of its "metadata" section are copied over

    Returns:
        report: The report with header["metadata"] filled in
    """
    # On CI runners a login user is not always defined
    try:
        user = os.getlogin()
    except OSError:
        user = "_user_id_not_found_"
    metadata = {"time_stamp": datetime.datetime.now().strftime("%m/%d/%Y, %H:%M:%S"),
                "user": user, "frobsig_version": frobsig.__version__}
    metadata.update(settings.get("metadata", {}))
    report.setdefault("header", {})["metadata"] = metadata
    return report
