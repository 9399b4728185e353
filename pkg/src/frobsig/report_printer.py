# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

def report_printer(data, tab, out=print):
    """
    Recursively prints the contents of a frobsig report in a readable fashion.

    Attributes:
        data: Report dictionary, or a value inside it
        tab (int): Always use 0, used in the recursive process for indentation
        out: Function receiving each printed line
    """
    if isinstance(data, dict):
        for key, value in data.items():
            if isinstance(value, (dict, list)) and not _flat(value):
                out(" " * tab + f"{key}:")
                report_printer(value, tab + 4, out)
            else:
                out(" " * tab + f"{key}: {_text(value)}")
    elif isinstance(data, list):
        for i, value in enumerate(data):
            if isinstance(value, (dict, list)) and not _flat(value):
                out(" " * tab + f"[{i}]")
                report_printer(value, tab + 4, out)
            else:
                out(" " * tab + f"[{i}] {_text(value)}")
    else:
        out(" " * tab + _text(data))


def _flat(value):
    if isinstance(value, dict):
        return not value
    return all(not isinstance(v, (dict, list)) for v in value)


def _text(value):
    if isinstance(value, list):
        return "[" + ", ".join(_text(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{}"
    if value is None:
        return "-"
    return str(value)
