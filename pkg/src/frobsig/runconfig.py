# SPDX-FileCopyrightText: 2024 University of Washington
#
# SPDX-License-Identifier: BSD-3-Clause

"""
Run configuration files: one JSON document per invocation describing the ring, the Cartier algebra, an optional cover
and the command to run.

Example::

    {
        "char": 5,
        "ring": {"vars": ["s", "t", "u"], "relations": ["s*u - t^2"]},
        "cartier": {"type": "pair", "divisor": [["s", "1/2"]]},
        "command": "fsig",
        "flags": {"e_max": 2}
    }

A cover block replaces the ring block for cover commands::

    "cover": {"base": {"vars": ["x"]}, "total": {"vars": ["y"]}, "images": ["y^2"], "basis": ["1", "y"],
              "T": ["0", "1"]}

Rational values are 'a/b' strings. Comments are allowed.

"""

import importlib.resources
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import json5

from frobsig.cartier import DivisorQ, FullSpec, PairSpec, PrincipalSpec, parse_rational
from frobsig.covers import CoverError, SectionT, build_cover
from frobsig.ideals import Ideal, QuotientPresentation
from frobsig.polys import ParseError, PolyRing, PrimeField

logger = logging.getLogger(__name__)

COMMANDS = ("fedder", "ae", "fsig", "sp", "ratio", "tau", "sigma", "cover-trace", "cover-norm", "cover-minpoly",
            "cover-ram", "transpose", "verify-fsig", "verify-sp", "verify-tau", "verify-sigma", "verify-sandwich",
            "paper-suite")
COVER_COMMANDS = {c for c in COMMANDS if c.startswith(("cover-", "verify-"))} | {"transpose"}

FLAG_TYPES = {"e_max": int, "e_window": int, "degree_bound": int, "e": int, "format": str, "method": str, "t": str,
              "phi": str, "element": str, "check": bool}


class ConfigError(ValueError):
    """
    An invalid run configuration.

    Attributes:
        pointer (str): Dotted path of the first invalid field, e.g. 'cover.base.char'
        message (str): What is wrong with it
    """

    def __init__(self, pointer, message):
        self.pointer = pointer
        self.message = message
        super().__init__(f"{pointer}: {message}" if pointer else message)


@dataclass
class RunConfig:
    """
    A validated run configuration with every polynomial parsed.

    Attributes:
        p (int): Characteristic shared by every block
        command (str): Command to run, None if the file does not name one
        presentation (QuotientPresentation): The ring, or the base of the cover
        spec: Cartier spec on ``presentation``, the full algebra when the file has no cartier block
        cover (CoverSpec): The certified cover, None without a cover block
        section (SectionT): T from the cover block, the trace when None
        flags (dict): Flags given in the file
        extras (dict): Parsed optional cover fields: element, phi, delta, sharpened
        suite (list): Regression cases attached to the file
        source (str): Where the file was read from
    """
    p: int
    command: Optional[str]
    presentation: QuotientPresentation
    spec: object = field(default_factory=FullSpec)
    cover: object = None
    section: Optional[SectionT] = None
    flags: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    suite: list = field(default_factory=list)
    source: str = ""


def fixture_names():
    """Names of the bundled fixtures."""
    folder = importlib.resources.files("frobsig") / "fixtures"
    return sorted(entry.name for entry in folder.iterdir() if entry.name.endswith(".json"))


def resolve_fixture(path):
    """
    The file for ``path``: the path itself when it exists, otherwise the bundled fixture of that name.

    Raises:
        ConfigError: If neither exists
    """
    if Path(path).is_file():
        return Path(path)
    name = Path(path).name
    if not name.endswith(".json"):
        name += ".json"
    bundled = importlib.resources.files("frobsig") / "fixtures" / name
    if bundled.is_file():
        return bundled
    raise ConfigError("", f"configuration file {path} not found")


def _require(data, key, pointer, kind):
    if key not in data:
        raise ConfigError(f"{pointer}.{key}".lstrip("."), "missing")
    value = data[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise ConfigError(f"{pointer}.{key}".lstrip("."), f"expected {kind.__name__}, got {value!r}")
    return value


def _char(block, pointer, p):
    if "char" not in block:
        if p is None:
            raise ConfigError(f"{pointer}.char".lstrip("."), "missing")
        return p
    value = block["char"]
    try:
        PrimeField(value)
    except ValueError as err:
        raise ConfigError(f"{pointer}.char".lstrip("."), str(err)) from None
    if p is not None and value != p:
        raise ConfigError(f"{pointer}.char".lstrip("."), f"characteristic {value} differs from {p}")
    return value


def _poly(ring, text, pointer):
    if not isinstance(text, (str, int)) or isinstance(text, bool):
        raise ConfigError(pointer, f"expected a polynomial, got {text!r}")
    try:
        return ring.parse(str(text))
    except ParseError as err:
        raise ConfigError(pointer, str(err)) from None


def _polys(ring, values, pointer):
    if not isinstance(values, list):
        raise ConfigError(pointer, f"expected a list, got {values!r}")
    return [_poly(ring, v, f"{pointer}[{i}]") for i, v in enumerate(values)]


def _rational(value, pointer):
    try:
        return parse_rational(value)
    except ValueError as err:
        raise ConfigError(pointer, str(err)) from None


def parse_ring(block, pointer, p):
    """
    A presentation from {"char", "vars", "relations", "order"}.

    Returns:
        Tuple (presentation, p)
    """
    if not isinstance(block, dict):
        raise ConfigError(pointer, "expected an object")
    p = _char(block, pointer, p)
    names = _require(block, "vars", pointer, list)
    try:
        ring = PolyRing(PrimeField(p), names, order=block.get("order", "grevlex"))
    except ValueError as err:
        raise ConfigError(f"{pointer}.vars", str(err)) from None
    relations = _polys(ring, block.get("relations", []), f"{pointer}.relations")
    try:
        return QuotientPresentation(ring, relations), p
    except ValueError as err:
        raise ConfigError(f"{pointer}.relations", str(err)) from None


def parse_cartier(block, presentation, pointer="cartier"):
    """
    A Cartier spec from {"type": "full"}, {"type": "pair", "divisor", "ideal", "t"} or
    {"type": "principal", "u0", "e0"}.
    """
    if not isinstance(block, dict):
        raise ConfigError(pointer, "expected an object")
    ring = presentation.ambient
    kind = block.get("type", "full")
    if kind == "full":
        return FullSpec()
    if kind == "pair":
        terms = []
        for i, entry in enumerate(block.get("divisor", [])):
            where = f"{pointer}.divisor[{i}]"
            if not isinstance(entry, list) or len(entry) != 2:
                raise ConfigError(where, "expected [polynomial, 'a/b']")
            g = _poly(ring, entry[0], f"{where}[0]")
            if not g or g.is_ground:
                raise ConfigError(f"{where}[0]", "divisor terms need a non-constant polynomial")
            terms.append((g, _rational(entry[1], f"{where}[1]")))
        ideal_part = None
        if "ideal" in block:
            gens = _polys(ring, block["ideal"], f"{pointer}.ideal")
            ideal_part = (Ideal(ring, gens), _rational(block.get("t", 1), f"{pointer}.t"))
        if any(t < 0 for _, t in terms):
            raise ConfigError(f"{pointer}.divisor", "pair coefficients must be non-negative")
        return PairSpec(DivisorQ(tuple(terms)), ideal_part)
    if kind == "principal":
        u0 = _poly(ring, block.get("u0"), f"{pointer}.u0")
        e0 = block.get("e0", 1)
        if isinstance(e0, bool) or not isinstance(e0, int) or e0 < 1:
            raise ConfigError(f"{pointer}.e0", f"expected a positive integer, got {e0!r}")
        try:
            return PrincipalSpec(u0, e0)
        except ValueError as err:
            raise ConfigError(f"{pointer}.u0", str(err)) from None
    raise ConfigError(f"{pointer}.type", f"unknown Cartier algebra type {kind!r}")


def parse_flags(block, pointer="flags"):
    """Flags with their types checked; rationals are kept as text and checked for syntax."""
    if not isinstance(block, dict):
        raise ConfigError(pointer, "expected an object")
    flags = {}
    for key, value in block.items():
        if key not in FLAG_TYPES:
            raise ConfigError(f"{pointer}.{key}", "unknown flag")
        kind = FLAG_TYPES[key]
        if value is None and key == "degree_bound":
            continue
        if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
            raise ConfigError(f"{pointer}.{key}", f"expected an integer, got {value!r}")
        if kind is str and not isinstance(value, str):
            raise ConfigError(f"{pointer}.{key}", f"expected a string, got {value!r}")
        if kind is bool and not isinstance(value, bool):
            raise ConfigError(f"{pointer}.{key}", f"expected true or false, got {value!r}")
        if key == "t":
            _rational(value, f"{pointer}.t")
        flags[key] = value
    return flags


def parse_cover(block, p, pointer="cover"):
    """
    A certified cover and its section from {"base", "total", "images", "basis", "T", "element", "phi", "delta",
    "sharpened"}.

    Returns:
        Tuple (cover, section, extras, p)
    """
    if not isinstance(block, dict):
        raise ConfigError(pointer, "expected an object")
    base, p = parse_ring(_require(block, "base", pointer, dict), f"{pointer}.base", p)
    total, p = parse_ring(_require(block, "total", pointer, dict), f"{pointer}.total", p)
    images = _polys(total.ambient, _require(block, "images", pointer, list), f"{pointer}.images")
    basis = _polys(total.ambient, _require(block, "basis", pointer, list), f"{pointer}.basis")
    try:
        cover = build_cover(base, total, images, basis)
    except CoverError as err:
        raise ConfigError(pointer, str(err)) from None
    section = None
    if "T" in block:
        values = _polys(base.ambient, block["T"], f"{pointer}.T")
        try:
            section = SectionT(cover, values)
        except CoverError as err:
            raise ConfigError(f"{pointer}.T", str(err)) from None
    extras = {}
    for key, ring in (("element", total.ambient), ("phi", base.ambient), ("delta", base.ambient),
                      ("sharpened", base.ambient)):
        if key in block:
            extras[key] = _poly(ring, block[key], f"{pointer}.{key}")
    return cover, section, extras, p


def parse_config(data, source=""):
    """
    Validate a decoded run configuration.

    Raises:
        ConfigError: At the first invalid field
    """
    if not isinstance(data, dict):
        raise ConfigError("", "configuration must be a JSON object")
    known = {"char", "ring", "cartier", "cover", "command", "flags", "suite", "description"}
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown field")
    p = _char(data, "", None) if "char" in data else None
    command = data.get("command")
    if command is not None and command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}")
    presentation = cover = section = None
    extras = {}
    if "ring" in data:
        presentation, p = parse_ring(data["ring"], "ring", p)
    if "cover" in data:
        cover, section, extras, p = parse_cover(data["cover"], p)
        if presentation is None:
            presentation = cover.base
        elif presentation.ambient != cover.base.ambient or presentation.relations != cover.base.relations:
            raise ConfigError("ring", "ring block differs from cover.base")
    if presentation is None:
        raise ConfigError("ring", "missing")
    spec = parse_cartier(data["cartier"], presentation) if "cartier" in data else FullSpec()
    flags = parse_flags(data.get("flags", {}))
    suite = data.get("suite", [])
    if not isinstance(suite, list):
        raise ConfigError("suite", "expected a list")
    for i, case in enumerate(suite):
        if not isinstance(case, dict) or "case" not in case or case.get("command") not in COMMANDS:
            raise ConfigError(f"suite[{i}]", "cases need a name and a known command")
        parse_flags(case.get("flags", {}), f"suite[{i}].flags")
    return RunConfig(p, command, presentation, spec, cover, section, flags, extras, suite, str(source))


def load_config(path):
    """
    Read and validate a run configuration.

    Args:
        path (str): File path, or the name of a bundled fixture

    Returns:
        RunConfig

    Raises:
        ConfigError: If the file is missing, is not valid JSON or has an invalid field
    """
    source = resolve_fixture(path)
    try:
        data = json5.loads(source.read_text(encoding="utf-8"))
    except ValueError as err:
        raise ConfigError("", f"{source} is not valid JSON: {err}") from None
    config = parse_config(data, source)
    logger.info("loaded %s: command %s, p = %d", source, config.command, config.p)
    return config
