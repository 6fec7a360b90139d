"""Scenario config documents.

A config is a TOML document with four kinds of table::

    name = "fig1_double_slit"      # optional, default "scenario"

    [params]                       # optional table
    hbar = 2.0                     # default 2
    mass = 1.0                     # default 1
    omega = 1.0                    # default 1

    [grid]                         # required; every key required
    x_min = -22.0
    x_max = 22.0
    nx = 881                       # integer
    t_max = 2.5
    nt = 250                       # integer

    [[slit]]                       # one block per slit, at least one
    center = 5.0                   # required
    sigma0 = 1.0                   # required
    weight = 1.0                   # default 1
    phase_offset = 0.0             # radians, default 0
    velocity_x = -4.0              # default 0

    [outputs]                      # optional table
    products = ["density", "entangling", "trajectories"]   # default ["density"]
    trajectory_seeds = 20          # per slit, default 20

Numbers may be written as integers or floats, except ``nx``, ``nt`` and
``trajectory_seeds`` which must be integers. Unknown tables or keys are
errors. Every error raised while reading a document carries the line it
refers to.
"""

from __future__ import annotations

import re
import sys
from typing import Dict, Optional, Tuple

from .errors import ConfigSyntaxError, ScenarioError, SubquantumError, UnknownKey
from .model import GridSpec, PhysicalParams, ScenarioConfig, SlitSpec, validate_scenario

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PARAM_KEYS = {"hbar": 2.0, "mass": 1.0, "omega": 1.0}
GRID_KEYS = ("x_min", "x_max", "nx", "t_max", "nt")
SLIT_REQUIRED = ("center", "sigma0")
SLIT_DEFAULTS = {"weight": 1.0, "phase_offset": 0.0, "velocity_x": 0.0}
OUTPUT_KEYS = ("products", "trajectory_seeds")
INT_KEYS = {"nx", "nt", "trajectory_seeds"}

_TABLE = re.compile(r"^\s*\[\s*([A-Za-z0-9_-]+)\s*\]")
_ARRAY_TABLE = re.compile(r"^\s*\[\[\s*([A-Za-z0-9_-]+)\s*\]\]")
_KEY = re.compile(r"^\s*([A-Za-z0-9_-]+)\s*=")

Where = Tuple[str, Optional[int], Optional[str]]


class _LineIndex:
    """Maps (table, slit index, key) to the line that defines it."""

    def __init__(self, text: str):
        self.lines: Dict[Where, int] = {}
        table, index = "", None
        counts: Dict[str, int] = {}
        for no, line in enumerate(text.splitlines(), start=1):
            m = _ARRAY_TABLE.match(line)
            if m:
                table = m.group(1)
                index = counts.get(table, 0)
                counts[table] = index + 1
                self.lines.setdefault((table, index, None), no)
                continue
            m = _TABLE.match(line)
            if m:
                table, index = m.group(1), None
                self.lines.setdefault((table, None, None), no)
                continue
            m = _KEY.match(line)
            if m:
                self.lines.setdefault((table, index, m.group(1)), no)

    def line(self, where: Optional[Where]) -> Optional[int]:
        if where is None:
            return None
        table, index, key = where
        return self.lines.get((table, index, key)) or self.lines.get((table, index, None))


def _number(value, where: Where, index: _LineIndex):
    key = where[2]
    if key in INT_KEYS:
        ok = isinstance(value, int) and not isinstance(value, bool)
        kind = "an integer"
    else:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        kind = "a number"
    if not ok:
        raise ScenarioError(f"{key} must be {kind}, got {value!r}", line=index.line(where), where=where)
    return value if key in INT_KEYS else float(value)


def _check_keys(table: dict, allowed, where_table: str, slot, index: _LineIndex):
    for key in table:
        if key not in allowed:
            w = (where_table, slot, key)
            raise UnknownKey(f"unknown key {key!r} in [{where_table}]", line=index.line(w), where=w)


def _require(table: dict, keys, where_table: str, slot, index: _LineIndex):
    for key in keys:
        if key not in table:
            w = (where_table, slot, None)
            label = f"[[{where_table}]] #{slot}" if slot is not None else f"[{where_table}]"
            raise ScenarioError(f"{label} is missing required key {key!r}", line=index.line(w), where=w)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a config document."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigSyntaxError(
            getattr(exc, "msg", str(exc)), line=getattr(exc, "lineno", None), column=getattr(exc, "colno", None)
        ) from None
    index = _LineIndex(text)

    for key, value in doc.items():
        if key not in ("name", "params", "grid", "slit", "outputs"):
            w = ("", None, key) if (("", None, key) in index.lines) else (key, None, None)
            raise UnknownKey(f"unknown top-level key or table {key!r}", line=index.line(w), where=w)
    if not isinstance(doc.get("slit", []), list):
        raise ConfigSyntaxError("slits are written as [[slit]] blocks", line=index.line(("slit", None, None)))
    for name in ("params", "grid", "outputs"):
        if name in doc and not isinstance(doc[name], dict):
            raise ConfigSyntaxError(f"{name} must be a table", line=index.line(("", None, name)))

    name = doc.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise ScenarioError("name must be a non-empty string", line=index.line(("", None, "name")))

    ptab = doc.get("params", {})
    _check_keys(ptab, PARAM_KEYS, "params", None, index)
    pvals = {k: _number(ptab[k], ("params", None, k), index) if k in ptab else d for k, d in PARAM_KEYS.items()}
    params = PhysicalParams(**pvals)

    if "grid" not in doc:
        raise ScenarioError("missing required table [grid]")
    gtab = doc["grid"]
    _check_keys(gtab, GRID_KEYS, "grid", None, index)
    _require(gtab, GRID_KEYS, "grid", None, index)
    grid = GridSpec(**{k: _number(gtab[k], ("grid", None, k), index) for k in GRID_KEYS})

    slits = []
    for i, stab in enumerate(doc.get("slit", [])):
        _check_keys(stab, SLIT_REQUIRED + tuple(SLIT_DEFAULTS), "slit", i, index)
        _require(stab, SLIT_REQUIRED, "slit", i, index)
        vals = {k: _number(stab[k], ("slit", i, k), index) for k in SLIT_REQUIRED}
        for k, d in SLIT_DEFAULTS.items():
            vals[k] = _number(stab[k], ("slit", i, k), index) if k in stab else d
        slits.append(SlitSpec(**vals))

    otab = doc.get("outputs", {})
    _check_keys(otab, OUTPUT_KEYS, "outputs", None, index)
    products = otab.get("products", ["density"])
    if not isinstance(products, list) or not all(isinstance(p, str) for p in products):
        w = ("outputs", None, "products")
        raise ScenarioError("products must be a list of strings", line=index.line(w), where=w)
    seeds = _number(otab["trajectory_seeds"], ("outputs", None, "trajectory_seeds"), index) \
        if "trajectory_seeds" in otab else 20

    cfg = ScenarioConfig(params, tuple(slits), grid, outputs=tuple(products), trajectory_seeds=seeds, name=name)
    try:
        return validate_scenario(cfg)
    except SubquantumError as exc:
        if exc.line is None:
            exc.line = index.line(exc.where)
        raise


def read_config(path) -> ScenarioConfig:
    from .errors import IoError

    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text)


def _fmt(value) -> str:
    if isinstance(value, float):
        # repr round-trips; TOML wants inf/nan spelled out, which validation rejects anyway
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def serialize(cfg: ScenarioConfig) -> str:
    """Write ``cfg`` as a config document; parse_config(serialize(cfg)) == cfg."""
    out = [f"name = {_fmt(cfg.name)}", "", "[params]"]
    out += [f"{k} = {_fmt(float(getattr(cfg.params, k)))}" for k in PARAM_KEYS]
    out += ["", "[grid]"]
    for k in GRID_KEYS:
        v = getattr(cfg.grid, k)
        out.append(f"{k} = {_fmt(int(v) if k in INT_KEYS else float(v))}")
    for s in cfg.slits:
        out += ["", "[[slit]]"]
        out += [f"{k} = {_fmt(float(getattr(s, k)))}" for k in SLIT_REQUIRED + tuple(SLIT_DEFAULTS)]
    out += ["", "[outputs]", f"products = {_fmt(list(cfg.outputs))}", f"trajectory_seeds = {int(cfg.trajectory_seeds)}"]
    return "\n".join(out) + "\n"
