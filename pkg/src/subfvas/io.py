"""Path CSV files and JSON run configurations."""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

import numpy as np

from .errors import ArgumentError, ConfigError
from .grid import ProcessLabel, SamplePath, TimeGrid, VasicekParams

HEADER = "t,value"
MODE_NAMES = ("alpha", "beta", "joint", "beta_star", "all")
CONSTRUCTIONS = ("cholesky", "kernel")
METHODS = ("exact", "euler")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_path(path: SamplePath, dest) -> None:
    t = path.grid.points
    lines = [HEADER] + [f"{_fmt(a)},{_fmt(b)}" for a, b in zip(t, path.values)]
    with open(dest, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_path(src, label: ProcessLabel | str = ProcessLabel.X) -> SamplePath:
    """Parse a `t,value` CSV. The grid must be uniform and start at 0."""
    label = ProcessLabel(label)
    text = Path(src).read_text()
    rows = text.splitlines()
    if not rows or rows[0].strip() != HEADER:
        raise ArgumentError(f"{src}:1: expected header '{HEADER}'")
    t, v = [], []
    for k, row in enumerate(rows[1:], start=2):
        if not row.strip():
            continue
        parts = row.split(",")
        if len(parts) != 2:
            raise ArgumentError(f"{src}:{k}: expected two columns")
        try:
            t.append(float(parts[0]))
            v.append(float(parts[1]))
        except ValueError:
            raise ArgumentError(f"{src}:{k}: not a number: {row!r}") from None
    t = np.array(t)
    v = np.array(v)
    n = t.size - 1
    if n < 2:
        raise ArgumentError(f"{src}: need at least 3 rows")
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ArgumentError(f"{src}: t must start at 0 and increase strictly")
    grid = TimeGrid(float(t[-1]), n)
    if np.max(np.abs(t - grid.points)) > 1e-9 * grid.T:
        raise ArgumentError(f"{src}: grid is not uniform")
    initial = float(v[0]) if label is ProcessLabel.X else 0.0
    return SamplePath(grid, v, label, initial=initial)


# --- configuration ----------------------------------------------------------

def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_H(v):
    return _is_num(v) and 0.5 < v < 1, "must be a number in (1/2, 1)"


def _check_pos(v):
    return _is_num(v) and v > 0, "must be a positive number"


def _check_horizons(v):
    ok = (isinstance(v, list) and len(v) > 0 and all(_is_num(h) and h > 0 for h in v)
          and all(b > a for a, b in zip(v, v[1:])))
    return ok, "must be a non-empty, strictly increasing array of positive numbers"


_RULES = {
    "H": _check_H,
    "alpha": _check_pos,
    "beta": _check_pos,
    "x0": lambda v: (_is_num(v), "must be a finite number"),
    "T": _check_pos,
    "horizons": _check_horizons,
    "n_per_unit": lambda v: (_is_int(v) and v >= 16, "must be an integer >= 16"),
    "replications": lambda v: (_is_int(v) and v >= 1, "must be a positive integer"),
    "seed": lambda v: (_is_int(v) and 0 <= v < 2**64, "must be an integer in [0, 2^64)"),
    "mode": lambda v: (v in MODE_NAMES, f"must be one of {', '.join(MODE_NAMES)}"),
    "construction": lambda v: (v in CONSTRUCTIONS, f"must be one of {', '.join(CONSTRUCTIONS)}"),
    "method": lambda v: (v in METHODS, f"must be one of {', '.join(METHODS)}"),
}
KEYS = tuple(_RULES)


class RunConfig(dict):
    """Validated configuration; `where(key)` gives 'file:line' for messages."""

    def __init__(self, data: dict, source: str = "<config>", lines: dict | None = None):
        super().__init__(data)
        self.source = source
        self.lines = lines or {}

    def where(self, key: str) -> str:
        line = self.lines.get(key)
        return f"{self.source}:{line}" if line else self.source

    def need(self, *keys: str) -> None:
        missing = [k for k in keys if k not in self]
        if missing:
            raise ConfigError(f"{self.source}: missing required key(s): {', '.join(missing)}")

    def horizons(self) -> list:
        if "horizons" in self:
            return list(self["horizons"])
        self.need("T")
        return [self["T"]]

    def params(self) -> VasicekParams:
        self.need("H", "alpha", "beta", "x0")
        return VasicekParams(self["alpha"], self["beta"], self["x0"], self["H"])


def _key_lines(text: str) -> dict:
    lines = {}
    for k in KEYS:
        m = re.search(r'"' + re.escape(k) + r'"\s*:', text)
        if m:
            lines[k] = text.count("\n", 0, m.start()) + 1
    return lines


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    def no_dupes(pairs):
        seen = {}
        for k, v in pairs:
            if k in seen:
                raise ConfigError(f"{source}: duplicate key {k!r}")
            seen[k] = v
        return seen

    try:
        data = json.loads(text, object_pairs_hook=no_dupes)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}:1: top level must be a JSON object")
    lines = _key_lines(text)
    cfg = RunConfig(data, source, lines)
    for key, val in data.items():
        if key not in _RULES:
            m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
            line = text.count("\n", 0, m.start()) + 1 if m else "?"
            raise ConfigError(f"{source}:{line}: unknown key {key!r}")
        ok, msg = _RULES[key](val)
        if not ok:
            raise ConfigError(f"{cfg.where(key)}: key '{key}' {msg}, got {val!r}")
    if "T" in data and "horizons" in data:
        raise ConfigError(f"{cfg.where('horizons')}: give either 'T' or 'horizons', not both")
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_config(text, str(path))


def grid_for(cfg: RunConfig) -> TimeGrid:
    cfg.need("n_per_unit")
    hs = cfg.horizons()
    if len(hs) != 1:
        raise ConfigError(f"{cfg.where('horizons')}: a single horizon is needed here")
    T = float(hs[0])
    steps = T * cfg["n_per_unit"]
    if abs(steps - round(steps)) > 1e-9 * steps:
        raise ConfigError(f"{cfg.where('n_per_unit')}: n_per_unit * T must be an integer")
    return TimeGrid(T, int(round(steps)))
