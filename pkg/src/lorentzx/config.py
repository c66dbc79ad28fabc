"""INI-style experiment configs.

Example::

    [experiment]
    kind = hardy-verify
    expected = bounded

    [exponents]
    p = 2
    q = 2
    alpha = limit0=0.55, limitInf=0.0, amplitude=0.0, mode=log-decay

    [grid]
    cells = 256
    t_min = 2^-80
    domain_length = inf

Sections: experiment, exponents, operator, flow, input, grid, family,
protocol, output, sweep. Errors carry the line number of the offending key.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .exponent import ExponentFunction, constant, parse_exponent, with_domain
from .family import FamilySpec, GridSpec
from .report import Protocol

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config", "KINDS", "EXPECTATIONS"]

KINDS = ("norm", "rearrange", "hardy-verify", "op-verify", "ergodic-verify", "sweep")
EXPECTATIONS = ("bounded", "blow-up", "holds", "fails", "flip", "none")

_SECTIONS = {
    "experiment": {"kind", "expected", "label", "base"},
    "exponents": {"p", "q", "alpha", "beta", "nu", "gamma", "direction"},
    "operator": {"kind", "alpha", "kernel"},
    "flow": {"kind", "check", "operator", "arcs", "points"},
    "input": {"f", "star"},
    "grid": {"cells", "t_min", "truncation", "domain_length"},
    "family": {"size", "seed", "eps", "extension_eps", "extension_size", "dyadic"},
    "protocol": {"flatness", "blowup_factor", "refinement"},
    "output": {"dir", "prefix"},
    "sweep": None,  # one free key: <section>.<key>
}


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _number(text: str) -> float:
    """Floats, 'inf', and powers written as 2^-80 or 2**-80."""
    t = text.strip().lower()
    m = re.fullmatch(r"([0-9.eE+-]+)\s*(?:\^|\*\*)\s*([0-9.eE+-]+)", t)
    if m:
        return float(m.group(1)) ** float(m.group(2))
    return float(t)


def _key_lines(text: str) -> dict:
    """(section, key) -> 1-based line number, mirroring configparser's rules."""
    lines, section = {}, None
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        m = re.fullmatch(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            lines[(section, None)] = i
            continue
        if section and not raw[:1].isspace():
            key = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
            lines[(section, key)] = i
    return lines


@dataclass
class ExperimentConfig:
    kind: str
    expected: str
    sections: dict
    lines: dict = field(repr=False)
    text: str = field(repr=False)
    label: str = "experiment"

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()[:16]

    def line(self, section: str, key: Optional[str] = None) -> Optional[int]:
        return self.lines.get((section, key)) or self.lines.get((section, None))

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def _convert(self, section, key, fn, default):
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return fn(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{section}] {key}: {exc}", self.line(section, key)) from None

    def number(self, section, key, default=None):
        return self._convert(section, key, _number, default)

    def numbers(self, section, key, default=None):
        return self._convert(section, key, lambda s: tuple(_number(x) for x in s.split(",") if x.strip()), default)

    def exponent(self, key: str, default: Optional[float] = None) -> Optional[ExponentFunction]:
        raw = self.get("exponents", key)
        if raw is None:
            return None if default is None else with_domain(constant(default), self.grid().domain_length)
        try:
            e = parse_exponent(raw)
        except ValueError as exc:
            raise ConfigError(f"[exponents] {key}: {exc}", self.line("exponents", key)) from None
        return with_domain(e, self.grid().domain_length)

    def grid(self, default_cells: int = 256, default_length: float = math.inf) -> GridSpec:
        d = GridSpec()
        cells = int(self.number("grid", "cells", default_cells))
        if cells < 1:
            raise ConfigError("[grid] cells must be positive", self.line("grid", "cells"))
        return GridSpec(
            cells=cells,
            t_min=self.number("grid", "t_min", d.t_min),
            truncation=self.number("grid", "truncation", d.truncation),
            domain_length=self.number("grid", "domain_length", default_length),
        )

    def family(self) -> FamilySpec:
        d = FamilySpec()
        eps = self.numbers("family", "eps", d.eps)
        size = int(self.number("family", "size", d.random))
        dyadic = self._convert("family", "dyadic", _boolean, d.dyadic)
        if not eps and size <= 0 and not dyadic:
            raise ConfigError("family is empty: no eps ladder, random members or dyadic members",
                              self.line("family"))
        return FamilySpec(
            eps=eps,
            random=size,
            seed=int(self.number("family", "seed", d.seed)),
            dyadic=dyadic,
            extension_eps=self.numbers("family", "extension_eps", d.extension_eps),
            extension_random=int(self.number("family", "extension_size", d.extension_random)),
        )

    def protocol(self) -> Protocol:
        d = Protocol()
        ref = self.numbers("protocol", "refinement", d.refinement)
        if not ref or any(r < 1 or r != int(r) for r in ref):
            raise ConfigError("[protocol] refinement needs positive integers", self.line("protocol", "refinement"))
        return Protocol(
            flatness=self.number("protocol", "flatness", d.flatness * 100) / 100.0,
            blowup_factor=self.number("protocol", "blowup_factor", d.blowup_factor),
            refinement=tuple(int(r) for r in ref),
        )

    def swept(self):
        """((section, key), [values]) of the single swept parameter, or None."""
        sw = self.sections.get("sweep")
        if not sw:
            return None
        if len(sw) != 1:
            raise ConfigError("exactly one parameter may be swept", self.line("sweep"))
        (target, raw), = sw.items()
        if "." not in target:
            raise ConfigError("swept parameter is written <section>.<key>", self.line("sweep", target))
        section, key = target.split(".", 1)
        allowed = _SECTIONS.get(section)
        if allowed is None or key not in allowed:
            raise ConfigError(f"cannot sweep {target}", self.line("sweep", target))
        values = [v.strip() for v in raw.split("|") if v.strip()]
        if not values:
            raise ConfigError("sweep needs a value list separated by '|'", self.line("sweep", target))
        return (section, key), values

    def with_value(self, section: str, key: str, value: str) -> "ExperimentConfig":
        sections = {s: dict(kv) for s, kv in self.sections.items() if s != "sweep"}
        sections.setdefault(section, {})[key] = value
        return ExperimentConfig(self.kind, self.expected, sections, self.lines, self.text, self.label)


def _boolean(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str.lower
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("missing section header", exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("unparsable line", line) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r}", exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section {exc.section!r}", exc.lineno) from None
    lines = _key_lines(text)
    sections = {}
    for name in cp.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]", lines.get((name, None)))
        allowed = _SECTIONS[name]
        for key in cp[name]:
            if allowed is not None and key not in allowed:
                raise ConfigError(f"unknown key {key!r} in [{name}]", lines.get((name, key)))
        sections[name] = dict(cp[name])
    exp = sections.get("experiment", {})
    kind = exp.get("kind")
    if kind is None:
        raise ConfigError("[experiment] kind is required", lines.get(("experiment", None)))
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}", lines.get(("experiment", "kind")))
    expected = exp.get("expected", "none")
    if expected not in EXPECTATIONS:
        raise ConfigError(f"unknown expectation {expected!r}", lines.get(("experiment", "expected")))
    cfg = ExperimentConfig(kind, expected, sections, lines, text, exp.get("label", kind))
    if kind == "sweep":
        base = exp.get("base")
        if base not in ("hardy-verify", "op-verify", "ergodic-verify", "norm"):
            raise ConfigError("sweep needs base = hardy-verify | op-verify | ergodic-verify | norm",
                              lines.get(("experiment", "base")) or lines.get(("experiment", None)))
        if cfg.swept() is None:
            raise ConfigError("sweep needs a [sweep] section", lines.get(("experiment", "kind")))
    cfg.family()
    cfg.protocol()
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
