"""Run configuration: an INI-style file with one section per stage.

Grammar (UTF-8, ``key = value``, ``#`` or ``;`` comments)::

    [run]       family, output
    [params]    n | m | theta, h, qs, f        (which ones depends on family)
    [mesh]      ell, delta, eps_arc
    [solve]     ms, tol
    [assemble]  l
    [analysis]  embedding, curvature, accumulation, normal_angles,
                curvature_eps, accumulation_eps, accumulation_k

Lists are comma separated.  ``f`` is one of ``helicoid``, ``onnis``,
``parabolic-helicoid``, ``constant <v>`` or ``linear <a> <b>`` (a + b t in
the boundary angle t).  A manifest written by a build uses the same grammar
plus a ``[results]`` section, which is ignored on reading.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, fields

from .domains import (
    DomainError,
    EdgeData,
    PolygonDomain,
    axis_at_infinity_domain,
    generalized_scherk_polygon,
    helicoid_data,
    helicoidal_sector,
    nonperiodic_domain,
    onnis_data,
    parabolic_helicoid_data,
)

FAMILIES = (
    "helicoidal-scherk",
    "helicoidal",
    "axis-at-infinity-scherk",
    "axis-at-infinity-helicoidal",
    "non-periodic",
)

# parameters each family accepts: (required, optional)
FAMILY_PARAMS = {
    "helicoidal-scherk": ({"n", "h"}, {"qs"}),
    "helicoidal": ({"m", "h", "f"}, set()),
    "axis-at-infinity-scherk": ({"theta", "h"}, {"qs"}),
    "axis-at-infinity-helicoidal": ({"theta", "h", "f"}, set()),
    "non-periodic": ({"theta", "f"}, set()),
}

# every numeric default lives here
DEFAULTS = {
    "run": {"output": "minh2r-out"},
    "params": {"h": 1.0, "qs": ()},
    "mesh": {"ell": 0.1, "delta": 0.05, "eps_arc": 0.05},
    "solve": {"ms": (4.0, 8.0, 16.0), "tol": 1e-10},
    "assemble": {"l": 6},
    "analysis": {
        "embedding": True,
        "curvature": True,
        "accumulation": True,
        "normal_angles": True,
        "curvature_eps": (0.1, 0.05, 0.025),
        "accumulation_eps": 0.1,
        "accumulation_k": 8.0,
    },
}

SCHEMA = {
    "run": {"family": "str", "output": "str"},
    "params": {"n": "int", "m": "int", "theta": "float", "h": "float", "qs": "floats", "f": "str"},
    "mesh": {"ell": "float", "delta": "float", "eps_arc": "float"},
    "solve": {"ms": "floats", "tol": "float"},
    "assemble": {"l": "int"},
    "analysis": {
        "embedding": "bool",
        "curvature": "bool",
        "accumulation": "bool",
        "normal_angles": "bool",
        "curvature_eps": "floats",
        "accumulation_eps": "float",
        "accumulation_k": "float",
    },
}
IGNORED_SECTIONS = ("results",)
F_SPECS = ("helicoid", "onnis", "parabolic-helicoid", "constant", "linear")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str
    output: str = DEFAULTS["run"]["output"]
    n: int | None = None
    m: int | None = None
    theta: float | None = None
    h: float = 1.0
    qs: tuple = ()
    f: str | None = None
    ell: float = 0.1
    delta: float = 0.05
    eps_arc: float = 0.05
    ms: tuple = (4.0, 8.0, 16.0)
    tol: float = 1e-10
    l: int = 6  # noqa: E741
    embedding: bool = True
    curvature: bool = True
    accumulation: bool = True
    normal_angles: bool = True
    curvature_eps: tuple = (0.1, 0.05, 0.025)
    accumulation_eps: float = 0.1
    accumulation_k: float = 8.0
    source: str = field(default="<config>", compare=False)

    @property
    def params(self) -> dict:
        req, opt = FAMILY_PARAMS[self.family]
        return {k: getattr(self, k) for k in sorted(req | opt)}

    def domain(self) -> PolygonDomain:
        return build_domain(self)

    def arc_data(self) -> EdgeData | None:
        return None if self.f is None else f_data(self)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def config_text(cfg: RunConfig, results: dict | None = None) -> str:
    """Canonical text of ``cfg``; parses back to an equal RunConfig."""
    out = []
    for sec, keys in SCHEMA.items():
        rows = []
        for k in keys:
            if sec == "params" and k not in set().union(*FAMILY_PARAMS[cfg.family]):
                continue
            v = getattr(cfg, k)
            if v is None:
                continue
            rows.append(f"{k} = {_fmt(v)}")
        out.append(f"[{sec}]")
        out.extend(rows)
        out.append("")
    if results:
        out.append("[results]")
        out.extend(f"{k} = {_fmt(v)}" for k, v in results.items())
        out.append("")
    return "\n".join(out)


_KEY = re.compile(r"^\s*([^=:#;\[\s][^=:]*?)\s*[=:]")
_SEC = re.compile(r"^\s*\[([^\]]+)\]")


def _line_index(text: str) -> dict:
    """(section, key) -> 1-based line number."""
    idx, sec = {}, None
    for no, line in enumerate(text.splitlines(), 1):
        m = _SEC.match(line)
        if m:
            sec = m.group(1).strip().lower()
            idx.setdefault((sec, None), no)
            continue
        m = _KEY.match(line)
        if m and sec is not None:
            idx.setdefault((sec, m.group(1).strip().lower()), no)
    return idx


def _convert(kind: str, raw: str):
    raw = raw.strip()
    if kind == "str":
        if not raw:
            raise ValueError("empty value")
        return raw
    if kind == "int":
        v = float(raw)
        if v != int(v):
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(v)
    if kind == "float":
        v = float(raw)
        if not math.isfinite(v):
            raise ValueError(f"expected a finite number, got {raw!r}")
        return v
    if kind == "floats":
        return tuple(_convert("float", t) for t in raw.split(",") if t.strip())
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"expected true or false, got {raw!r}")
    raise AssertionError(kind)


def apply_overrides(cp: configparser.ConfigParser, overrides) -> dict:
    """``section.key=value`` strings; returns {(section, key): origin}."""
    origin = {}
    for ov in overrides or ():
        if "=" not in ov or "." not in ov.split("=", 1)[0]:
            raise ConfigError(f"--set {ov}: expected section.key=value")
        lhs, val = ov.split("=", 1)
        sec, key = (s.strip().lower() for s in lhs.split(".", 1))
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, key, val.strip())
        origin[(sec, key)] = f"--set {ov}"
    return origin


def parse_config(text: str, source: str = "<config>", overrides=()) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    lines = _line_index(text)
    origin = apply_overrides(cp, overrides)

    def where(sec, key=None):
        if (sec, key) in origin:
            return origin[(sec, key)]
        no = lines.get((sec, key)) or lines.get((sec, None))
        return f"{source}:{no}" if no else source

    values = {}
    for sec in cp.sections():
        if sec in IGNORED_SECTIONS:
            continue
        if sec not in SCHEMA:
            raise ConfigError(f"{where(sec)}: unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigError(f"{where(sec, key)}: unknown key {key!r} in [{sec}]")
            try:
                values[key] = _convert(SCHEMA[sec][key], raw)
            except ValueError as exc:
                raise ConfigError(f"{where(sec, key)}: [{sec}] {key}: {exc}") from None
            values.setdefault("_where", {})[key] = where(sec, key)
    at = values.pop("_where", {})
    if "family" not in values:
        raise ConfigError(f"{where('run')}: [run] family is required")
    fam = values["family"]
    if fam not in FAMILIES:
        raise ConfigError(f"{at['family']}: [run] family: unknown family {fam!r}; choose from {', '.join(FAMILIES)}")
    req, opt = FAMILY_PARAMS[fam]
    given = {k for k in SCHEMA["params"] if k in values}
    for k in sorted(given - req - opt):
        raise ConfigError(f"{at[k]}: [params] {k}: not a parameter of family {fam!r}")
    for k in sorted(req - given - set(DEFAULTS["params"])):
        raise ConfigError(f"{where('params')}: [params] {k} is required for family {fam!r}")
    cfg = RunConfig(**values, source=source)
    _validate(cfg, lambda k: at.get(k, where("params")))
    return cfg


def load_config(path, overrides=()) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config(text, str(path), overrides)


def _validate(cfg: RunConfig, at) -> None:
    def bad(key, msg):
        raise ConfigError(f"{at(key)}: {key}: {msg}")

    for k in ("n", "m"):
        v = getattr(cfg, k)
        if v is not None and v < 1:
            bad(k, f"must be a positive integer, got {v}")
    if cfg.theta is not None and not 0 < cfg.theta < math.pi:
        bad("theta", f"must lie in (0, pi), got {cfg.theta!r}")
    if not cfg.h > 0:
        bad("h", f"must be positive, got {cfg.h!r} (h = 0 is the Scherk boundary case and is not built)")
    for k in ("ell", "delta", "eps_arc", "tol", "accumulation_eps"):
        if not getattr(cfg, k) > 0:
            bad(k, "must be positive")
    if cfg.ell > 1.0:
        bad("ell", "must not exceed 1")
    if not cfg.ms or any(b <= a for a, b in zip(cfg.ms, cfg.ms[1:])):
        bad("ms", "truncation heights must be a non-empty increasing list")
    if cfg.l < 0:
        bad("l", "word length must be non-negative")
    if not cfg.curvature_eps or any(not 0 < e < 1 for e in cfg.curvature_eps):
        bad("curvature_eps", "values must lie in (0, 1)")
    if cfg.f is not None:
        parts = cfg.f.split()
        if parts[0] not in F_SPECS:
            bad("f", f"unknown data {parts[0]!r}; choose from {', '.join(F_SPECS)}")
        arity = {"constant": 1, "linear": 2}.get(parts[0], 0)
        if len(parts) != arity + 1:
            bad("f", f"{parts[0]!r} takes {arity} number(s)")
        try:
            [float(x) for x in parts[1:]]
        except ValueError:
            bad("f", f"not a number in {cfg.f!r}")
        if parts[0] == "helicoid" and cfg.family != "helicoidal":
            bad("f", "helicoid data belongs to the helicoidal family")
    try:
        build_domain(cfg)
    except DomainError as exc:
        key = next((k for k in ("theta", "qs", "n", "m", "f", "h") if k in str(exc)), "params")
        bad(key, str(exc))


def f_data(cfg: RunConfig) -> EdgeData:
    parts = cfg.f.split()
    name, args = parts[0], [float(x) for x in parts[1:]]
    if cfg.family == "helicoidal":
        span = math.pi / cfg.m
    else:
        span = cfg.theta
    if name == "helicoid":
        return helicoid_data(cfg.m, cfg.h)
    if name == "onnis":
        return onnis_data(span, cfg.h)
    if name == "parabolic-helicoid":
        return parabolic_helicoid_data(span, cfg.h)
    if name == "constant":
        return EdgeData.constant(args[0])
    a, b = args
    return EdgeData.from_function(lambda t: a + b * t, 0.0, span, 64)


def build_domain(cfg: RunConfig) -> PolygonDomain:
    fam = cfg.family
    if fam == "helicoidal-scherk":
        return generalized_scherk_polygon(cfg.n, cfg.h, cfg.qs)
    if fam == "helicoidal":
        return helicoidal_sector(cfg.m, cfg.h, f_data(cfg))
    if fam == "axis-at-infinity-scherk":
        return axis_at_infinity_domain(cfg.theta, cfg.h, "scherk", cfg.qs)
    if fam == "axis-at-infinity-helicoidal":
        return axis_at_infinity_domain(cfg.theta, cfg.h, "helicoidal", f=f_data(cfg))
    return nonperiodic_domain(cfg.theta, f_data(cfg))


def config_fields() -> list:
    return [f.name for f in fields(RunConfig) if f.name != "source"]
