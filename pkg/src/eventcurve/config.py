"""Run configuration: a flat ``key = value`` file plus CLI overrides.

Relative paths resolve against the directory holding the config file.
Custom specifications use dotted keys::

    spec.front_end.target = d_di252_statement
    spec.front_end.shock = d_di252_shock
    spec.front_end.regressors = tone, selic_year_pre
    spec.front_end.fiscal_interaction = false
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path
from typing import Optional

from .calendar import DEFAULT_SAMPLE_START
from .dataset import EventRow, SLOPE_LONG_MINUS_SHORT, SLOPE_SHORT_MINUS_LONG
from .errors import ConfigError
from .specs import DEFAULT_CONTROLS, DEFAULT_SPEC_ORDER, SPECS, Spec

_ROW_FIELDS = set(EventRow.__dataclass_fields__)
_PATH_KEYS = ("events", "market", "focus", "statements", "lexicon", "output")
_KNOWN_KEYS = set(_PATH_KEYS) | {
    "sample_start", "specs", "lambda", "lasso_lambda", "ridge_grid", "min_n",
    "controls", "slope", "tone_denominator",
}


@dataclass
class RunConfig:
    events: Optional[Path] = None
    market: Optional[Path] = None
    focus: Optional[Path] = None
    statements: Optional[Path] = None
    lexicon: Optional[Path] = None
    output: Path = Path("out")
    sample_start: date = DEFAULT_SAMPLE_START
    specs: tuple = DEFAULT_SPEC_ORDER
    ridge_lambda: float = 1.0
    lasso_lambda: float = 1.0
    ridge_grid: Optional[tuple] = None
    min_n: int = 20
    controls: tuple = DEFAULT_CONTROLS
    slope: str = SLOPE_LONG_MINUS_SHORT
    tone_denominator: str = "inscope"
    custom_specs: dict = field(default_factory=dict)

    def spec(self, name: str) -> Spec:
        if name in self.custom_specs:
            return self.custom_specs[name]
        try:
            return SPECS[name]
        except KeyError:
            known = sorted(set(SPECS) | set(self.custom_specs))
            raise ConfigError(f"unknown specification {name!r}; known: {known}") from None

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        cfg = replace(self, **kw)
        cfg.validate()
        return cfg

    def validate(self):
        if self.slope not in (SLOPE_LONG_MINUS_SHORT, SLOPE_SHORT_MINUS_LONG):
            raise ConfigError(f"slope must be long_minus_short or short_minus_long, got {self.slope!r}")
        if self.tone_denominator not in ("inscope", "polar"):
            raise ConfigError(f"tone_denominator must be inscope or polar, got {self.tone_denominator!r}")
        if self.ridge_lambda < 0 or self.lasso_lambda < 0:
            raise ConfigError("penalties must be non-negative")
        if self.min_n < 0:
            raise ConfigError("min_n must be non-negative")
        bad = [c for c in self.controls if c not in _ROW_FIELDS]
        if bad:
            raise ConfigError(f"unknown control fields {bad}")
        for name in self.specs:
            self.spec(name)


def _split(value: str) -> tuple:
    return tuple(v.strip() for v in value.replace("\n", ",").split(",") if v.strip())


def _bool(value: str, key: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _number(value, key, kind=float):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {value!r}") from None


def _parse_spec(name, items):
    unknown = set(items) - {"target", "shock", "regressors", "fiscal_interaction", "label"}
    if unknown:
        raise ConfigError(f"spec.{name}: unknown keys {sorted(unknown)}")
    for req in ("target", "shock"):
        if req not in items:
            raise ConfigError(f"spec.{name}: missing {req}")
    regs = _split(items["regressors"]) if "regressors" in items else None
    for col in (items["target"], items["shock"]) + (regs or ()):
        if col not in _ROW_FIELDS:
            raise ConfigError(f"spec.{name}: unknown field {col!r}")
    kw = {}
    if regs is not None:
        kw = dict(controls=(), text=regs, expectations=())
    return Spec(
        name=name,
        label=items.get("label", name),
        target=items["target"],
        shock=items["shock"],
        fiscal_interaction=_bool(items.get("fiscal_interaction", "false"), f"spec.{name}.fiscal_interaction"),
        **kw,
    )


def parse_config(text: str, base_dir=Path(".")) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    items = dict(parser["run"])
    base_dir = Path(base_dir)
    cfg = RunConfig()
    spec_items = {}
    for key, value in items.items():
        value = value.strip()
        if key.startswith("spec."):
            parts = key.split(".")
            if len(parts) != 3:
                raise ConfigError(f"bad spec key {key!r}; expected spec.NAME.FIELD")
            spec_items.setdefault(parts[1], {})[parts[2]] = value
            continue
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        if key in _PATH_KEYS:
            if value:
                setattr(cfg, key, (base_dir / value))
        elif key == "sample_start":
            try:
                cfg.sample_start = date.fromisoformat(value)
            except ValueError:
                raise ConfigError(f"sample_start: bad ISO date {value!r}") from None
        elif key == "specs":
            cfg.specs = _split(value)
        elif key == "lambda":
            cfg.ridge_lambda = _number(value, key)
        elif key == "lasso_lambda":
            cfg.lasso_lambda = _number(value, key)
        elif key == "ridge_grid":
            cfg.ridge_grid = tuple(_number(v, key) for v in _split(value)) or None
        elif key == "min_n":
            cfg.min_n = _number(value, key, int)
        elif key == "controls":
            cfg.controls = _split(value)
        else:
            setattr(cfg, key, value)
    cfg.custom_specs = {name: _parse_spec(name, it) for name, it in sorted(spec_items.items())}
    cfg.validate()
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config(text, path.parent)
