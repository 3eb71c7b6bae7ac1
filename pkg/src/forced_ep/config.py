"""Flat key=value experiment-config parsing.

The on-disk format is plain text: optional `[section]` headers (cosmetic
grouping only), `key = value` lines, `#` comments.  Keys are globally unique
regardless of section, every key has a default, and unknown keys are hard
errors so a typo can never silently change an experiment.
"""

from __future__ import annotations

from .errors import ConfigError
from .harness import ExperimentConfig

_STRING_KEYS = ("system", "method", "retraction", "ref_method",
                "ref_retraction", "out_dir", "prefix")
_FLOAT_KEYS = ("h", "t_final", "alpha", "beta", "ref_h", "newton_tol")
_INT_KEYS = ("max_iter",)
_FLOAT_TUPLE_KEYS = ("eta0", "inertia", "sweep_h")
_STRING_TUPLE_KEYS = ("quantities",)

KNOWN_KEYS = frozenset(_STRING_KEYS + _FLOAT_KEYS + _INT_KEYS
                       + _FLOAT_TUPLE_KEYS + _STRING_TUPLE_KEYS)


def parse_config_text(text) -> dict:
    """Raw key -> string map; validates syntax, key names, and uniqueness."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]") or len(stripped) < 3:
                raise ConfigError(f"line {lineno}: malformed section header "
                                  f"{line.strip()!r}")
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got "
                              f"{line.strip()!r}")
        key, value = stripped.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}; "
                              f"known keys: {sorted(KNOWN_KEYS)}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} "
                              "(keys are global across sections)")
        raw[key] = value
    return raw


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply `key=value` override strings on top of the parsed config."""
    out = dict(raw)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        key = key.strip().lower()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"override key {key!r} unknown; "
                              f"known keys: {sorted(KNOWN_KEYS)}")
        out[key] = value.strip()
    return out


def _coerce_float(key, value):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: {value!r} is not a number") from None


def _coerce_int(key, value):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: {value!r} is not an integer") from None


def _split_tuple(value):
    return tuple(part.strip() for part in value.split(",") if part.strip())


def build_config(raw: dict) -> ExperimentConfig:
    kwargs = {}
    for key, value in raw.items():
        if key in _STRING_KEYS:
            kwargs[key] = value
        elif key in _FLOAT_KEYS:
            kwargs[key] = _coerce_float(key, value)
        elif key in _INT_KEYS:
            kwargs[key] = _coerce_int(key, value)
        elif key in _FLOAT_TUPLE_KEYS:
            kwargs[key] = tuple(_coerce_float(key, part)
                                for part in _split_tuple(value))
        else:
            kwargs[key] = _split_tuple(value)
    return ExperimentConfig(**kwargs)


def load_config(path, overrides=()) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return build_config(apply_overrides(parse_config_text(text), overrides))
