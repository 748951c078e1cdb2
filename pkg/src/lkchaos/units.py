"""Parsing of unit-suffixed scalars.

The model mixes ns, ps, us and ns^-1 quantities, and silent unit mistakes are
the dominant source of wrong results.  Dimensioned command-line and config
values therefore carry an explicit suffix (``2ps``, ``10us``, ``50ns-1``,
``9.85ghz``); bare numbers are rejected for dimensioned quantities.
"""

import re

_TIME_SCALE = {
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "ns": 1e-9,
    "ps": 1e-12,
    "fs": 1e-15,
}

_FREQ_SCALE = {
    "hz": 1.0,
    "khz": 1e3,
    "mhz": 1e6,
    "ghz": 1e9,
    "thz": 1e12,
}

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_QUANTITY_RE = re.compile(rf"^({_NUM})\s*([a-zA-Z]+)(-1)?$")


class UnitError(ValueError):
    """A scalar could not be parsed in the expected unit family."""


def _split(text):
    m = _QUANTITY_RE.match(text.strip())
    if m is None:
        raise UnitError(f"cannot parse quantity {text!r}; expected e.g. '2ps' or '50ns-1'")
    return float(m.group(1)), m.group(2).lower(), m.group(3) is not None


def parse_time(text):
    """Parse a duration like ``'2ps'`` or ``'99.85ns'`` into seconds."""
    value, unit, inverse = _split(text)
    if inverse or unit not in _TIME_SCALE:
        raise UnitError(f"{text!r} is not a time; use a suffix from {sorted(_TIME_SCALE)}")
    return value * _TIME_SCALE[unit]


def parse_rate(text):
    """Parse a rate like ``'50ns-1'`` or ``'3.5e10s-1'`` into s^-1."""
    value, unit, inverse = _split(text)
    if not inverse or unit not in _TIME_SCALE:
        raise UnitError(f"{text!r} is not a rate; use a suffix like 'ns-1'")
    return value / _TIME_SCALE[unit]


def parse_frequency(text):
    """Parse a frequency like ``'9.85ghz'`` into Hz."""
    value, unit, inverse = _split(text)
    if inverse or unit not in _FREQ_SCALE:
        raise UnitError(f"{text!r} is not a frequency; use a suffix from {sorted(_FREQ_SCALE)}")
    return value * _FREQ_SCALE[unit]


def format_time(seconds):
    """Render seconds with the most readable suffix (inverse of parse_time)."""
    for unit, scale in (("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("ns", 1e-9), ("ps", 1e-12)):
        if abs(seconds) >= scale or unit == "ps":
            return f"{seconds / scale:g}{unit}"
    return f"{seconds:g}s"
