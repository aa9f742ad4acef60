"""Exact-rational and float64 scalar backends plus the interval type.

Scalars are plain Python numbers: ``Fraction`` (or ``int``) on the exact
backend, ``float`` on the f64 backend. A ``Backend`` knows how to parse,
compare and format its kind; mixing kinds in one computation raises
``ScalarKindError`` instead of coercing.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from src import settings
from src.errors import InvalidIntervalError, OverlapError, ScalarKindError, ScalarParseError

logger = logging.getLogger(__name__)

Number = Union[Fraction, int, float]

EXACT = "exact"
FLOAT = "f64"

_RATIONAL_LITERAL = re.compile(r"^[+-]?\d+(/\d+)?$")
_NUMBER_CHARS = set("0123456789+-./eE")


def kind_of(value) -> str | None:
    """Backend name of a single value; ints are kind-neutral."""
    if isinstance(value, bool):
        raise ScalarKindError(f"booleans are not scalars: {value!r}")
    if isinstance(value, float):
        return FLOAT
    if isinstance(value, Fraction):
        return EXACT
    if isinstance(value, int):
        return None
    raise ScalarKindError(f"unsupported scalar type {type(value).__name__}")


@dataclass(frozen=True)
class Backend:
    name: str
    tolerance: float

    @property
    def exact(self) -> bool:
        return self.name == EXACT

    @property
    def zero(self) -> Number:
        return Fraction(0) if self.exact else 0.0

    @property
    def one(self) -> Number:
        return Fraction(1) if self.exact else 1.0

    def parse(self, text: str) -> Number:
        text = text.strip()
        _check_literal(text)
        try:
            if self.exact:
                return Fraction(text)
            if "/" in text:
                return float(Fraction(text))
            return float(text)
        except ZeroDivisionError:
            raise ScalarParseError("zero denominator", text, text.index("/") + 2)
        except ValueError:
            raise ScalarParseError("malformed number", text, 1)

    def coerce(self, value) -> Number:
        kind = kind_of(value)
        if kind is not None and kind != self.name:
            raise ScalarKindError(f"{kind} value {value!r} used on the {self.name} backend")
        if isinstance(value, int) and not isinstance(value, Fraction):
            return Fraction(value) if self.exact else float(value)
        return value

    def lt(self, a: Number, b: Number, scale: Number = 1) -> bool:
        if self.exact:
            return a < b
        return a < b - self.tolerance * abs(scale)

    def le(self, a: Number, b: Number, scale: Number = 1) -> bool:
        if self.exact:
            return a <= b
        return a <= b + self.tolerance * abs(scale)

    def eq(self, a: Number, b: Number, scale: Number = 1) -> bool:
        if self.exact:
            return a == b
        return abs(a - b) <= self.tolerance * abs(scale)

    def is_zero(self, a: Number, scale: Number = 1) -> bool:
        return self.eq(a, 0, scale)

    def fmt(self, x: Number) -> str:
        return fmt_scalar(x)


EXACT_BACKEND = Backend(EXACT, 0.0)
FLOAT_BACKEND = Backend(FLOAT, settings.FLOAT_TOLERANCE)


def backend_named(name: str) -> Backend:
    if name == EXACT:
        return EXACT_BACKEND
    if name == FLOAT:
        return FLOAT_BACKEND
    raise ValueError(f"Unknown backend {name!r}")


def backend_of(*values) -> Backend:
    """Backend of a computation over values; ints alone count as exact."""
    kinds = {kind_of(v) for v in values} - {None}
    if len(kinds) > 1:
        raise ScalarKindError("exact and float scalars mixed in one computation")
    return FLOAT_BACKEND if kinds == {FLOAT} else EXACT_BACKEND


def _check_literal(text: str) -> None:
    if not text:
        raise ScalarParseError("empty literal", text, 1)
    for i, ch in enumerate(text):
        if ch not in _NUMBER_CHARS:
            raise ScalarParseError(f"unexpected character {ch!r}", text, i + 1)


def is_rational_literal(text: str) -> bool:
    return bool(_RATIONAL_LITERAL.match(text.strip()))


def infer_backend(literals: Iterable[str], override: str | None = None) -> Backend:
    """Exact when every literal is "p/q" or an integer, unless override forces a backend."""
    if override and override != "auto":
        return backend_named(override)
    literals = list(literals)
    if all(is_rational_literal(t) for t in literals):
        return EXACT_BACKEND
    return FLOAT_BACKEND


def parse_scalar(text: str, backend: Backend | None = None) -> Number:
    backend = backend or infer_backend([text])
    return backend.parse(text)


def fmt_scalar(x: Number) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Interval:
    lo: Number
    hi: Number
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        backend_of(self.lo, self.hi)
        if self.lo > self.hi:
            raise InvalidIntervalError(f"interval endpoints out of order: {fmt_scalar(self.lo)} > {fmt_scalar(self.hi)}")

    @classmethod
    def empty(cls, at: Number = 0) -> "Interval":
        return cls(at, at, True, True)

    @property
    def length(self) -> Number:
        return self.hi - self.lo

    @property
    def backend(self) -> Backend:
        return backend_of(self.lo, self.hi)

    def is_empty(self) -> bool:
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    def midpoint(self) -> Number:
        return (self.lo + self.hi) / 2

    def contains(self, x: Number) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and self.lo_open:
            return False
        if x == self.hi and self.hi_open:
            return False
        return True

    def interior_contains(self, x: Number) -> bool:
        return self.lo < x < self.hi

    def overlaps_interior(self, other: "Interval") -> bool:
        return max(self.lo, other.lo) < min(self.hi, other.hi)

    def closure(self) -> "Interval":
        return Interval(self.lo, self.hi)

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo == other.lo:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        else:
            lo, lo_open = (self.lo, self.lo_open) if self.lo > other.lo else (other.lo, other.lo_open)
        if self.hi == other.hi:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        else:
            hi, hi_open = (self.hi, self.hi_open) if self.hi < other.hi else (other.hi, other.hi_open)
        if lo > hi:
            return Interval.empty(lo)
        return Interval(lo, hi, lo_open, hi_open)

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{fmt_scalar(self.lo)}, {fmt_scalar(self.hi)}{right}"


def length(iv: Interval) -> Number:
    return iv.length


def disjoint_union_measure(ivs: Iterable[Interval]) -> Number:
    """Sum of lengths of intervals with pairwise disjoint interiors."""
    ivs = sorted((iv for iv in ivs if iv.length > 0), key=lambda iv: (iv.lo, iv.hi))
    if not ivs:
        return 0
    backend = backend_of(*[e for iv in ivs for e in (iv.lo, iv.hi)])
    total = backend.zero
    reach = ivs[0].lo
    for iv in ivs:
        if backend.lt(iv.lo, reach, max(abs(reach), 1)):
            raise OverlapError(f"interiors meet near {fmt_scalar(iv.lo)}")
        total += iv.length
        reach = max(reach, iv.hi)
    return total
