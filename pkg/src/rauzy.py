"""Rauzy-Veech induction for (rho_A, rho_B)-maps.

The map carried by a trace is always the current first-return map, in
original coordinates, with its current factors as rho_a/rho_b. Exponents,
the length matrix and the itineraries of A and B are bookkeeping that lets
a terminal fixed point be unwound into a cycle of the starting map.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Literal

from src import settings
from src.aiet import RhoMap, branch_a, branch_b, degenerate_side, is_surjective, reflect, reflect_point
from src.errors import (
    DegenerateMapError,
    InductionError,
    NotContractingError,
    NotExpandingError,
    NotTerminatedError,
    SurjectiveMapError,
)
from src.scalar import Interval, Number, backend_of, fmt_scalar

logger = logging.getLogger(__name__)

StepKind = Literal["right", "left", "terminate"]
Outcome = Literal[
    "running",
    "terminated",
    "word-budget-exhausted",
    "degenerate-one-sided",
    "entered-contracting",
    "periodic-swap",
]


@dataclass(frozen=True)
class ExponentState:
    m_a: int = 1
    m_b: int = 0
    n_a: int = 0
    n_b: int = 1

    def after(self, kind: StepKind) -> "ExponentState":
        if kind == "right":
            return ExponentState(self.m_a, self.m_b, self.m_a + self.n_a, self.m_b + self.n_b)
        if kind == "left":
            return ExponentState(self.m_a + self.n_a, self.m_b + self.n_b, self.n_a, self.n_b)
        raise InductionError(f"no exponent update for step {kind!r}")

    def factors(self, rho_a: Number, rho_b: Number) -> tuple[Number, Number]:
        return rho_a ** self.m_a * rho_b ** self.m_b, rho_a ** self.n_a * rho_b ** self.n_b

    @property
    def return_times(self) -> tuple[int, int]:
        return self.m_a + self.m_b, self.n_a + self.n_b

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.m_a, self.m_b, self.n_a, self.n_b


@dataclass(frozen=True)
class LengthMatrix:
    """Rows (a b; c d), acting on length vectors (lam_a, lam_b)."""

    a: Number
    b: Number
    c: Number
    d: Number

    @classmethod
    def identity(cls, one: Number = 1) -> "LengthMatrix":
        return cls(one, 0 * one, 0 * one, one)

    @classmethod
    def right(cls, f_a: Number) -> "LengthMatrix":
        return cls(1 + 0 * f_a, -1 / f_a, 0 * f_a, 1 / f_a)

    @classmethod
    def left(cls, f_b: Number) -> "LengthMatrix":
        return cls(1 / f_b, 0 * f_b, -1 / f_b, 1 + 0 * f_b)

    def __matmul__(self, other: "LengthMatrix") -> "LengthMatrix":
        return LengthMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply(self, lam_a: Number, lam_b: Number) -> tuple[Number, Number]:
        return self.a * lam_a + self.b * lam_b, self.c * lam_a + self.d * lam_b

    @property
    def det(self) -> Number:
        return self.a * self.d - self.b * self.c

    @property
    def s_ratio(self) -> Number:
        return (self.a - self.b) / (self.d - self.c)

    def has_sign_pattern(self) -> bool:
        return self.a >= 0 and self.d >= 0 and self.b <= 0 and self.c <= 0 and self.det >= 0

    def rows(self) -> list[list[str]]:
        return [[fmt_scalar(self.a), fmt_scalar(self.b)], [fmt_scalar(self.c), fmt_scalar(self.d)]]


@dataclass(frozen=True)
class InductionStep:
    kind: StepKind
    exponents: ExponentState
    matrix: LengthMatrix
    domain: Interval
    branch: str | None = None


@dataclass
class InductionTrace:
    initial: RhoMap
    current: RhoMap
    exponents: ExponentState = field(default_factory=ExponentState)
    matrix: LengthMatrix | None = None
    itineraries: tuple[str, str] = ("A", "B")
    word: str = ""
    steps: list[InductionStep] = field(default_factory=list)
    outcome: Outcome = "running"
    side: str | None = None
    sub_trace: "InductionTrace | None" = None
    mirrored: bool = False

    @classmethod
    def start(cls, t: RhoMap, mirrored: bool = False) -> "InductionTrace":
        return cls(initial=t, current=t, matrix=LengthMatrix.identity(t.backend.one), mirrored=mirrored)

    def spawn(self) -> "InductionTrace":
        """Continuation trace that keeps the accumulated state but an empty word."""
        return InductionTrace(
            initial=self.initial,
            current=self.current,
            exponents=self.exponents,
            matrix=self.matrix,
            itineraries=self.itineraries,
            mirrored=self.mirrored,
        )

    @property
    def full_word(self) -> str:
        return self.word + (self.sub_trace.full_word if self.sub_trace else "")

    @property
    def branches(self) -> list[str]:
        return [s.branch for s in self.steps if s.branch]

    def terminal(self) -> "InductionTrace":
        trace = self
        while trace.sub_trace is not None:
            trace = trace.sub_trace
        return trace

    def to_json(self) -> dict:
        data = {
            "word": self.word,
            "outcome": self.outcome,
            "mirrored": self.mirrored,
            "steps": [
                {
                    "kind": s.kind,
                    "branch": s.branch,
                    "exponents": list(s.exponents.as_tuple()),
                    "matrix": s.matrix.rows(),
                    "domain": [fmt_scalar(s.domain.lo), fmt_scalar(s.domain.hi)],
                }
                for s in self.steps
            ],
            "current": self.current.to_json(),
        }
        if self.side:
            data["side"] = self.side
        if self.sub_trace is not None:
            data["sub_trace"] = self.sub_trace.to_json()
        return data


@dataclass(frozen=True)
class PeriodicOrbit:
    points: list
    period: int
    multiplier: Number
    critical: bool = False


def classify_step(t: RhoMap) -> StepKind:
    """Right iff B is strictly inside T(A), left iff A strictly inside T(B); ties terminate."""
    backend = t.backend
    if backend.is_zero(t.lam_a, t.length) or backend.is_zero(t.lam_b, t.length):
        raise DegenerateMapError(f"breakpoint {fmt_scalar(t.x_t)} sits on the domain boundary {t.domain}")
    if backend.lt(t.lam_b, t.rho_a * t.lam_a, t.length):
        return "right"
    if backend.lt(t.lam_a, t.rho_b * t.lam_b, t.length):
        return "left"
    return "terminate"


def apply_step(t: RhoMap, exp: ExponentState, kind: StepKind) -> tuple[RhoMap, ExponentState]:
    """First return map on the cut domain; right cuts B away, left cuts A away."""
    expected = classify_step(t)
    if kind != expected:
        raise InductionError(f"step {kind!r} requested but the map admits {expected!r}")
    if kind == "right":
        x_t = t.x_t - t.lam_b / t.rho_a
        cut = RhoMap(t.rho_a, t.rho_a * t.rho_b, x_t, Interval(t.lo, t.x_t))
    else:
        x_t = t.x_t + t.lam_a / t.rho_b
        cut = RhoMap(t.rho_a * t.rho_b, t.rho_b, x_t, Interval(t.x_t, t.hi))
    return cut, exp.after(kind)


def _advance(trace: InductionTrace, kind: StepKind, branch: str | None = None) -> None:
    before = trace.current
    trace.current, trace.exponents = apply_step(before, trace.exponents, kind)
    step_matrix = LengthMatrix.right(before.rho_a) if kind == "right" else LengthMatrix.left(before.rho_b)
    trace.matrix = step_matrix @ trace.matrix
    itin_a, itin_b = trace.itineraries
    if kind == "right":
        trace.itineraries = (itin_a, itin_a + itin_b)
        trace.word += "R"
    else:
        trace.itineraries = (itin_b + itin_a, itin_b)
        trace.word += "L"
    trace.steps.append(InductionStep(kind, trace.exponents, trace.matrix, before.domain, branch))


def _underflowed(t: RhoMap) -> bool:
    if t.backend.exact:
        return False
    floor = settings.FLOAT_UNDERFLOW
    return t.length < floor or t.rho_a < floor or t.rho_b < floor


def _default_budget(t: RhoMap) -> int:
    return settings.MAX_STEPS_EXACT if t.backend.exact else settings.MAX_STEPS_FLOAT


def _run_contracting(trace: InductionTrace, max_steps: int) -> InductionTrace:
    while len(trace.word) < max_steps:
        current = trace.current
        side = degenerate_side(current)
        if side is not None:
            trace.outcome, trace.side = "degenerate-one-sided", side
            return trace
        if _underflowed(current):
            logger.warning(
                f"Float lengths underflowed after {len(trace.word)} steps; rerun on the exact backend"
            )
            trace.outcome = "word-budget-exhausted"
            return trace
        kind = classify_step(current)
        if kind == "terminate":
            product = current.rho_a * current.rho_b
            if current.backend.lt(product, 1):
                trace.outcome = "terminated"
            else:
                trace.outcome = "periodic-swap"
            return trace
        _advance(trace, kind)
    trace.outcome = "word-budget-exhausted"
    return trace


def induct(t: RhoMap, max_steps: int | None = None) -> InductionTrace:
    """Contracting-case induction until termination or the step budget runs out."""
    if t.rho_a > 1 or t.rho_b > 1:
        raise NotContractingError(
            f"factors ({fmt_scalar(t.rho_a)}, {fmt_scalar(t.rho_b)}) are expanding; use modified_induct"
        )
    if t.is_degenerate:
        raise DegenerateMapError(f"breakpoint {fmt_scalar(t.x_t)} sits on the domain boundary {t.domain}")
    max_steps = _default_budget(t) if max_steps is None else max_steps
    trace = _run_contracting(InductionTrace.start(t), max_steps)
    logger.debug(f"induct: word={trace.word!r} outcome={trace.outcome}")
    return trace


def _case1_bound(f_a: Number, f_b: Number) -> int:
    product = float(f_a * f_b)
    if product <= 1:
        return 1
    return math.ceil(math.log(product) / -math.log(float(f_b))) + 1


def modified_induct(t: RhoMap, max_rounds: int | None = None) -> InductionTrace:
    """Induction for one expanding factor: forced left steps, then right steps until termination or contraction."""
    if t.is_contracting:
        raise NotExpandingError("both factors contract; use induct")
    if not t.is_expanding:
        raise NotExpandingError("both factors are at least 1; no injective map exists")
    if is_surjective(t):
        raise SurjectiveMapError("bijective maps have no gap; use rotation_number")
    if t.is_degenerate:
        raise DegenerateMapError(f"breakpoint {fmt_scalar(t.x_t)} sits on the domain boundary {t.domain}")
    mirrored = t.rho_a < 1
    work = reflect(t) if mirrored else t
    max_rounds = settings.MAX_ROUNDS if max_rounds is None else max_rounds
    backend = work.backend
    trace = InductionTrace.start(work, mirrored=mirrored)
    run, run_bound = 0, 0

    while len(trace.word) < max_rounds:
        current = trace.current
        side = degenerate_side(current)
        if side is not None:
            if mirrored:
                side = "right" if side == "left" else "left"
            trace.outcome, trace.side = "degenerate-one-sided", side
            return trace
        f_a, f_b = current.rho_a, current.rho_b
        if f_a * f_b >= 1:
            if run == 0:
                run_bound = _case1_bound(f_a, f_b)
            kind = classify_step(current)
            if kind != "left":
                raise InductionError(f"case-1 map admits {kind!r}; only a left step is valid")
            run += 1
            if run > run_bound:
                raise InductionError(f"case-1 run exceeded its bound of {run_bound} steps")
            _advance(trace, "left", "case-1")
            continue
        run = 0
        kind = classify_step(current)
        if kind == "terminate":
            trace.steps.append(InductionStep("terminate", trace.exponents, trace.matrix, current.domain, "2b"))
            trace.outcome = "terminated"
            return trace
        if kind == "left":
            _advance(trace, "left", "2a")
            trace.outcome = "entered-contracting"
            trace.sub_trace = _run_contracting(trace.spawn(), max_rounds - len(trace.word))
            return trace
        _advance(trace, "right", "2c")
        if not backend.le(trace.current.rho_a, f_a, f_a):
            raise InductionError("rho_A(n) increased along the induction")
    trace.outcome = "word-budget-exhausted"
    logger.debug(f"modified_induct: word={trace.word!r} branches={trace.branches}")
    return trace


def terminal_orbit(trace: InductionTrace) -> PeriodicOrbit:
    """Attracting cycle of the starting map read off a terminated trace."""
    end = trace.terminal()
    if end.outcome != "terminated":
        raise NotTerminatedError(f"trace outcome is {end.outcome}")
    current = end.current
    f_a, f_b = current.rho_a, current.rho_b
    fixed = (current.lo + f_b * (current.hi - current.x_t) - f_a * f_b * current.x_t) / (1 - f_a * f_b)
    start = end.initial
    backend = backend_of(fixed, start.x_t)
    points = [fixed]
    critical = False
    x = fixed
    for letter in end.itineraries[0] + end.itineraries[1]:
        if backend.eq(x, start.x_t, start.length):
            critical = True
        x = branch_a(start, x) if letter == "A" else branch_b(start, x)
        points.append(x)
    if not backend.eq(points[-1], fixed, start.length):
        raise InductionError(f"unwound cycle does not close: {fmt_scalar(points[-1])} vs {fmt_scalar(fixed)}")
    points = points[:-1]
    if end.mirrored:
        points = [reflect_point(start, p) for p in points]
    return PeriodicOrbit(points=points, period=len(points), multiplier=f_a * f_b, critical=critical)

