"""(rho_A, rho_B)-maps: two-interval affine interval exchanges with one breakpoint.

A = [lo, x_t) is moved to the right end of the domain with slope rho_a and
B = (x_t, hi] to the left end with slope rho_b. The breakpoint itself is
critical and never evaluated.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from src import settings
from src.errors import (
    CriticalPointError,
    EmptyDomainError,
    MapError,
    NotInjectiveError,
    OutOfDomainError,
)
from src.scalar import Backend, Interval, Number, backend_of, fmt_scalar, infer_backend

logger = logging.getLogger(__name__)

OrbitStatus = Literal["running", "converged", "hit-breakpoint", "left-domain"]


@dataclass(frozen=True)
class RhoMap:
    rho_a: Number
    rho_b: Number
    x_t: Number
    domain: Interval

    def __post_init__(self):
        backend = backend_of(self.rho_a, self.rho_b, self.x_t, self.domain.lo, self.domain.hi)
        if self.rho_a <= 0 or self.rho_b <= 0:
            raise MapError(f"factors must be positive, got {fmt_scalar(self.rho_a)}, {fmt_scalar(self.rho_b)}")
        if not self.domain.lo < self.domain.hi:
            raise EmptyDomainError(f"domain {self.domain} has no interior")
        if not self.domain.lo <= self.x_t <= self.domain.hi:
            raise OutOfDomainError(f"breakpoint {fmt_scalar(self.x_t)} outside domain {self.domain}")
        image = self.rho_a * self.lam_a + self.rho_b * self.lam_b
        if not backend.le(image, self.length, self.length):
            raise NotInjectiveError(
                f"images overlap: rho_a*lam_a + rho_b*lam_b = {fmt_scalar(image)} > {fmt_scalar(self.length)}"
            )

    @classmethod
    def unit(cls, rho_a: Number, rho_b: Number, x_t: Number) -> "RhoMap":
        backend = backend_of(rho_a, rho_b, x_t)
        return cls(rho_a, rho_b, x_t, Interval(backend.zero, backend.one))

    @property
    def backend(self) -> Backend:
        return backend_of(self.rho_a, self.rho_b, self.x_t, self.domain.lo)

    @property
    def lo(self) -> Number:
        return self.domain.lo

    @property
    def hi(self) -> Number:
        return self.domain.hi

    @property
    def length(self) -> Number:
        return self.domain.hi - self.domain.lo

    @property
    def lam_a(self) -> Number:
        return self.x_t - self.domain.lo

    @property
    def lam_b(self) -> Number:
        return self.domain.hi - self.x_t

    @property
    def is_degenerate(self) -> bool:
        return self.x_t == self.domain.lo or self.x_t == self.domain.hi

    @property
    def is_contracting(self) -> bool:
        return self.rho_a < 1 and self.rho_b < 1

    @property
    def is_expanding(self) -> bool:
        """Exactly one factor at least 1 (and the map still injective)."""
        return (self.rho_a >= 1) != (self.rho_b >= 1)

    def __call__(self, x: Number) -> Number:
        return evaluate(self, x)

    def to_json(self) -> dict:
        return {
            "rho_a": fmt_scalar(self.rho_a),
            "rho_b": fmt_scalar(self.rho_b),
            "x_t": fmt_scalar(self.x_t),
            "domain": [fmt_scalar(self.domain.lo), fmt_scalar(self.domain.hi)],
        }

    @classmethod
    def from_json(cls, data: dict, override: str | None = None) -> "RhoMap":
        try:
            texts = [str(data["rho_a"]), str(data["rho_b"]), str(data["x_t"])]
            domain = data.get("domain", ["0", "1"])
            texts += [str(domain[0]), str(domain[1])]
        except (KeyError, IndexError, TypeError) as e:
            raise MapError(f"map JSON needs rho_a, rho_b, x_t and optional domain [lo, hi]: {e}")
        backend = infer_backend(texts, override)
        rho_a, rho_b, x_t, lo, hi = (backend.parse(t) for t in texts)
        return cls(rho_a, rho_b, x_t, Interval(lo, hi))


@dataclass
class OrbitResult:
    points: list = field(default_factory=list)
    status: OrbitStatus = "running"
    period: int | None = None


def load_map(path: Path, override: str | None = None) -> RhoMap:
    return RhoMap.from_json(json.loads(Path(path).read_text()), override)


def branch_a(t: RhoMap, x: Number) -> Number:
    return t.hi - t.rho_a * (t.x_t - x)


def branch_b(t: RhoMap, x: Number) -> Number:
    return t.lo + t.rho_b * (x - t.x_t)


def evaluate(t: RhoMap, x: Number) -> Number:
    backend_of(t.x_t, x)
    if x < t.lo or x > t.hi:
        raise OutOfDomainError(f"{fmt_scalar(x)} outside {t.domain}")
    if t.backend.eq(x, t.x_t, t.length):
        raise CriticalPointError(f"{fmt_scalar(x)} is the breakpoint")
    if x < t.x_t:
        return branch_a(t, x)
    return branch_b(t, x)


def image_intervals(t: RhoMap) -> tuple[Interval, Interval, Interval]:
    """T(A), T(B) and the gap I_inf strictly between them."""
    top = t.hi - t.rho_a * t.lam_a
    bottom = t.lo + t.rho_b * t.lam_b
    ta = Interval(top, t.hi)
    tb = Interval(t.lo, bottom)
    if t.backend.le(top, bottom, t.length):
        return ta, tb, Interval.empty(bottom)
    return ta, tb, Interval(bottom, top, True, True)


def is_surjective(t: RhoMap) -> bool:
    return t.backend.eq(t.rho_a * t.lam_a + t.rho_b * t.lam_b, t.length, t.length)


def rescale_to_unit(t: RhoMap) -> RhoMap:
    if t.lo == 0 and t.hi == 1:
        return t
    backend = t.backend
    return RhoMap(t.rho_a, t.rho_b, (t.x_t - t.lo) / t.length, Interval(backend.zero, backend.one))


def reflect(t: RhoMap) -> RhoMap:
    """Conjugate by x -> lo + hi - x; the reflected B plays the role of A."""
    return RhoMap(t.rho_b, t.rho_a, t.lo + t.hi - t.x_t, t.domain)


def reflect_point(t: RhoMap, x: Number) -> Number:
    return t.lo + t.hi - x


def degenerate_side(t: RhoMap) -> str | None:
    """Side of a one-sided configuration: every step from here is forced to one letter."""
    backend = t.backend
    if backend.is_zero(t.lam_a, t.length):
        return "left"
    if backend.is_zero(t.lam_b, t.length):
        return "right"
    if t.rho_b > 1 and backend.eq(t.rho_b * t.lam_b, t.length, t.length):
        return "left"
    if t.rho_a > 1 and backend.eq(t.rho_a * t.lam_a, t.length, t.length):
        return "right"
    return None


def injectivity_domain(rho_a: Number, rho_b: Number) -> Interval:
    """Breakpoints x_t in [0, 1] whose unit-domain map is injective; the surjective endpoint is open."""
    backend = backend_of(rho_a, rho_b)
    zero, one = backend.zero, backend.one
    if rho_a <= 1 and rho_b <= 1:
        return Interval(zero, one)
    if rho_a > 1 and rho_b > 1:
        return Interval.empty(zero)
    if rho_a > rho_b:
        return Interval(zero, min(one, (1 - rho_b) / (rho_a - rho_b)), False, True)
    return Interval(max(zero, (rho_b - 1) / (rho_b - rho_a)), one, True, False)


def orbit(
    t: RhoMap,
    x0: Number,
    n: int,
    max_period: int | None = None,
    tolerance: float | None = None,
) -> OrbitResult:
    """Iterate up to n steps, stopping at the breakpoint, outside the domain, or on a converged cycle."""
    max_period = max_period or settings.MAX_DETECT_PERIOD
    tolerance = settings.CONVERGENCE_TOLERANCE if tolerance is None else tolerance
    backend = backend_of(t.x_t, x0)
    result = OrbitResult(points=[x0])
    x = x0
    for _ in range(n):
        if x < t.lo or x > t.hi:
            result.status = "left-domain"
            return result
        if backend.eq(x, t.x_t, t.length):
            result.status = "hit-breakpoint"
            return result
        x = branch_a(t, x) if x < t.x_t else branch_b(t, x)
        result.points.append(x)
        period = _trailing_period(result.points, max_period, tolerance)
        if period is not None:
            result.status = "converged"
            result.period = period
            return result
    if x < t.lo or x > t.hi:
        result.status = "left-domain"
    elif backend.eq(x, t.x_t, t.length):
        result.status = "hit-breakpoint"
    return result


def _trailing_period(points: list, max_period: int, tolerance: float) -> int | None:
    size = len(points)
    for p in range(1, min(max_period, (size - 1) // 2) + 1):
        if abs(points[-1] - points[-1 - p]) > tolerance:
            continue
        if all(abs(points[-i] - points[-i - p]) <= tolerance for i in range(1, p + 1)):
            return p
    return None
