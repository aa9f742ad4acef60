"""Gap images T^k(I_inf), the measures f_n, tail classification and omega-limit covers."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from src import settings
from src.aiet import (
    RhoMap,
    branch_a,
    branch_b,
    degenerate_side,
    image_intervals,
    injectivity_domain,
    is_surjective,
)
from src.errors import DilaflowError, WrongTailKindError
from src.rauzy import InductionTrace, induct, modified_induct
from src.scalar import Backend, Interval, Number, backend_of, fmt_scalar
from src.workers import map_ordered

logger = logging.getLogger(__name__)

Lineage = Literal["whole", "from-I1", "from-I2"]
TailKind = Literal["terminating", "one-sided-left", "one-sided-right", "infinite-both", "undetermined"]


@dataclass(frozen=True)
class GapPiece:
    interval: Interval
    lineage: Lineage
    step: int


@dataclass
class GapImages:
    pieces: list[GapPiece] = field(default_factory=list)
    split_step: int | None = None
    period: int | None = None

    def at_step(self, k: int) -> list[GapPiece]:
        return [p for p in self.pieces if p.step == k]

    def measure(self) -> Number:
        return sum((p.interval.length for p in self.pieces), 0)

    def maximal_intervals(self) -> list[Interval]:
        """Closures of the pieces merged wherever they touch."""
        merged: list[Interval] = []
        for iv in sorted((p.interval for p in self.pieces), key=lambda iv: iv.lo):
            if merged and iv.lo <= merged[-1].hi:
                merged[-1] = Interval(merged[-1].lo, max(merged[-1].hi, iv.hi))
            else:
                merged.append(Interval(iv.lo, iv.hi))
        return merged


@dataclass
class FnProfile:
    rho_a: Number
    rho_b: Number
    n: int
    grid: list
    values: list

    def is_nonincreasing(self, tolerance: float = 1e-9) -> bool:
        return bool(np.all(np.diff(np.asarray(self.values, dtype=float)) <= tolerance))

    def kink_count(self, tolerance: float = 1e-9) -> int:
        """Grid cells where the profile bends."""
        second = np.diff(np.asarray(self.values, dtype=float), n=2)
        return int(np.count_nonzero(np.abs(second) > tolerance))


@dataclass(frozen=True)
class TailClass:
    kind: TailKind
    word: str
    depth: int
    trace: InductionTrace | None = None


@dataclass
class OmegaCover:
    cover: list[Interval]
    boundary_cloud: list
    measure: Number

    def contains(self, x: Number) -> bool:
        return any(iv.contains(x) for iv in self.cover)


def _strictly_inside(backend: Backend, iv: Interval, x: Number, scale: Number) -> bool:
    return backend.lt(iv.lo, x, scale) and backend.lt(x, iv.hi, scale)


def _image(t: RhoMap, iv: Interval, branch) -> Interval:
    return Interval(branch(t, iv.lo), branch(t, iv.hi), iv.lo_open, iv.hi_open)


def fn_value(t: RhoMap, n: int) -> tuple[Number, GapImages]:
    """Measure of the union of T^k(I_inf) for k = 0..n, splitting pieces at the breakpoint."""
    backend = t.backend
    _, _, gap = image_intervals(t)
    if is_surjective(t) or gap.length <= 0:
        logger.warning(f"Map with x_t={fmt_scalar(t.x_t)} is surjective; f_n is identically 0")
        return backend.zero, GapImages()

    images = GapImages(pieces=[GapPiece(gap, "whole", 0)])
    current: list[tuple[Interval, Lineage]] = [(gap, "whole")]
    warned = False
    for k in range(n):
        following: list[tuple[Interval, Lineage]] = []
        for iv, lineage in current:
            if _strictly_inside(backend, iv, t.x_t, t.length):
                if images.split_step is None:
                    images.split_step = k
                    images.period = k + 2
                left = Interval(iv.lo, t.x_t, iv.lo_open, True)
                right = Interval(t.x_t, iv.hi, True, iv.hi_open)
                following.append((_image(t, left, branch_a), "from-I1" if lineage == "whole" else lineage))
                following.append((_image(t, right, branch_b), "from-I2" if lineage == "whole" else lineage))
            elif iv.midpoint() < t.x_t:
                following.append((_image(t, iv, branch_a), lineage))
            else:
                following.append((_image(t, iv, branch_b), lineage))
        current = following
        images.pieces += [GapPiece(iv, lineage, k + 1) for iv, lineage in current]
        if not backend.exact and not warned and any(iv.length < settings.ESCALATION_PIECE_LENGTH for iv, _ in current):
            logger.warning(f"Gap pieces below {settings.ESCALATION_PIECE_LENGTH:g} at step {k + 1}; use the exact backend")
            warned = True
    return images.measure(), images


def profile_grid(rho_a: Number, rho_b: Number, grid_size: int) -> list:
    """Uniform breakpoint grid over the injectivity domain, matching the factors' backend."""
    domain = injectivity_domain(rho_a, rho_b)
    backend = backend_of(rho_a, rho_b)
    if backend.exact:
        steps = max(grid_size - 1, 1)
        return [domain.lo + domain.length * Fraction(i, steps) for i in range(grid_size)]
    endpoint = not domain.hi_open
    return [float(v) for v in np.linspace(float(domain.lo), float(domain.hi), grid_size, endpoint=endpoint)]


def fn_profile(rho_a: Number, rho_b: Number, n: int, grid_size: int, workers: int | None = None) -> FnProfile:
    grid = profile_grid(rho_a, rho_b, grid_size)

    def sample(x_t: Number) -> Number:
        try:
            return fn_value(RhoMap.unit(rho_a, rho_b, x_t), n)[0]
        except DilaflowError as e:
            logger.error(f"f_{n} failed at x_t={fmt_scalar(x_t)}: {e}", exc_info=True)
            return float("nan")

    values = map_ordered(sample, grid, workers)
    logger.info(f"f_{n} profile over {len(grid)} breakpoints for rho=({fmt_scalar(rho_a)}, {fmt_scalar(rho_b)})")
    return FnProfile(rho_a, rho_b, n, grid, values)


def classify_tail(t: RhoMap, max_steps: int | None = None, window: int | None = None) -> TailClass:
    """Terminating, one-sided (a single letter forever), infinite in both letters, or undetermined."""
    max_steps = settings.TAIL_DEPTH if max_steps is None else max_steps
    window = settings.TAIL_WINDOW if window is None else window
    side = degenerate_side(t)
    if side is not None:
        return TailClass(f"one-sided-{side}", "", 0)
    if is_surjective(t):
        logger.warning("Tail classification skipped: bijective map has no gap")
        return TailClass("undetermined", "", 0)

    if t.rho_a <= 1 and t.rho_b <= 1:
        trace = induct(t, max_steps)
    else:
        trace = modified_induct(t, max_steps)
    end = trace.terminal()
    word = trace.full_word
    if end.outcome in ("terminated", "periodic-swap"):
        return TailClass("terminating", word, len(word), trace)
    if end.outcome == "degenerate-one-sided":
        return TailClass(f"one-sided-{end.side}", word, len(word), trace)
    tail = word[-window:]
    if len(word) >= window and "L" in tail and "R" in tail:
        return TailClass("infinite-both", word, len(word), trace)
    return TailClass("undetermined", word, len(word), trace)


def omega_cover(t: RhoMap, n: int | None = None) -> OmegaCover:
    """Closed intervals left after removing the open gap images through step n."""
    tail = classify_tail(t)
    if tail.kind != "infinite-both":
        raise WrongTailKindError(f"omega cover needs an infinite-both tail, got {tail.kind}")
    n = settings.OMEGA_DEPTH if n is None else n
    value, images = fn_value(t, n)

    cover: list[Interval] = []
    cursor = t.lo
    for iv in sorted((p.interval for p in images.pieces), key=lambda iv: iv.lo):
        if iv.lo > cursor:
            cover.append(Interval(cursor, iv.lo))
        cursor = max(cursor, iv.hi)
    if cursor < t.hi:
        cover.append(Interval(cursor, t.hi))

    _, _, gap = image_intervals(t)
    cloud = []
    for x in (gap.lo, gap.hi):
        for _ in range(n + 1):
            cloud.append(x)
            if t.backend.eq(x, t.x_t, t.length):
                break
            x = branch_a(t, x) if x < t.x_t else branch_b(t, x)
    logger.info(f"Omega cover at depth {n}: {len(cover)} intervals, measure {float(t.length - value):.3g}")
    return OmegaCover(cover=cover, boundary_cloud=sorted(set(cloud)), measure=t.length - value)
