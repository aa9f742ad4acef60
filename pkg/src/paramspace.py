"""Parameter-space analysis of contracting and expanding (rho_A, rho_B)-maps.

For a word w the breakpoints whose induction starts with w form I(w); the
ones that terminate right after w form the middle cell H(w). Everything
here runs on the unit domain, as functions of x_t.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Literal

from src import settings
from src.aiet import injectivity_domain
from src.errors import InductionError, NotContractingError, NotExpandingError, ScalarKindError
from src.limits import check_cap
from src.rauzy import ExponentState, LengthMatrix
from src.scalar import Interval, Number, backend_of
from src.workers import map_ordered

logger = logging.getLogger(__name__)

WindowKind = Literal["2a-cantor", "2b-terminate", "2c-continue"]


@dataclass(frozen=True)
class WordState:
    word: str
    exponents: ExponentState
    matrix: LengthMatrix
    f_a: Number
    f_b: Number

    def child(self, letter: str) -> "WordState":
        if letter == "R":
            return WordState(
                self.word + "R",
                self.exponents.after("right"),
                LengthMatrix.right(self.f_a) @ self.matrix,
                self.f_a,
                self.f_a * self.f_b,
            )
        return WordState(
            self.word + "L",
            self.exponents.after("left"),
            LengthMatrix.left(self.f_b) @ self.matrix,
            self.f_a * self.f_b,
            self.f_b,
        )


@dataclass(frozen=True)
class WordCell:
    word: str
    i_w: Interval
    h_w: Interval
    exponents: ExponentState
    matrix: LengthMatrix

    @property
    def ratio(self) -> Number:
        return self.h_w.length / self.i_w.length


@dataclass
class CantorReport:
    rho_a: Number
    rho_b: Number
    depth: int
    h_measure: Number
    complement_measure: Number
    cells: list[WordCell] = field(default_factory=list)
    delta_bound: Number | None = None
    n_threshold: int | None = None
    level_complements: list = field(default_factory=list)


@dataclass(frozen=True)
class DeltaBound:
    word: str
    bound: Number
    ratio: Number
    s: Number


@dataclass(frozen=True)
class PartitionWindow:
    round: int
    kind: WindowKind
    interval: Interval
    rescaled_share: Number | None = None


def _require_contracting(rho_a: Number, rho_b: Number) -> None:
    if not (0 < rho_a < 1 and 0 < rho_b < 1):
        raise NotContractingError(f"factors must lie in (0, 1), got ({rho_a}, {rho_b})")


def word_state(word: str, rho_a: Number, rho_b: Number) -> WordState:
    one = backend_of(rho_a, rho_b).one
    state = WordState("", ExponentState(), LengthMatrix.identity(one), rho_a, rho_b)
    for letter in word:
        if letter not in "LR":
            raise InductionError(f"words are over L and R, got {letter!r}")
        state = state.child(letter)
    return state


def _cell_i(state: WordState) -> Interval:
    m = state.matrix
    lo, hi = -m.b / (m.a - m.b), m.d / (m.d - m.c)
    if lo >= hi:
        return Interval.empty(lo)
    return Interval(lo, hi)


def _cell_h(state: WordState) -> Interval:
    m = state.matrix
    inv_a = 1 / state.f_a
    first = (m.d - m.b * inv_a) / ((m.a - m.b) * inv_a + m.d - m.c)
    second = (m.d - m.b * state.f_b) / ((m.a - m.b) * state.f_b + m.d - m.c)
    return Interval(min(first, second), max(first, second))


def interval_I(word: str, rho_a: Number, rho_b: Number) -> Interval:
    _require_contracting(rho_a, rho_b)
    return _cell_i(word_state(word, rho_a, rho_b))


def interval_H(word: str, rho_a: Number, rho_b: Number) -> Interval:
    _require_contracting(rho_a, rho_b)
    return _cell_h(word_state(word, rho_a, rho_b))


def _cell(state: WordState) -> WordCell | None:
    i_w = _cell_i(state)
    if i_w.length <= 0:
        return None
    return WordCell(state.word, i_w, _cell_h(state), state.exponents, state.matrix)


def _expand_subtree(root: WordState, levels: int) -> list[WordCell]:
    cells = []
    frontier = [root]
    for level in range(levels + 1):
        next_frontier = []
        for state in frontier:
            cell = _cell(state)
            if cell is None:
                continue
            cells.append(cell)
            if level < levels:
                next_frontier += [state.child("L"), state.child("R")]
        frontier = next_frontier
    return cells


def _check_disjoint_middles(cells: list[WordCell]) -> None:
    ordered = sorted((c for c in cells if c.h_w.length > 0), key=lambda c: c.h_w.lo)
    for left, right in zip(ordered, ordered[1:]):
        if left.h_w.overlaps_interior(right.h_w):
            raise InductionError(f"H({left.word!r}) and H({right.word!r}) overlap")


def enumerate_cells(
    rho_a: Number,
    rho_b: Number,
    depth: int,
    cap: int | None = None,
    workers: int | None = None,
) -> CantorReport:
    """All cells I(w), H(w) with |w| <= depth and the measure of what they leave uncovered."""
    _require_contracting(rho_a, rho_b)
    if not backend_of(rho_a, rho_b).exact:
        raise ScalarKindError("cell enumeration runs on exact factors only")
    if cap is None:
        cap = settings.CANTOR_DEPTH_CAP
    elif cap <= 0:
        cap = None
    check_cap(depth, cap, "depth")

    root = word_state("", rho_a, rho_b)
    cells = [_cell(root)]
    if depth > 0:
        subtrees = map_ordered(lambda s: _expand_subtree(s, depth - 1), [root.child("L"), root.child("R")], workers)
        cells += [c for subtree in subtrees for c in subtree]
    cells.sort(key=lambda c: (len(c.word), c.word))
    _check_disjoint_middles(cells)

    per_level = [0] * (depth + 1)
    for cell in cells:
        per_level[len(cell.word)] += cell.h_w.length
    level_complements = []
    covered = 0
    for level_measure in per_level:
        covered += level_measure
        level_complements.append(1 - covered)

    n, delta = uniform_delta(rho_a, rho_b)
    logger.info(f"Enumerated {len(cells)} cells to depth {depth}; complement {float(1 - covered):.6g}")
    return CantorReport(
        rho_a=rho_a,
        rho_b=rho_b,
        depth=depth,
        h_measure=covered,
        complement_measure=1 - covered,
        cells=cells,
        delta_bound=delta,
        n_threshold=n,
        level_complements=level_complements,
    )


def _bound(rho: Number, f_a: Number, f_b: Number) -> Number:
    return (1 - rho) / (f_b + 1 - rho) - 1 / ((1 - rho) / f_a + 1)


def delta_lower_bound(rho_a: Number, rho_b: Number, word: str) -> DeltaBound:
    """Lower bound for |H(w)|/|I(w)| from the word's exponents, with the exact ratio beside it."""
    _require_contracting(rho_a, rho_b)
    state = word_state(word, rho_a, rho_b)
    rho = max(rho_a, rho_b)
    s = state.matrix.s_ratio
    ratio = 1 / (s * state.f_b + 1) - 1 / (s / state.f_a + 1)
    return DeltaBound(word, _bound(rho, state.f_a, state.f_b), ratio, s)


def n_threshold(rho_a: Number, rho_b: Number) -> int:
    rho = float(max(rho_a, rho_b))
    return math.floor(2 * math.log(1 - rho) / math.log(rho)) + 1


def uniform_delta(rho_a: Number, rho_b: Number) -> tuple[int, Number]:
    """(N, delta): delta minimises the bound over all exponent tuples summing to N + 1.

    The bound decreases in both factors, so for a split k + (N + 1 - k) the
    minimum sits at f_a = rho^k, f_b = rho^(N + 1 - k) with rho the larger factor.
    """
    _require_contracting(rho_a, rho_b)
    n = n_threshold(rho_a, rho_b)
    rho = max(rho_a, rho_b)
    total = n + 1
    powers = [rho ** 0]
    for _ in range(total):
        powers.append(powers[-1] * rho)
    best = min(_bound(rho, powers[k], powers[total - k]) for k in range(total + 1))
    return n, best


def run_word(run: int, depth: int) -> str:
    """Blocks of `run` R's closed by an L, cut to depth letters."""
    block = "R" * run + "L"
    return (block * (depth // len(block) + 1))[:depth]


def nested_witness(rho_a: Number, rho_b: Number, word: str) -> Number:
    """Midpoint of I(word), after checking the cells of its prefixes are strictly nested."""
    _require_contracting(rho_a, rho_b)
    state = word_state("", rho_a, rho_b)
    outer = _cell_i(state)
    for letter in word:
        state = state.child(letter)
        inner = _cell_i(state)
        if inner.length <= 0 or inner.lo < outer.lo or inner.hi > outer.hi or inner.length >= outer.length:
            raise InductionError(f"cell of {state.word!r} is not nested in its parent")
        outer = inner
    return outer.midpoint()


@dataclass(frozen=True)
class _Affine:
    """alpha * x + beta, as a function of the starting breakpoint."""

    alpha: Number
    beta: Number

    def __add__(self, other: "_Affine") -> "_Affine":
        return _Affine(self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: "_Affine") -> "_Affine":
        return _Affine(self.alpha - other.alpha, self.beta - other.beta)

    def scale(self, k: Number) -> "_Affine":
        return _Affine(self.alpha * k, self.beta * k)


def _negative_part(g: _Affine, window: Interval) -> Interval:
    """Sub-interval of window where g < 0."""
    if g.alpha == 0:
        return window if g.beta < 0 else Interval.empty(window.lo)
    root = -g.beta / g.alpha
    if g.alpha > 0:
        hi = max(window.lo, min(root, window.hi))
        part = Interval(window.lo, hi, window.lo_open, True if hi < window.hi else window.hi_open)
    else:
        lo = min(window.hi, max(root, window.lo))
        part = Interval(lo, window.hi, True if lo > window.lo else window.lo_open, window.hi_open)
    return Interval.empty(part.lo) if part.length <= 0 else part


def expanding_partition(rho_a: Number, rho_b: Number, rounds: int) -> list[PartitionWindow]:
    """Per-round split of the injectivity domain into 2(a), 2(b), 2(c) windows, left to right."""
    if not (rho_a >= 1 > rho_b > 0):
        raise NotExpandingError(f"need rho_a >= 1 > rho_b, got ({rho_a}, {rho_b})")
    backend = backend_of(rho_a, rho_b)
    window = injectivity_domain(rho_a, rho_b)
    zero, one = backend.zero, backend.one
    lo, x, hi = _Affine(zero, zero), _Affine(one, zero), _Affine(zero, one)
    f_a, f_b = rho_a, rho_b
    windows: list[PartitionWindow] = []

    for n in range(1, rounds + 1):
        forced = 0
        while f_a * f_b >= 1:
            lo, x = x, x + (x - lo).scale(1 / f_b)
            f_a = f_a * f_b
            forced += 1
            if forced > 10_000:
                raise InductionError("forced left steps did not end")
        g_left = (x - lo) - (hi - x).scale(f_b)
        g_right = (hi - x) - (x - lo).scale(f_a)
        part_a = _negative_part(g_left, window)
        part_c = _negative_part(g_right, window)
        b_lo, b_lo_open = (part_a.hi, False) if part_a.length > 0 else (window.lo, window.lo_open)
        b_hi, b_hi_open = (part_c.lo, False) if part_c.length > 0 else (window.hi, window.hi_open)
        if b_lo > b_hi:
            raise InductionError(f"round {n}: 2(a) and 2(c) windows overlap")
        part_b = Interval(b_lo, b_hi, b_lo_open, b_hi_open)

        j_n = min(one, (1 - f_b) / (f_a - f_b)) if f_a != f_b else one
        share = max(zero, (j_n - 1 / (1 + f_a)) / j_n)
        windows += [
            PartitionWindow(n, "2a-cantor", part_a),
            PartitionWindow(n, "2b-terminate", part_b),
            PartitionWindow(n, "2c-continue", part_c, share),
        ]
        if part_c.length <= 0:
            break
        window = part_c
        x, hi = x - (hi - x).scale(1 / f_a), x
        f_b = f_a * f_b
    return windows
