"""One-holed dilation tori given by a convex pentagon with two edge pairings.

Vertex letters are relative to the free boundary edge E->A: E is the
boundary edge's start, then A, B, C, D counterclockwise. Directions are
plain vectors; the chart angle runs clockwise from the boundary direction
A->E through the inward normal.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Literal

from src import settings
from src.aiet import RhoMap, is_surjective, rescale_to_unit
from src.errors import (
    DilaflowError,
    FirstReturnError,
    ModelError,
    NotBijectiveError,
    SectorBoundaryError,
    TorusError,
    TraceError,
    TracingBudgetError,
)
from src.limitset import classify_tail
from src.rauzy import terminal_orbit
from src.scalar import Backend, Interval, Number, backend_of, fmt_scalar, infer_backend

logger = logging.getLogger(__name__)

Point = tuple[Number, Number]
LETTERS = "EABCD"
DEFAULT_TRANSVERSALS = {
    "m_B": ("A", "C"),
    "I1": ("E", "C"),
    "I2": ("E", "C"),
    "I3": ("B", "D"),
    "I4": ("A", "C"),
    "I5": ("A", "C"),
}
LabelKind = Literal[
    "attracting-periodic",
    "saddle-connection",
    "cantor-lamination",
    "minimal",
    "completely-periodic",
    "unresolved",
]


def _sub(p: Point, q: Point) -> Point:
    return p[0] - q[0], p[1] - q[1]


def _add(p: Point, q: Point) -> Point:
    return p[0] + q[0], p[1] + q[1]


def _scale(p: Point, k: Number) -> Point:
    return p[0] * k, p[1] * k


def _cross(p: Point, q: Point) -> Number:
    return p[0] * q[1] - p[1] * q[0]


def _dot(p: Point, q: Point) -> Number:
    return p[0] * q[0] + p[1] * q[1]


def _neg(p: Point) -> Point:
    return -p[0], -p[1]


@dataclass(frozen=True)
class EdgePairing:
    edge_a: int
    edge_b: int
    factor: Number


@dataclass(frozen=True)
class PolygonModel:
    name: str
    vertices: tuple[Point, ...]
    boundary_edge: int
    pairings: tuple[EdgePairing, EdgePairing]
    transversals: dict = field(default_factory=dict)

    @property
    def backend(self) -> Backend:
        return backend_of(*[c for v in self.vertices for c in v])

    def edge(self, i: int) -> tuple[Point, Point]:
        return self.vertices[i % 5], self.vertices[(i + 1) % 5]

    def edge_vector(self, i: int) -> Point:
        p, q = self.edge(i)
        return _sub(q, p)

    def vertex(self, letter: str) -> Point:
        return self.vertices[self.index(letter)]

    def index(self, letter: str) -> int:
        return (self.boundary_edge + LETTERS.index(letter)) % 5

    def partner(self, i: int) -> tuple[int, Number]:
        """Partner edge of i and the length factor applied when crossing from i to it."""
        for pairing in self.pairings:
            if pairing.edge_a == i:
                return pairing.edge_b, pairing.factor
            if pairing.edge_b == i:
                return pairing.edge_a, 1 / pairing.factor
        raise TraceError(f"edge {i} is the free boundary", code="hit-boundary")

    def glue(self, i: int, z: Point) -> Point:
        """Image on the partner edge of a point z on edge i."""
        j, factor = self.partner(i)
        return _add(self.vertices[(j + 1) % 5], _scale(_sub(z, self.vertices[i]), factor))

    def boundary_direction(self) -> Point:
        """A->E: the direction m_B, oriented up the boundary edge."""
        return _sub(self.vertex("E"), self.vertex("A"))

    def inward_normal(self) -> Point:
        t = self.edge_vector(self.boundary_edge)
        return -t[1], t[0]

    def transversal(self, label: str) -> tuple[int, int]:
        first, second = self.transversals.get(label, DEFAULT_TRANSVERSALS[label])
        return self.index(first), self.index(second)

    def as_float(self) -> "PolygonModel":
        if not self.backend.exact:
            return self
        return PolygonModel(
            self.name,
            tuple((float(x), float(y)) for x, y in self.vertices),
            self.boundary_edge,
            tuple(EdgePairing(p.edge_a, p.edge_b, float(p.factor)) for p in self.pairings),
            dict(self.transversals),
        )


def _parse_point(raw, backend: Backend) -> Point:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ModelError(f"vertex must be [x, y], got {raw!r}", code="parse-error")
    return backend.parse(str(raw[0])), backend.parse(str(raw[1]))


def validate_model(raw: dict, override: str | None = None) -> PolygonModel:
    """Check a raw model: one free edge, convex pentagon, antiparallel pairs, interleaved identification."""
    try:
        raw_vertices = list(raw["vertices"])
        raw_pairings = list(raw.get("pairings", []))
    except (KeyError, TypeError) as e:
        raise ModelError(f"model needs vertices and pairings: {e}", code="parse-error")
    texts = [str(c) for v in raw_vertices for c in (v if isinstance(v, (list, tuple)) else [v])]
    backend = infer_backend(texts, override)
    vertices = tuple(_parse_point(v, backend) for v in raw_vertices)
    count = len(vertices)

    paired = set()
    try:
        for p in raw_pairings:
            paired.update((int(p["edge_a"]), int(p["edge_b"])))
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"pairings need integer edge_a and edge_b: {e}", code="parse-error")
    free = [i for i in range(count) if i not in paired]
    if len(free) != 1:
        raise ModelError(f"exactly one boundary edge required, found {len(free)}", code="boundary-count")
    boundary = int(raw.get("boundary_edge", free[0]))
    if boundary != free[0]:
        raise ModelError(f"boundary_edge {boundary} is paired; the free edge is {free[0]}", code="boundary-count")
    if count != 5:
        raise ModelError(f"a pentagon is required, got {count} vertices", code="non-convex")

    for i in range(5):
        e_in = _sub(vertices[i], vertices[i - 1])
        e_out = _sub(vertices[(i + 1) % 5], vertices[i])
        if not _cross(e_in, e_out) > 0:
            raise ModelError(f"vertex {i} breaks counterclockwise convexity", code="non-convex")

    pairings = []
    for p in raw_pairings:
        a, b = int(p["edge_a"]), int(p["edge_b"])
        ea = _sub(vertices[(a + 1) % 5], vertices[a])
        eb = _sub(vertices[(b + 1) % 5], vertices[b])
        if not backend.is_zero(_cross(ea, eb), _dot(ea, ea)) or _dot(ea, eb) >= 0:
            raise ModelError(f"edges {a} and {b} are not antiparallel", code="non-parallel-pair")
        factor = -_dot(ea, eb) / _dot(ea, ea)
        if "factor" in p and not backend.eq(backend.parse(str(p["factor"])), factor, factor):
            raise ModelError(
                f"edges {a} and {b} have length ratio {fmt_scalar(factor)}, not {p['factor']}", code="non-parallel-pair"
            )
        pairings.append(EdgePairing(a, b, factor))

    expected = [{(boundary + 1) % 5, (boundary + 3) % 5}, {(boundary + 2) % 5, (boundary + 4) % 5}]
    found = [{p.edge_a, p.edge_b} for p in pairings]
    if sorted(map(sorted, found)) != sorted(map(sorted, expected)):
        raise ModelError(f"pairings {found} do not give a one-holed torus", code="bad-identification")

    transversals = {}
    for label, pair in (raw.get("transversals") or {}).items():
        if label not in DEFAULT_TRANSVERSALS or len(pair) != 2 or not all(c in LETTERS for c in pair):
            raise ModelError(f"bad transversal entry {label}: {pair!r}", code="parse-error")
        transversals[label] = (pair[0], pair[1])

    model = PolygonModel(str(raw.get("name", "model")), vertices, boundary, tuple(pairings), transversals)
    for p in model.pairings:
        for i, j in ((p.edge_a, p.edge_b), (p.edge_b, p.edge_a)):
            start, end = model.edge(i)
            if not _close(backend, model.glue(i, start), model.vertices[(j + 1) % 5]) or not _close(
                backend, model.glue(i, end), model.vertices[j]
            ):
                raise ModelError(f"identification of edge {i} does not land on edge {j}", code="bad-identification")
    logger.debug(f"Validated model {model.name} on the {backend.name} backend")
    return model


def _close(backend: Backend, p: Point, q: Point) -> bool:
    return backend.is_zero(p[0] - q[0]) and backend.is_zero(p[1] - q[1])


def load_model(path: Path, override: str | None = None) -> PolygonModel:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"{path}: {e.msg}", code="parse-error", line=e.lineno, column=e.colno)
    return validate_model(raw, override)


# Sectors


@dataclass(frozen=True)
class SectorBoundary:
    name: str
    vector: Point


@dataclass(frozen=True)
class SectorDecomposition:
    m_b: Point
    boundaries: tuple[SectorBoundary, ...]
    sectors: tuple[str, ...] = ("I1", "I2", "I3", "I4", "I5")

    def locate(self, model: PolygonModel, v: Point) -> str:
        """Sector label of a forward direction; sector boundaries raise."""
        backend = backend_of(*v, *self.m_b)
        scale = _dot(v, v) ** 0.5 if not backend.exact else 1
        normal = model.inward_normal()
        if backend.is_zero(_cross(v, self.m_b), scale * _norm(self.m_b)):
            return "m_B"
        if not _dot(v, normal) > 0:
            raise TorusError(f"direction {_fmt_point(v)} points into the boundary edge")
        before = 0
        for boundary in self.boundaries:
            c = _cross(boundary.vector, v)
            if backend.is_zero(c, scale * _norm(boundary.vector)):
                raise SectorBoundaryError(f"direction {_fmt_point(v)} is the saddle direction {boundary.name}")
            if c < 0:
                before += 1
        return f"I{before + 1}"


def _norm(p: Point) -> float:
    return math.hypot(float(p[0]), float(p[1]))


def _fmt_point(p: Point) -> str:
    return f"({fmt_scalar(p[0])}, {fmt_scalar(p[1])})"


def _forward(model: PolygonModel, v: Point) -> Point:
    return v if _dot(v, model.inward_normal()) > 0 else _neg(v)


def sector_decomposition(model: PolygonModel) -> SectorDecomposition:
    a, b, c, d, e = (model.vertex(x) for x in "ABCDE")
    candidates = [
        SectorBoundary("diagonal A-D", _forward(model, _sub(d, a))),
        SectorBoundary("A-pair edge", _forward(model, _sub(c, b))),
        SectorBoundary("B-pair edge", _forward(model, _sub(b, a))),
        SectorBoundary("diagonal E-B", _forward(model, _sub(b, e))),
    ]
    ordered = sorted(candidates, key=lambda s: chart_angle(model, s.vector))
    return SectorDecomposition(model.boundary_direction(), tuple(ordered))


def chart_angle(model: PolygonModel, v: Point) -> float:
    """Clockwise angle from the boundary direction A->E, in [0, pi] for forward directions."""
    u0 = model.boundary_direction()
    return math.atan2(-float(_cross(u0, v)), float(_dot(u0, v)))


def direction_from_angle(model: PolygonModel, angle: float) -> Point:
    u0 = model.boundary_direction()
    length = _norm(u0)
    ux, uy = float(u0[0]) / length, float(u0[1]) / length
    nx, ny = uy, -ux
    return math.cos(angle) * ux + math.sin(angle) * nx, math.cos(angle) * uy + math.sin(angle) * ny


def direction_from_slope(model: PolygonModel, slope: Number | None) -> Point:
    """Forward direction of a line with the given slope (None for vertical)."""
    one = model.backend.one
    v = (0 * one, one) if slope is None else (one, slope * one)
    if model.backend.is_zero(_dot(v, model.inward_normal())):
        return v if _dot(v, model.boundary_direction()) > 0 else _neg(v)
    return _forward(model, v)


# Tracing


@dataclass(frozen=True)
class Crossing:
    exit_edge: int
    entry_edge: int
    exit_point: Point
    entry_point: Point
    factor: Number


@dataclass(frozen=True)
class TransversalHit:
    u: Number
    point: Point
    scale: Number
    crossings: int


@dataclass
class GeodesicTrace:
    segments: list[tuple[Point, Point]] = field(default_factory=list)
    crossings: list[Crossing] = field(default_factory=list)
    hits: list[TransversalHit] = field(default_factory=list)
    status: str = "running"
    scale: Number = 1
    end: Point | None = None


def _tolerance(backend: Backend) -> float:
    return 0 if backend.exact else settings.CONE_TOLERANCE


def _exit(model: PolygonModel, p: Point, v: Point) -> tuple[Number, int, Number] | None:
    backend = backend_of(*p, *v, *model.vertices[0])
    eps = _tolerance(backend)
    best = None
    for i in range(5):
        start, end = model.edge(i)
        e = _sub(end, start)
        denom = _cross(v, e)
        if denom == 0:
            continue
        w = _sub(start, p)
        s = _cross(w, e) / denom
        r = _cross(w, v) / denom
        if s <= eps or r < -eps or r > 1 + eps:
            continue
        if best is None or s < best[0]:
            best = (s, i, r)
    return best


def _segment_hit(p: Point, v: Point, start: Point, end: Point, limit: Number, eps: float) -> tuple[Number, Number] | None:
    e = _sub(end, start)
    denom = _cross(v, e)
    if denom == 0:
        return None
    w = _sub(start, p)
    s = _cross(w, e) / denom
    u = _cross(w, v) / denom
    if s <= eps or s >= limit - eps or u <= eps or u >= 1 - eps:
        return None
    return s, u


def _flow(
    model: PolygonModel,
    start: Point,
    v: Point,
    transversal: tuple[int, int] | None = None,
    returns: int = 0,
    max_crossings: int | None = None,
) -> GeodesicTrace:
    max_crossings = settings.TRACE_MAX_CROSSINGS if max_crossings is None else max_crossings
    backend = backend_of(*start, *v, *model.vertices[0])
    eps = _tolerance(backend)
    trace = GeodesicTrace(scale=backend.one)
    p = start
    while True:
        found = _exit(model, p, v)
        if found is None:
            if trace.segments or trace.crossings:
                raise TorusError(f"lost the polygon at {_fmt_point(p)}")
            raise TraceError(f"no forward exit from {_fmt_point(p)}; the ray leaves through the boundary")
        s, i, r = found
        if transversal is not None and returns:
            t_start, t_end = model.vertices[transversal[0]], model.vertices[transversal[1]]
            hit = _segment_hit(p, v, t_start, t_end, s, eps)
            if hit is not None:
                point = _add(p, _scale(v, hit[0]))
                trace.segments.append((p, point))
                trace.hits.append(TransversalHit(hit[1], point, trace.scale, len(trace.crossings)))
                p = point
                if len(trace.hits) >= returns:
                    trace.status, trace.end = "returned", point
                    return trace
                continue
        q = _add(p, _scale(v, s))
        trace.segments.append((p, q))
        trace.end = q
        if r <= eps or r >= 1 - eps:
            trace.status = "cone-point"
            return trace
        if i == model.boundary_edge:
            trace.status = "boundary"
            return trace
        if len(trace.crossings) >= max_crossings:
            trace.status = "budget"
            return trace
        j, factor = model.partner(i)
        entry = model.glue(i, q)
        trace.crossings.append(Crossing(i, j, q, entry, factor))
        trace.scale = trace.scale * factor
        p = entry


def trace_geodesic(
    model: PolygonModel,
    start: Point,
    direction: Point,
    max_crossings: int | None = None,
    transversal: tuple[int, int] | None = None,
    returns: int = 0,
) -> GeodesicTrace:
    """Straight segments chained through the identifications until boundary, cone point, budget or returns."""
    if direction == (0, 0):
        raise TorusError("direction must be nonzero")
    trace = _flow(model, start, direction, transversal, returns, max_crossings)
    logger.debug(f"Traced {len(trace.crossings)} crossings from {_fmt_point(start)}: {trace.status}")
    return trace


# First return maps


@dataclass(frozen=True)
class ReturnPiece:
    domain: Interval
    slope: Number
    offset: Number

    def __call__(self, u: Number) -> Number:
        return self.slope * u + self.offset

    def image(self, within: Interval | None = None) -> Interval:
        dom = self.domain if within is None else self.domain.intersect(within)
        return Interval(self(dom.lo), self(dom.hi))


@dataclass
class FirstReturnOutcome:
    kind: Literal["bijective", "rho_map", "cylinder_contraction"]
    sector: str
    transversal: tuple[int, int]
    pieces: list[ReturnPiece]
    rho_map: RhoMap | None = None
    fixed_u: Number | None = None
    fixed_point: Point | None = None
    multiplier: Number | None = None


def _inside_angle(model: PolygonModel, k: int, w: Point) -> bool:
    here = model.vertices[k]
    nxt = _sub(model.vertices[(k + 1) % 5], here)
    prev = _sub(model.vertices[k - 1], here)
    return _cross(nxt, w) > 0 and _cross(w, prev) > 0


def _transversal_point(model: PolygonModel, transversal: tuple[int, int], u: Number) -> Point:
    start, end = model.vertices[transversal[0]], model.vertices[transversal[1]]
    return _add(start, _scale(_sub(end, start), u))


def return_pieces(model: PolygonModel, direction: Point, transversal: tuple[int, int], max_crossings: int | None = None) -> list[ReturnPiece]:
    """Affine pieces of the first return map to the transversal, cut where backward separatrices land."""
    backend = backend_of(*direction, *model.vertices[0])
    back = _neg(direction)
    cuts = set()
    for k, vertex in enumerate(model.vertices):
        if not _inside_angle(model, k, back):
            continue
        trace = _flow(model, vertex, back, transversal, 1, max_crossings)
        if trace.status == "returned":
            cuts.add(trace.hits[0].u)
        elif trace.status == "budget":
            logger.warning(f"Backward separatrix from vertex {k} exhausted its budget")
    points = [backend.zero] + sorted(cuts) + [backend.one]
    pieces = []
    for lo, hi in zip(points, points[1:]):
        mid = (lo + hi) / 2
        trace = _flow(model, _transversal_point(model, transversal, mid), direction, transversal, 1, max_crossings)
        if trace.status == "budget":
            raise TracingBudgetError(f"no return to the transversal within budget from u={fmt_scalar(mid)}")
        if trace.status != "returned":
            raise FirstReturnError(f"trajectory from u={fmt_scalar(mid)} ended at a {trace.status}")
        hit = trace.hits[0]
        piece = ReturnPiece(Interval(lo, hi), hit.scale, hit.u - hit.scale * mid)
        # separatrices that land on the transversal without breaking continuity
        if pieces and backend.eq(pieces[-1].slope, piece.slope) and backend.eq(pieces[-1].offset, piece.offset):
            piece = ReturnPiece(Interval(pieces[-1].domain.lo, hi), piece.slope, piece.offset)
            pieces[-1] = piece
        else:
            pieces.append(piece)
    return pieces


def first_return_map(model: PolygonModel, direction: Point, max_crossings: int | None = None) -> FirstReturnOutcome:
    """First return to the sector's transversal, restricted to its image and put in standard form."""
    decomposition = sector_decomposition(model)
    sector = decomposition.locate(model, direction)
    if sector == "m_B" and _dot(direction, model.boundary_direction()) < 0:
        direction = _neg(direction)
    transversal = model.transversal(sector)
    pieces = return_pieces(model, direction, transversal, max_crossings)
    backend = backend_of(*direction, *model.vertices[0])

    hull = Interval(backend.zero, backend.one)
    active = pieces
    for _ in range(8):
        active = [p for p in pieces if p.domain.intersect(hull).length > 0]
        if len(active) <= 1:
            break
        images = [p.image(hull) for p in active]
        new_hull = Interval(min(iv.lo for iv in images), max(iv.hi for iv in images))
        if backend.eq(new_hull.lo, hull.lo) and backend.eq(new_hull.hi, hull.hi):
            break
        hull = new_hull

    if len(active) == 1:
        piece = active[0]
        if not piece.slope < 1:
            raise FirstReturnError(f"single return piece with slope {fmt_scalar(piece.slope)} does not contract")
        fixed = piece.offset / (1 - piece.slope)
        return FirstReturnOutcome(
            "cylinder_contraction", sector, transversal, pieces,
            fixed_u=fixed, fixed_point=_transversal_point(model, transversal, fixed), multiplier=piece.slope,
        )
    if len(active) != 2:
        raise FirstReturnError(f"return map has {len(active)} pieces on its image hull")

    left, right = active
    x_t = left.domain.hi
    if not (backend.eq(left(x_t), hull.hi) and backend.eq(right(x_t), hull.lo)):
        raise FirstReturnError("return pieces do not swap the two sides of the breakpoint")
    rho_map = RhoMap(left.slope, right.slope, x_t, hull)
    kind = "bijective" if is_surjective(rho_map) else "rho_map"
    logger.debug(f"{sector}: {kind} on {hull} with factors ({fmt_scalar(left.slope)}, {fmt_scalar(right.slope)})")
    return FirstReturnOutcome(kind, sector, transversal, pieces, rho_map=rho_map)


# Rotation numbers and classification


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    error_bound: float
    rational: Fraction | None
    completely_periodic: bool
    iterations: int


def _circle_step(t: RhoMap, z: Number) -> tuple[Number, int]:
    if z < t.x_t:
        return 1 - t.rho_a * (t.x_t - z), 0
    return t.rho_b * (z - t.x_t), 1


def _displacement(t: RhoMap, z: Number, q: int) -> Number:
    start, wraps = z, 0
    for _ in range(q):
        z, w = _circle_step(t, z)
        wraps += w
    return z + wraps - start


def _circle_preimage(t: RhoMap, y: Number) -> Number:
    joint = 1 - t.rho_a * t.x_t
    if y >= joint:
        return t.x_t - (1 - y) / t.rho_a
    return t.x_t + y / t.rho_b


def _power_nodes(t: RhoMap, q: int) -> list:
    """Breakpoints of the q-th power on the circle: preimages of 0 and x_t under the first q - 1 powers."""
    nodes = {t.x_t * 0, t.x_t}
    frontier = list(nodes)
    for _ in range(q - 1):
        frontier = [_circle_preimage(t, y) for y in frontier]
        nodes.update(frontier)
    return sorted(nodes)


def rotation_number(t: RhoMap, tolerance: float | None = None) -> RotationEstimate:
    """Birkhoff estimate of the lift's displacement, with a certified check for rational values."""
    if not is_surjective(t):
        raise NotBijectiveError("rotation numbers need a bijective map")
    tolerance = settings.ROTATION_TOLERANCE if tolerance is None else tolerance
    unit = rescale_to_unit(t)
    fast = RhoMap.unit(float(unit.rho_a), float(unit.rho_b), float(unit.x_t))
    z = z0 = fast.x_t / 2
    wraps, n, checkpoint = 0, 0, 1024
    previous = None
    while True:
        z, w = _circle_step(fast, z)
        wraps += w
        n += 1
        if n < checkpoint:
            continue
        estimate = (wraps + z - z0) / n
        if previous is not None and abs(estimate - previous) < tolerance:
            break
        if n >= settings.ROTATION_MAX_ITERATIONS:
            logger.warning(f"Rotation estimate did not settle within {n} iterations")
            break
        previous, checkpoint = estimate, checkpoint * 2

    error_bound = 1 / n
    candidate = Fraction(estimate).limit_denominator(settings.RATIONAL_DENOMINATOR_CAP)
    rational, complete = None, False
    if abs(float(candidate) - estimate) <= max(error_bound, settings.RATIONAL_TOLERANCE):
        exact = unit.backend.exact
        slack = 0 if exact else settings.RATIONAL_TOLERANCE
        # F^q(x) - x - p is continuous and affine between the nodes
        gaps = [
            _displacement(unit, x, candidate.denominator) - candidate.numerator
            for x in _power_nodes(unit, candidate.denominator)
        ]
        if min(gaps) <= slack and max(gaps) >= -slack:
            rational = candidate
            complete = all(abs(g) <= slack for g in gaps)
    return RotationEstimate(estimate, error_bound, rational, complete, n)


@dataclass(frozen=True)
class DynamicsLabel:
    kind: LabelKind
    depth: int | None = None
    detail: str = ""
    sector: str | None = None


def classify_direction(model: PolygonModel, direction: Point, budget: int | None = None) -> DynamicsLabel:
    """Dynamics of the directional flow: periodic attraction, saddle connection, Cantor lamination or rotation."""
    budget = settings.TAIL_DEPTH if budget is None else budget
    try:
        outcome = first_return_map(model, direction)
    except SectorBoundaryError as e:
        return DynamicsLabel("saddle-connection", detail=str(e))
    except DilaflowError as e:
        logger.error(f"First return failed for direction {_fmt_point(direction)}: {e}", exc_info=True)
        return DynamicsLabel("unresolved", 0, detail=e.code)

    sector = outcome.sector
    if outcome.kind == "cylinder_contraction":
        return DynamicsLabel("attracting-periodic", detail=f"multiplier {fmt_scalar(outcome.multiplier)}", sector=sector)
    if outcome.kind == "bijective":
        estimate = rotation_number(outcome.rho_map)
        if estimate.rational is None:
            return DynamicsLabel("minimal", detail=f"rotation {estimate.value:.9f}", sector=sector)
        kind = "completely-periodic" if estimate.completely_periodic else "attracting-periodic"
        return DynamicsLabel(kind, detail=f"rotation {estimate.rational}", sector=sector)

    tail = classify_tail(outcome.rho_map, budget)
    if tail.kind == "terminating":
        try:
            orbit = terminal_orbit(tail.trace)
        except DilaflowError as e:
            return DynamicsLabel("unresolved", tail.depth, detail=e.code, sector=sector)
        if orbit.critical:
            return DynamicsLabel("saddle-connection", tail.depth, detail="periodic orbit meets the cone point", sector=sector)
        return DynamicsLabel("attracting-periodic", tail.depth, detail=f"period {orbit.period}", sector=sector)
    if tail.kind.startswith("one-sided"):
        return DynamicsLabel("saddle-connection", tail.depth, detail=tail.kind, sector=sector)
    if tail.kind == "infinite-both":
        return DynamicsLabel("cantor-lamination", tail.depth, detail=tail.word[-settings.TAIL_WINDOW:], sector=sector)
    return DynamicsLabel("unresolved", tail.depth, sector=sector)


def suspension_closure(model: PolygonModel, direction: Point) -> float:
    """Distance between the start and end of the suspended attracting cycle after one full period."""
    outcome = first_return_map(model, direction)
    if outcome.kind != "rho_map":
        raise FirstReturnError(f"suspension needs a rho_map outcome, got {outcome.kind}")
    tail = classify_tail(outcome.rho_map)
    if tail.kind != "terminating":
        raise FirstReturnError(f"direction does not terminate ({tail.kind})")
    orbit = terminal_orbit(tail.trace)
    start = _transversal_point(model, outcome.transversal, orbit.points[0])
    trace = _flow(model, start, direction, outcome.transversal, orbit.period)
    if trace.status != "returned":
        raise TracingBudgetError(f"suspended orbit stopped at a {trace.status}")
    end = trace.hits[-1].point
    return math.hypot(float(end[0] - start[0]), float(end[1] - start[1]))

