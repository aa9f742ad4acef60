"""Command-line entry point: python -m src.cli <command> [options]."""
import argparse
import json
import math
import sys
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from src import __version__, settings
from src.aiet import RhoMap, injectivity_domain, load_map
from src.errors import DilaflowError, NotInjectiveError, ScalarParseError, SectorBoundaryError, TorusError
from src.limitset import fn_profile
from src.logging_conf import logger
from src.paramspace import enumerate_cells
from src.rauzy import induct, modified_induct, terminal_orbit
from src.render import line_plot_svg, pentagon_svg, save_svg, strip_plot_svg
from src.reports import write_csv, write_json
from src.scalar import EXACT_BACKEND, Interval, fmt_scalar, infer_backend
from src.torus import (
    chart_angle,
    classify_direction,
    direction_from_angle,
    direction_from_slope,
    load_model,
    sector_decomposition,
    trace_geodesic,
)
from src.workers import map_ordered


@dataclass
class RunConfig:
    """Fully resolved run parameters, echoed into every output header."""

    command: str
    backend: str
    workers: int
    out_dir: str
    seed: int
    png: bool
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dilaflow", description="Dynamics of (rho_A, rho_B)-maps and dilation tori")
    parser.add_argument("--version", action="version", version=f"dilaflow {__version__}")
    parser.add_argument("--backend", choices=settings.BACKEND_CHOICES, default=None,
                        help="arithmetic backend (default: DILAFLOW_BACKEND, then inferred from the literals)")
    parser.add_argument("--workers", type=int, default=settings.MAX_PARALLEL_JOBS)
    parser.add_argument("--out-dir", type=Path, default=settings.OUTPUT_DIR)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--png", action="store_true", default=settings.PNG_EXPORT, help="also rasterise SVG output")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("induct", help="Rauzy-Veech induction of one map")
    p.add_argument("--rho-a")
    p.add_argument("--rho-b")
    p.add_argument("--x-t")
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="1")
    p.add_argument("--map", type=Path, help="JSON file with rho_a, rho_b, x_t and optional domain")
    p.add_argument("--max-steps", type=int, default=None)

    p = commands.add_parser("cantor", help="parameter-space cells I(w), H(w)")
    p.add_argument("--rho-a", required=True)
    p.add_argument("--rho-b", required=True)
    p.add_argument("--depth", type=int, default=6)

    p = commands.add_parser("fn", help="profile of f_n over the breakpoint")
    p.add_argument("--rho-a", required=True)
    p.add_argument("--rho-b", required=True)
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--grid", type=int, default=200)

    p = commands.add_parser("torus", help="one-holed dilation torus model")
    p.add_argument("--model", type=Path, default=settings.DEFAULT_MODEL)
    actions = p.add_subparsers(dest="action", required=True)
    actions.add_parser("validate")
    actions.add_parser("sectors")
    q = actions.add_parser("classify")
    q.add_argument("--grid", type=int, default=100, help="directions pi*(i+1/2)/N in the chart")
    q.add_argument("--sample", type=int, default=0, help="extra uniformly sampled directions (uses --seed)")
    q.add_argument("--budget", type=int, default=settings.TAIL_DEPTH)
    q = actions.add_parser("trace")
    group = q.add_mutually_exclusive_group(required=True)
    group.add_argument("--angle", type=float, help="chart angle, clockwise from the boundary direction")
    group.add_argument("--slope", help="slope of the direction; 'inf' for vertical")
    q.add_argument("--start", required=True, help="start point x,y inside the polygon")
    q.add_argument("--crossings", type=int, default=settings.TRACE_MAX_CROSSINGS)
    return parser


def _override(args) -> str | None:
    choice = args.backend or settings.DILAFLOW_BACKEND
    return None if choice == "auto" else choice


def _config(args, backend: str, **params) -> RunConfig:
    return RunConfig(
        command=args.command if args.command != "torus" else f"torus {args.action}",
        backend=backend,
        workers=args.workers,
        out_dir=str(args.out_dir),
        seed=args.seed,
        png=bool(args.png),
        params=params,
    )


def _read_map(args) -> RhoMap:
    if args.map is not None:
        return load_map(args.map, _override(args))
    if None in (args.rho_a, args.rho_b, args.x_t):
        raise ScalarParseError("induct needs --map or all of --rho-a, --rho-b, --x-t", "", 0)
    texts = [args.rho_a, args.rho_b, args.x_t, args.lo, args.hi]
    backend = infer_backend(texts, _override(args))
    rho_a, rho_b, x_t, lo, hi = (backend.parse(t) for t in texts)
    domain = Interval(lo, hi)
    allowed = injectivity_domain(rho_a, rho_b)
    if not allowed.contains((x_t - lo) / domain.length):
        raise NotInjectiveError(f"x_t {fmt_scalar(x_t)} outside injectivity domain {allowed}")
    return RhoMap(rho_a, rho_b, x_t, domain)


def cmd_induct(args, run_id: str) -> int:
    t = _read_map(args)
    config = _config(args, t.backend.name, map=t.to_json(), max_steps=args.max_steps)
    extra = {"command": "induct", "backend": t.backend.name, "run_id": run_id}
    if t.rho_a <= 1 and t.rho_b <= 1:
        trace = induct(t, args.max_steps)
    else:
        trace = modified_induct(t, args.max_steps)
    logger.info(f"Induction finished: {trace.terminal().outcome}", extra=extra)

    print(f"map: rho_a={fmt_scalar(t.rho_a)} rho_b={fmt_scalar(t.rho_b)} x_t={fmt_scalar(t.x_t)} domain {t.domain}")
    print(f"word: {trace.full_word!r}")
    part = trace
    while part is not None:
        for k, step in enumerate(part.steps):
            label = f" [{step.branch}]" if step.branch else ""
            print(f"  {k:3d} {step.kind:9s}{label} exponents={step.exponents.as_tuple()} M={step.matrix.rows()} domain {step.domain}")
        part = part.sub_trace
    end = trace.terminal()
    print(f"outcome: {end.outcome}" + (f" ({end.side})" if end.side else ""))
    data = {"trace": trace.to_json()}
    if end.outcome == "terminated":
        orbit = terminal_orbit(trace)
        cycle = ", ".join(fmt_scalar(p) for p in sorted(orbit.points))
        print(f"cycle: {{{cycle}}} period {orbit.period} multiplier {fmt_scalar(orbit.multiplier)}")
        if orbit.critical:
            print("cycle meets the breakpoint")
        data["orbit"] = {
            "points": [fmt_scalar(p) for p in orbit.points],
            "period": orbit.period,
            "multiplier": fmt_scalar(orbit.multiplier),
            "critical": orbit.critical,
        }
    write_json(args.out_dir / "induct_trace.json", config.to_dict(), data)
    return 0


def cmd_cantor(args, run_id: str) -> int:
    rho_a, rho_b = EXACT_BACKEND.parse(args.rho_a), EXACT_BACKEND.parse(args.rho_b)
    config = _config(args, EXACT_BACKEND.name, rho_a=args.rho_a, rho_b=args.rho_b, depth=args.depth).to_dict()
    report = enumerate_cells(rho_a, rho_b, args.depth, workers=args.workers)
    logger.info(f"Cantor cells: {len(report.cells)}", extra={"command": "cantor", "backend": "exact", "run_id": run_id})

    write_csv(
        args.out_dir / "cantor_cells.csv",
        config,
        ("word", "i_lo", "i_hi", "h_lo", "h_hi"),
        ((c.word, fmt_scalar(c.i_w.lo), fmt_scalar(c.i_w.hi), fmt_scalar(c.h_w.lo), fmt_scalar(c.h_w.hi)) for c in report.cells),
    )
    write_csv(
        args.out_dir / "cantor_levels.csv",
        config,
        ("depth", "complement_measure"),
        ((k, fmt_scalar(m)) for k, m in enumerate(report.level_complements)),
    )
    svg = strip_plot_svg(report.cells, args.depth, title=f"H(w) cells, rho=({args.rho_a}, {args.rho_b})")
    save_svg(svg, args.out_dir / "cantor_strip.svg", png=args.png)
    print(f"cells: {len(report.cells)}")
    print(f"complement measure: {fmt_scalar(report.complement_measure)} (~{float(report.complement_measure):.6g})")
    print(f"N = {report.n_threshold}, delta = {fmt_scalar(report.delta_bound)}")
    return 0


def cmd_fn(args, run_id: str) -> int:
    backend = infer_backend([args.rho_a, args.rho_b], _override(args))
    rho_a, rho_b = backend.parse(args.rho_a), backend.parse(args.rho_b)
    config = _config(args, backend.name, rho_a=args.rho_a, rho_b=args.rho_b, n=args.n, grid=args.grid).to_dict()
    profile = fn_profile(rho_a, rho_b, args.n, args.grid, workers=args.workers)
    logger.info(f"f_{args.n} sampled at {len(profile.grid)} points", extra={"command": "fn", "backend": backend.name, "run_id": run_id})

    write_csv(
        args.out_dir / "fn_profile.csv",
        config,
        ("x_t", "f_n"),
        ((fmt_scalar(x), fmt_scalar(v)) for x, v in zip(profile.grid, profile.values)),
    )
    svg = line_plot_svg(
        [float(x) for x in profile.grid],
        [float(v) for v in profile.values],
        title=f"f_{args.n}, rho=({args.rho_a}, {args.rho_b})",
    )
    save_svg(svg, args.out_dir / "fn_profile.svg", png=args.png)
    print(f"f_{args.n}: {len(profile.grid)} points, nonincreasing={profile.is_nonincreasing()}")
    return 0


def _parse_start(text: str, backend) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise ScalarParseError("start point must be x,y", text, len(text) + 1)
    return backend.parse(parts[0].strip()), backend.parse(parts[1].strip())


def _sector_of(model, direction) -> str:
    try:
        return sector_decomposition(model).locate(model, direction)
    except SectorBoundaryError:
        return "boundary"
    except TorusError:
        return ""


def cmd_torus(args, run_id: str) -> int:
    override = _override(args)
    model = load_model(args.model, override)
    extra = {"command": f"torus {args.action}", "backend": model.backend.name, "run_id": run_id}

    if args.action == "validate":
        print(f"model {model.name}: valid ({model.backend.name} backend)")
        print(f"boundary edge: {model.boundary_edge}")
        for p in model.pairings:
            print(f"edge {p.edge_a} ~ edge {p.edge_b}, dilation {fmt_scalar(p.factor)}")
        logger.info(f"Validated {args.model}", extra=extra)
        return 0

    if args.action == "sectors":
        config = _config(args, model.backend.name, model=str(args.model)).to_dict()
        decomposition = sector_decomposition(model)
        m_b = decomposition.m_b
        rows = [("m_B", m_b)] + [(b.name, b.vector) for b in decomposition.boundaries] + [("m_B reversed", (-m_b[0], -m_b[1]))]
        table = []
        for name, v in rows:
            slope = "inf" if v[0] == 0 else fmt_scalar(v[1] / v[0])
            angle = chart_angle(model, v)
            table.append((name, fmt_scalar(v[0]), fmt_scalar(v[1]), slope, f"{angle:.12f}"))
            print(f"{name:14s} vector ({fmt_scalar(v[0])}, {fmt_scalar(v[1])}) slope {slope} angle {angle:.6f}")
        print("sectors: " + ", ".join(decomposition.sectors))
        write_csv(args.out_dir / "torus_sectors.csv", config, ("boundary", "vx", "vy", "slope", "angle"), table)
        return 0

    if args.action == "classify":
        work = model.as_float()
        angles = [math.pi * (i + 0.5) / args.grid for i in range(args.grid)]
        if args.sample > 0:
            rng = np.random.default_rng(args.seed)
            angles += sorted(float(a) for a in rng.uniform(0.0, math.pi, args.sample))
        config = _config(args, "f64", model=str(args.model), grid=args.grid, sample=args.sample, budget=args.budget).to_dict()

        def classify(angle: float):
            direction = direction_from_angle(work, angle)
            label = classify_direction(work, direction, args.budget)
            return label.sector or _sector_of(work, direction), label

        results = map_ordered(classify, angles, args.workers)
        write_csv(
            args.out_dir / "torus_classify.csv",
            config,
            ("angle", "sector", "label", "depth", "detail"),
            ((f"{a:.12f}", sector, label.kind, "" if label.depth is None else label.depth, label.detail)
             for a, (sector, label) in zip(angles, results)),
        )
        counts: dict[str, int] = {}
        for _, label in results:
            counts[label.kind] = counts.get(label.kind, 0) + 1
        logger.info(f"Classified {len(angles)} directions: {counts}", extra={**extra, "backend": "f64"})
        for kind in sorted(counts):
            print(f"{kind}: {counts[kind]}")
        return 0

    # trace
    backend = model.backend
    if args.angle is not None:
        model = model.as_float()
        backend = model.backend
        direction = direction_from_angle(model, args.angle)
    else:
        slope = None if args.slope.strip().lower() == "inf" else backend.parse(args.slope)
        direction = direction_from_slope(model, slope)
    start = _parse_start(args.start, backend)
    config = _config(args, backend.name, model=str(args.model), angle=args.angle, slope=args.slope,
                     start=args.start, crossings=args.crossings).to_dict()
    trace = trace_geodesic(model, start, direction, max_crossings=args.crossings)
    end = trace.end if trace.end is not None else start
    gap = math.hypot(float(end[0]) - float(start[0]), float(end[1]) - float(start[1]))
    logger.info(f"Trace stopped: {trace.status} after {len(trace.crossings)} crossings", extra=extra)
    svg = pentagon_svg(model, trace.segments, title=f"{model.name}: {len(trace.crossings)} crossings, {trace.status}")
    save_svg(svg, args.out_dir / "torus_trace.svg", png=args.png)
    write_csv(
        args.out_dir / "torus_trace.csv",
        config,
        ("exit_edge", "entry_edge", "exit_x", "exit_y", "entry_x", "entry_y", "factor"),
        ((c.exit_edge, c.entry_edge, fmt_scalar(c.exit_point[0]), fmt_scalar(c.exit_point[1]),
          fmt_scalar(c.entry_point[0]), fmt_scalar(c.entry_point[1]), fmt_scalar(c.factor)) for c in trace.crossings),
    )
    print(f"status: {trace.status}, crossings {len(trace.crossings)}, scale {fmt_scalar(trace.scale)}")
    print(f"end ({fmt_scalar(end[0])}, {fmt_scalar(end[1])}), distance to start {gap:.3g}")
    return 0


COMMANDS = {"induct": cmd_induct, "cantor": cmd_cantor, "fn": cmd_fn, "torus": cmd_torus}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings.validate_config()
    except ValueError as e:
        logger.error(str(e))
        return 1

    run_id = uuid.uuid4().hex[:8]
    logger.info(f"dilaflow {__version__}: {args.command}", extra={"command": args.command, "run_id": run_id})
    try:
        return COMMANDS[args.command](args, run_id)
    except DilaflowError as e:
        logger.error(f"{args.command} failed: {e}", extra={"command": args.command, "run_id": run_id})
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
