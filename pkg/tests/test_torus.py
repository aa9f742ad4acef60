from __future__ import annotations

import json
import math
from fractions import Fraction as F

import pytest

from src.aiet import RhoMap
from src.errors import ModelError, NotBijectiveError, SectorBoundaryError, TorusError
from src.torus import (
    _power_nodes,
    chart_angle,
    classify_direction,
    direction_from_angle,
    direction_from_slope,
    first_return_map,
    load_model,
    rotation_number,
    sector_decomposition,
    suspension_closure,
    trace_geodesic,
    validate_model,
)
from tests.conftest import MODEL_PATH

VERTICAL = (F(0), F(1))


def _raw() -> dict:
    return json.loads(MODEL_PATH.read_text())


def test_model_validates(pentagon) -> None:
    assert pentagon.backend.exact
    assert pentagon.boundary_edge == 4
    assert [p.factor for p in pentagon.pairings] == [F(9, 5), F(2)]
    assert pentagon.vertex("E") == (F(3, 10), F(1))
    assert pentagon.vertex("A") == (F(1), F(0))
    assert pentagon.transversal("I3") == (1, 3)


def test_gluing_maps_edges_onto_partners(pentagon) -> None:
    assert pentagon.partner(2) == (0, F(5, 9))
    assert pentagon.glue(2, (F(3, 2), F(2))) == (F(3, 2), F(0))
    assert pentagon.glue(3, pentagon.vertex("D")) == pentagon.vertex("C")


@pytest.mark.parametrize(
    ("edit", "code"),
    [
        (lambda raw: raw["pairings"].pop(), "boundary-count"),
        (lambda raw: raw["vertices"].reverse(), "non-convex"),
        (lambda raw: raw["pairings"][0].update(factor="2"), "non-parallel-pair"),
        (lambda raw: raw["vertices"].append(["1/2", "1/2"]), "boundary-count"),
        (lambda raw: raw["transversals"].update(I3="BZ"), "parse-error"),
    ],
)
def test_invalid_models(edit, code: str) -> None:
    raw = _raw()
    edit(raw)
    with pytest.raises(ModelError) as err:
        validate_model(raw)
    assert err.value.code == code


def test_malformed_json_reports_position(tmp_path) -> None:
    path = tmp_path / "broken.json"
    path.write_text('{\n  "vertices": [\n    ["1", "0"],\n')
    with pytest.raises(ModelError) as err:
        load_model(path)
    assert err.value.code == "parse-error"
    assert err.value.line is not None
    assert "line" in err.value.to_dict()


def test_sector_boundaries(pentagon) -> None:
    decomposition = sector_decomposition(pentagon)
    vectors = {b.name: b.vector for b in decomposition.boundaries}
    assert vectors == {
        "diagonal A-D": (F(-2, 5), F(2)),
        "A-pair edge": (F(3, 5), F(2)),
        "B-pair edge": (F(5, 4), F(0)),
        "diagonal E-B": (F(39, 20), F(-1)),
    }
    assert [b.name for b in decomposition.boundaries] == ["diagonal A-D", "A-pair edge", "B-pair edge", "diagonal E-B"]
    assert decomposition.m_b == (F(-7, 10), F(1))
    angles = [chart_angle(pentagon, b.vector) for b in decomposition.boundaries]
    assert angles == sorted(angles)
    assert all(0 < a < math.pi for a in angles)


@pytest.mark.parametrize(
    ("direction", "sector"),
    [
        ((F(-1, 2), F(1)), "I1"),
        (VERTICAL, "I2"),
        ((F(1), F(1)), "I3"),
        ((F(1), F(-1, 4)), "I4"),
        ((F(1), F(-1)), "I5"),
        ((F(-7, 10), F(1)), "m_B"),
    ],
)
def test_locate_sectors(pentagon, direction, sector: str) -> None:
    assert sector_decomposition(pentagon).locate(pentagon, direction) == sector


def test_saddle_and_backward_directions_rejected(pentagon) -> None:
    decomposition = sector_decomposition(pentagon)
    with pytest.raises(SectorBoundaryError):
        decomposition.locate(pentagon, (F(5, 4), F(0)))
    with pytest.raises(TorusError):
        decomposition.locate(pentagon, (F(-1), F(-1)))


def test_direction_charts(pentagon) -> None:
    assert direction_from_slope(pentagon, None) == VERTICAL
    assert direction_from_slope(pentagon, F(-2)) == (F(-1), F(2))
    vx, vy = direction_from_angle(pentagon, 0.0)
    assert vy / vx == pytest.approx(-10 / 7)
    v = direction_from_angle(pentagon, 1.0)
    assert chart_angle(pentagon, v) == pytest.approx(1.0)


def test_vertical_flow_is_periodic_cylinder(pentagon) -> None:
    trace = trace_geodesic(pentagon, (F(3, 2), F(1)), VERTICAL, max_crossings=5)
    assert trace.status == "budget"
    assert len(trace.crossings) == 5
    assert len(trace.segments) == 6
    assert trace.scale == F(5, 9) ** 5
    assert all(seg[0][0] == F(3, 2) for seg in trace.segments)


def test_first_return_vertical(pentagon) -> None:
    outcome = first_return_map(pentagon, VERTICAL)
    assert outcome.kind == "cylinder_contraction"
    assert outcome.sector == "I2"
    assert outcome.fixed_u == F(8, 17)
    assert outcome.multiplier == F(5, 9)
    assert outcome.fixed_point == (F(3, 2), F(25, 17))
    assert outcome.pieces[0].domain.hi == F(2, 17)


def test_first_return_sector_three(pentagon) -> None:
    outcome = first_return_map(pentagon, (F(1), F(1)))
    assert outcome.kind == "rho_map"
    t = outcome.rho_map
    assert (t.rho_a, t.rho_b, t.x_t) == (F(1, 2), F(5, 9), F(28, 73))
    assert (t.lo, t.hi) == (F(0), F(1))
    assert t(F(0)) == F(59, 73)
    assert t(F(1)) == F(25, 73)


def test_first_return_parallel_to_boundary_is_bijective(pentagon) -> None:
    outcome = first_return_map(pentagon, (F(-7, 10), F(1)))
    assert outcome.kind == "bijective"
    t = outcome.rho_map
    assert (t.rho_a, t.rho_b, t.x_t) == (F(2), F(5, 9), F(4, 13))


def test_first_return_sector_one(pentagon) -> None:
    outcome = first_return_map(pentagon, direction_from_slope(pentagon, F(-2)))
    assert outcome.kind == "rho_map"
    t = outcome.rho_map
    assert (t.rho_a, t.rho_b, t.x_t) == (F(2), F(5, 9), F(16, 61))
    assert (t.lo, t.hi) == (F(4, 61), F(1))


def test_first_return_sector_four(pentagon) -> None:
    outcome = first_return_map(pentagon, (F(1), F(-1, 4)))
    assert outcome.kind == "cylinder_contraction"
    assert 0 < outcome.multiplier < 1


def test_first_return_sector_five(pentagon) -> None:
    outcome = first_return_map(pentagon, (F(1), F(-1)))
    assert outcome.kind == "rho_map"
    t = outcome.rho_map
    assert (t.rho_a, t.rho_b, t.x_t) == (F(9, 5), F(1, 2), F(25, 77))


@pytest.mark.parametrize(
    ("t", "value", "periodic"),
    [
        (RhoMap.unit(F(1), F(1), F(1, 4)), F(3, 4), True),
        (RhoMap.unit(F(2), F(1, 2), F(1, 3)), F(1, 2), True),
    ],
)
def test_rational_rotation_numbers(t: RhoMap, value: F, periodic: bool) -> None:
    estimate = rotation_number(t)
    assert estimate.rational == value
    assert estimate.completely_periodic is periodic
    assert estimate.value == pytest.approx(float(value), abs=estimate.error_bound)


def test_irrational_rotation_number() -> None:
    estimate = rotation_number(RhoMap.unit(1.0, 1.0, 1 - 1 / math.sqrt(2)))
    assert estimate.rational is None
    assert estimate.value == pytest.approx(1 / math.sqrt(2), abs=1e-3)


def test_rotation_needs_bijection(half_map: RhoMap) -> None:
    with pytest.raises(NotBijectiveError):
        rotation_number(half_map)


def test_classify_directions(pentagon) -> None:
    assert classify_direction(pentagon, VERTICAL).kind == "attracting-periodic"
    label = classify_direction(pentagon, (F(1), F(1)))
    assert (label.kind, label.sector, label.detail) == ("attracting-periodic", "I3", "period 2")
    assert classify_direction(pentagon, (F(5, 4), F(0))).kind == "saddle-connection"


def test_suspended_orbit_closes(pentagon) -> None:
    assert suspension_closure(pentagon, (F(1), F(1))) < 1e-8


@pytest.mark.slow
def test_sector_return_types_on_float_model(pentagon_float) -> None:
    decomposition = sector_decomposition(pentagon_float)
    edges = [0.0] + [chart_angle(pentagon_float, b.vector) for b in decomposition.boundaries] + [math.pi]
    for k, (lo, hi) in enumerate(zip(edges, edges[1:]), start=1):
        for i in range(200):
            angle = lo + (hi - lo) * (i + 0.5) / 200
            outcome = first_return_map(pentagon_float, direction_from_angle(pentagon_float, angle))
            assert outcome.sector == f"I{k}"
            if k in (2, 4):
                assert outcome.kind == "cylinder_contraction"
                assert 0 < outcome.multiplier < 1
                continue
            assert outcome.kind == "rho_map"
            t = outcome.rho_map
            if k == 3:
                assert (t.rho_a, t.rho_b) == (pytest.approx(0.5, rel=1e-9), pytest.approx(5 / 9, rel=1e-9))
            else:
                assert max(t.rho_a, t.rho_b) >= 1 > min(t.rho_a, t.rho_b)


@pytest.mark.slow
def test_direction_grid_is_mostly_resolved(pentagon_float) -> None:
    size = 10_000
    angles = [math.pi * (i + 0.5) / size for i in range(size)]
    unresolved = [
        angle
        for angle in angles
        if classify_direction(pentagon_float, direction_from_angle(pentagon_float, angle), budget=40).kind == "unresolved"
    ]
    assert len(unresolved) <= 0.02 * size
    still_unresolved = [
        angle
        for angle in unresolved
        if classify_direction(pentagon_float, direction_from_angle(pentagon_float, angle), budget=80).kind == "unresolved"
    ]
    assert len(still_unresolved) < len(unresolved) or not unresolved


def test_sector_three_factors_agree_across_backends(pentagon, pentagon_float) -> None:
    exact = first_return_map(pentagon, (F(1), F(1))).rho_map
    approx = first_return_map(pentagon_float, (1.0, 1.0)).rho_map
    for a, b in zip((exact.rho_a, exact.rho_b, exact.x_t), (approx.rho_a, approx.rho_b, approx.x_t)):
        assert float(a) == pytest.approx(b, rel=1e-9)


@pytest.mark.parametrize("pairing", [0, 1])
def test_gluing_there_and_back_is_the_identity(pentagon, pairing: int) -> None:
    p = pentagon.pairings[pairing]
    start, end = pentagon.edge(p.edge_a)
    for k in range(8):
        z = (start[0] + (end[0] - start[0]) * F(k, 7), start[1] + (end[1] - start[1]) * F(k, 7))
        w = pentagon.glue(p.edge_a, z)
        partner_start, partner_end = pentagon.edge(p.edge_b)
        assert (w[0] - partner_start[0]) * (partner_end[1] - partner_start[1]) == (w[1] - partner_start[1]) * (
            partner_end[0] - partner_start[0]
        )
        assert pentagon.glue(p.edge_b, w) == z
    assert pentagon.glue(p.edge_a, start) == pentagon.edge(p.edge_b)[1]


def test_rational_check_uses_power_breakpoints() -> None:
    assert _power_nodes(RhoMap.unit(F(1), F(1), F(1, 4)), 4) == [F(0), F(1, 4), F(1, 2), F(3, 4)]
    assert _power_nodes(RhoMap.unit(F(2), F(1, 2), F(1, 3)), 2) == [F(0), F(1, 3)]
