from __future__ import annotations

import json
from fractions import Fraction as F

import pytest

from src.aiet import (
    RhoMap,
    degenerate_side,
    evaluate,
    image_intervals,
    injectivity_domain,
    is_surjective,
    load_map,
    orbit,
    reflect,
    rescale_to_unit,
)
from src.errors import CriticalPointError, EmptyDomainError, NotInjectiveError, OutOfDomainError, ScalarKindError
from src.scalar import Interval


def test_branches_move_a_right_and_b_left(half_map: RhoMap) -> None:
    assert half_map(F(0)) == F(3, 4)
    assert half_map(F(1, 4)) == F(7, 8)
    assert half_map(F(1)) == F(1, 4)
    assert half_map(F(3, 4)) == F(1, 8)


def test_breakpoint_and_outside_points_raise(half_map: RhoMap) -> None:
    with pytest.raises(CriticalPointError):
        evaluate(half_map, F(1, 2))
    with pytest.raises(OutOfDomainError):
        evaluate(half_map, F(3, 2))
    with pytest.raises(ScalarKindError):
        evaluate(half_map, 0.25)


def test_image_intervals_and_gap(half_map: RhoMap) -> None:
    ta, tb, gap = image_intervals(half_map)
    assert (ta.lo, ta.hi) == (F(3, 4), F(1))
    assert (tb.lo, tb.hi) == (F(0), F(1, 4))
    assert (gap.lo, gap.hi, gap.lo_open, gap.hi_open) == (F(1, 4), F(3, 4), True, True)
    assert not is_surjective(half_map)


def test_surjective_map_has_empty_gap() -> None:
    t = RhoMap.unit(F(2), F(1, 2), F(1, 3))
    assert is_surjective(t)
    assert image_intervals(t)[2].length == 0


def test_constructor_rejects_bad_maps() -> None:
    with pytest.raises(NotInjectiveError):
        RhoMap.unit(F(6, 5), F(1, 2), F(9, 10))
    with pytest.raises(EmptyDomainError):
        RhoMap(F(1, 2), F(1, 2), F(0), Interval(F(0), F(0)))
    with pytest.raises(OutOfDomainError):
        RhoMap.unit(F(1, 2), F(1, 2), F(2))


@pytest.mark.parametrize(
    ("rho_a", "rho_b", "lo", "hi", "lo_open", "hi_open"),
    [
        (F(1, 2), F(1, 3), F(0), F(1), False, False),
        (F(6, 5), F(1, 2), F(0), F(5, 7), False, True),
        (F(1, 2), F(6, 5), F(2, 7), F(1), True, False),
    ],
)
def test_injectivity_domain(rho_a, rho_b, lo, hi, lo_open, hi_open) -> None:
    iv = injectivity_domain(rho_a, rho_b)
    assert (iv.lo, iv.hi, iv.lo_open, iv.hi_open) == (lo, hi, lo_open, hi_open)


def test_injectivity_domain_is_empty_for_two_expanding_factors() -> None:
    assert injectivity_domain(F(3, 2), F(5, 4)).length == 0


def test_reflection_conjugates_the_map() -> None:
    t = RhoMap.unit(F(1, 3), F(1, 2), F(2, 5))
    r = reflect(t)
    assert (r.rho_a, r.rho_b, r.x_t) == (F(1, 2), F(1, 3), F(3, 5))
    for x in (F(1, 10), F(1, 3), F(7, 10), F(9, 10)):
        assert r(1 - x) == 1 - t(x)


def test_rescale_to_unit() -> None:
    t = RhoMap(F(1, 2), F(1, 4), F(2, 5), Interval(F(0), F(4, 5)))
    unit = rescale_to_unit(t)
    assert (unit.x_t, unit.lo, unit.hi) == (F(1, 2), 0, 1)
    assert unit(F(1, 4)) == t(F(1, 5)) / F(4, 5)


def test_degenerate_sides() -> None:
    assert degenerate_side(RhoMap.unit(F(1, 2), F(1, 2), F(0))) == "left"
    assert degenerate_side(RhoMap.unit(F(1, 2), F(1, 2), F(1))) == "right"
    assert degenerate_side(RhoMap.unit(F(1, 2), F(1, 2), F(1, 3))) is None


def test_orbit_converges_to_two_cycle(half_map: RhoMap) -> None:
    result = orbit(half_map, F(1, 6), 10)
    assert result.status == "converged"
    assert result.period == 2
    assert result.points[:3] == [F(1, 6), F(5, 6), F(1, 6)]


def test_float_orbit_attracted_to_cycle() -> None:
    t = RhoMap.unit(0.5, 0.5, 0.5)
    result = orbit(t, 0.3, 500)
    assert result.status == "converged"
    assert result.period == 2
    assert sorted(result.points[-2:]) == pytest.approx([1 / 6, 5 / 6], abs=1e-12)


def test_orbit_stops_on_breakpoint() -> None:
    t = RhoMap.unit(F(1, 2), F(1, 2), F(3, 4))
    assert orbit(t, F(3, 4), 5).status == "hit-breakpoint"


def test_json_round_trip(tmp_path) -> None:
    t = RhoMap(F(1, 2), F(1, 4), F(2, 5), Interval(F(0), F(4, 5)))
    path = tmp_path / "map.json"
    path.write_text(json.dumps(t.to_json()))
    assert load_map(path) == t
    assert load_map(path, "f64").backend.name == "f64"
