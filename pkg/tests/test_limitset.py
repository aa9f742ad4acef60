from __future__ import annotations

from fractions import Fraction as F

import pytest

from src.aiet import RhoMap
from src.errors import WrongTailKindError
from src.limitset import classify_tail, fn_profile, fn_value, omega_cover, profile_grid
from src.paramspace import nested_witness, run_word

HALF = F(1, 2)


@pytest.fixture(scope="module")
def witness_map() -> RhoMap:
    return RhoMap.unit(HALF, HALF, nested_witness(HALF, HALF, run_word(7, 40)))


def test_first_values_at_one_half(half_map: RhoMap) -> None:
    assert [fn_value(half_map, n)[0] for n in range(3)] == [F(1, 2), F(3, 4), F(7, 8)]


def test_closed_form_up_to_twenty(half_map: RhoMap) -> None:
    for n in range(21):
        assert fn_value(half_map, n)[0] == 1 - F(1, 2 ** (n + 1))


def test_gap_splits_at_the_start(half_map: RhoMap) -> None:
    _, images = fn_value(half_map, 2)
    assert images.split_step == 0
    assert images.period == 2
    step_one = {p.lineage: (p.interval.lo, p.interval.hi) for p in images.at_step(1)}
    assert step_one == {"from-I1": (F(7, 8), F(1)), "from-I2": (F(0), F(1, 8))}
    assert [(p.interval.lo, p.interval.hi) for p in images.at_step(2)] == [(F(3, 16), F(1, 4)), (F(3, 4), F(13, 16))]


def test_maximal_intervals_reattach(half_map: RhoMap) -> None:
    assert len(fn_value(half_map, 1)[1].maximal_intervals()) == 3
    merged = fn_value(half_map, 2)[1].maximal_intervals()
    assert [(iv.lo, iv.hi) for iv in merged] == [(F(0), F(1, 8)), (F(3, 16), F(13, 16)), (F(7, 8), F(1))]


def test_surjective_map_has_no_gap_measure() -> None:
    value, images = fn_value(RhoMap.unit(F(2), HALF, F(1, 3)), 5)
    assert value == 0
    assert images.pieces == []


def test_zeroth_profile_is_the_gap_length() -> None:
    rho_a, rho_b = HALF, F(1, 3)
    profile = fn_profile(rho_a, rho_b, 0, 5)
    assert profile.grid == [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]
    for x, value in zip(profile.grid, profile.values):
        assert value == 1 - rho_b - (rho_a - rho_b) * x


def test_float_profile_matches_exact_point() -> None:
    profile = fn_profile(0.5, 0.5, 2, 3)
    assert profile.grid == [0.0, 0.5, 1.0]
    assert profile.values[1] == pytest.approx(7 / 8)
    assert profile.kink_count() == 0


def test_grid_stays_inside_half_open_domain() -> None:
    grid = profile_grid(1.2, 0.5, 10)
    assert len(grid) == 10
    assert grid[0] == 0.0
    assert max(grid) < 5 / 7


@pytest.mark.slow
def test_profile_is_nonincreasing() -> None:
    profile = fn_profile(0.9, 0.8, 9, 2000, workers=4)
    assert len(profile.values) == 2000
    assert profile.is_nonincreasing(1e-9)
    assert all(0 <= v <= 1 for v in profile.values)


def test_tail_classes() -> None:
    assert classify_tail(RhoMap.unit(HALF, HALF, F(4, 5))).kind == "terminating"
    assert classify_tail(RhoMap.unit(HALF, HALF, F(0))).kind == "one-sided-left"
    assert classify_tail(RhoMap.unit(HALF, HALF, F(1))).kind == "one-sided-right"
    assert classify_tail(RhoMap.unit(F(2), HALF, F(1, 3))).kind == "undetermined"
    assert classify_tail(RhoMap.unit(F(6, 5), HALF, F(2, 5))).kind == "terminating"


def test_witness_has_infinite_tail(witness_map: RhoMap) -> None:
    tail = classify_tail(witness_map, max_steps=40)
    assert tail.kind == "infinite-both"
    assert tail.word == run_word(7, 40)
    assert tail.depth == 40


def test_short_budget_is_undetermined(witness_map: RhoMap) -> None:
    assert classify_tail(witness_map, max_steps=5, window=8).kind == "undetermined"


def test_omega_cover_of_witness(witness_map: RhoMap) -> None:
    cover = omega_cover(witness_map, 30)
    assert cover.measure < F(1, 100)
    assert cover.measure == F(1, 2 ** 31)
    x = F(1, 3)
    for k in range(1050):
        x = witness_map(x)
        if k >= 50:
            assert cover.contains(x)


def test_omega_cover_needs_infinite_tail(half_map: RhoMap) -> None:
    with pytest.raises(WrongTailKindError):
        omega_cover(half_map)


@pytest.mark.parametrize(("rho_a", "rho_b"), [(0.7, 0.5), (0.5, 0.5)])
@pytest.mark.parametrize("n", range(10))
def test_profiles_are_nonincreasing(rho_a: float, rho_b: float, n: int) -> None:
    profile = fn_profile(rho_a, rho_b, n, 201)
    assert profile.is_nonincreasing(1e-9)
    assert all(0 <= v <= 1 for v in profile.values)


def test_gap_images_fill_the_interval() -> None:
    rho_a = F(7, 10)
    t = RhoMap.unit(rho_a, HALF, F(1, 3))
    values = [fn_value(t, n)[0] for n in range(30)]
    assert all(a <= b for a, b in zip(values, values[1:]))
    for n, value in enumerate(values):
        assert 1 - value <= rho_a ** (n + 1)


def test_boundary_cloud_sits_on_gap_ends(witness_map: RhoMap) -> None:
    cover = omega_cover(witness_map, 12)
    _, images = fn_value(witness_map, 12)
    ends = {e for p in images.pieces for e in (p.interval.lo, p.interval.hi)}
    assert cover.boundary_cloud == sorted(cover.boundary_cloud)
    assert len(cover.boundary_cloud) > 2
    assert set(cover.boundary_cloud) <= ends
    for x in cover.boundary_cloud:
        assert not any(p.interval.interior_contains(x) for p in images.pieces)


@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 9])
def test_exact_and_float_profiles_agree(n: int) -> None:
    exact = fn_profile(F(7, 10), HALF, n, 41)
    approx = fn_profile(0.7, 0.5, n, 41)
    assert len(exact.values) == len(approx.values) == 41
    for x, y, u, v in zip(exact.grid, approx.grid, exact.values, approx.values):
        assert float(x) == pytest.approx(y, abs=1e-15)
        assert float(u) == pytest.approx(v, abs=1e-12)
