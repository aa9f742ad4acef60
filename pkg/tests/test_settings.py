from __future__ import annotations

import pytest

from src import settings
from src.errors import DepthCapExceededError
from src.limits import check_cap, env_cap, env_flag
from src.reports import header_lines, read_csv_rows, write_csv
from src.render import line_plot_svg, save_svg, svg_to_image
from src.workers import map_ordered


def test_default_config_is_valid() -> None:
    settings.validate_config()


def test_invalid_config_collects_errors(monkeypatch) -> None:
    monkeypatch.setattr(settings, "DILAFLOW_BACKEND", "decimal")
    monkeypatch.setattr(settings, "TAIL_WINDOW", settings.TAIL_DEPTH + 1)
    with pytest.raises(ValueError) as err:
        settings.validate_config()
    message = str(err.value)
    assert message.startswith("Configuration errors:")
    assert "DILAFLOW_BACKEND" in message
    assert "TAIL_WINDOW" in message


@pytest.mark.parametrize(("value", "expected"), [("5", 5), ("0", None), ("-3", None), ("junk", 16)])
def test_env_cap(monkeypatch, value: str, expected) -> None:
    monkeypatch.setenv("TEST_CAP", value)
    assert env_cap("TEST_CAP", "16") == expected


def test_env_flag(monkeypatch) -> None:
    monkeypatch.setenv("TEST_FLAG", "Yes")
    assert env_flag("TEST_FLAG")
    monkeypatch.delenv("TEST_FLAG")
    assert not env_flag("TEST_FLAG")


def test_check_cap() -> None:
    check_cap(16, 16, "depth")
    check_cap(100, None, "depth")
    with pytest.raises(DepthCapExceededError):
        check_cap(17, 16, "depth")


def test_map_ordered_keeps_input_order() -> None:
    assert map_ordered(lambda x: x * x, range(50), workers=8) == [x * x for x in range(50)]
    assert map_ordered(str, [1, 2], workers=1) == ["1", "2"]


def test_map_ordered_reraises() -> None:
    def boom(x: int) -> int:
        if x == 3:
            raise RuntimeError("bad item")
        return x

    with pytest.raises(RuntimeError):
        map_ordered(boom, range(6), workers=3)


def test_csv_report_header(tmp_path) -> None:
    path = write_csv(tmp_path / "out.csv", {"command": "fn"}, ("a", "b"), [(1, "1/2")])
    lines = path.read_text().splitlines()
    assert lines[:2] == header_lines({"command": "fn"})
    assert read_csv_rows(path) == [["a", "b"], ["1", "1/2"]]


def test_svg_written_without_png(tmp_path) -> None:
    svg = line_plot_svg([0.0, 0.5, 1.0], [1.0, 0.5, float("nan")], title="f<n>")
    assert "f&lt;n&gt;" in svg
    path = save_svg(svg, tmp_path / "plot.svg")
    assert path.read_text() == svg
    assert not (tmp_path / "plot.png").exists()


def test_png_is_flattened_to_rgb(tmp_path) -> None:
    svg = line_plot_svg([0.0, 1.0], [0.0, 1.0], width=120)
    img = svg_to_image(svg, 120)
    assert img is not None
    assert img.mode == "RGB"
    assert img.size[0] == 240
    save_svg(svg, tmp_path / "plot.svg", png=True, width=120)
    assert (tmp_path / "plot.png").exists()
