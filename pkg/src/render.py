"""SVG plots written as text, with optional PNG rasterisation."""
import logging
from io import BytesIO
from pathlib import Path
from typing import Optional, Sequence

import cairosvg
from PIL import Image

from src import settings

logger = logging.getLogger(__name__)

MARGIN = 40
PALETTE = {"boundary": "#c0392b", "pair_a": "#2471a3", "pair_b": "#229954", "trace": "#7d3c98", "cell": "#1f618d"}


def _document(width: int, height: int, body: list[str], title: str = "") -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    parts = [head, f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        parts.append(f'<text x="{MARGIN}" y="{MARGIN // 2 + 4}" font-family="sans-serif" font-size="13">{_escape(title)}</text>')
    return "\n".join(parts + body + ["</svg>"]) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def line_plot_svg(xs: Sequence[float], ys: Sequence[float], title: str = "", width: int | None = None) -> str:
    """Polyline over the unit square axes [0, 1] x [0, 1]."""
    width = width or settings.SVG_WIDTH
    height = int(width * 0.75)
    plot_w, plot_h = width - 2 * MARGIN, height - 2 * MARGIN

    def px(x: float) -> float:
        return MARGIN + float(x) * plot_w

    def py(y: float) -> float:
        return height - MARGIN - float(y) * plot_h

    body = [f'<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>']
    for tick in (0, 0.25, 0.5, 0.75, 1):
        body.append(f'<text x="{px(tick) - 8:.1f}" y="{height - MARGIN + 16}" font-size="11">{tick:g}</text>')
        body.append(f'<text x="{MARGIN - 30}" y="{py(tick) + 4:.1f}" font-size="11">{tick:g}</text>')
    points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys) if y == y)
    body.append(f'<polyline points="{points}" fill="none" stroke="{PALETTE["trace"]}" stroke-width="1.5"/>')
    return _document(width, height, body, title)


def strip_plot_svg(cells: Sequence, depth: int, title: str = "", width: int | None = None) -> str:
    """One row per word length: I(w) as a thin bar, H(w) as a filled block inside it."""
    width = width or settings.SVG_WIDTH
    row = 28
    height = 2 * MARGIN + row * (depth + 1)
    plot_w = width - 2 * MARGIN
    body = []
    for cell in cells:
        y = MARGIN + row * len(cell.word)
        i_lo, i_hi = float(cell.i_w.lo), float(cell.i_w.hi)
        h_lo, h_hi = float(cell.h_w.lo), float(cell.h_w.hi)
        body.append(
            f'<line x1="{MARGIN + i_lo * plot_w:.2f}" y1="{y + row / 2:.1f}" x2="{MARGIN + i_hi * plot_w:.2f}" '
            f'y2="{y + row / 2:.1f}" stroke="#999" stroke-width="1"/>'
        )
        body.append(
            f'<rect x="{MARGIN + h_lo * plot_w:.2f}" y="{y + 4}" width="{max((h_hi - h_lo) * plot_w, 0.5):.2f}" '
            f'height="{row - 8}" fill="{PALETTE["cell"]}"><title>{cell.word or "empty word"}</title></rect>'
        )
    for k in range(depth + 1):
        body.append(f'<text x="6" y="{MARGIN + row * k + row / 2 + 4}" font-size="11">{k}</text>')
    return _document(width, height, body, title)


def pentagon_svg(model, segments: Sequence = (), transversal: tuple[int, int] | None = None, title: str = "", width: int | None = None) -> str:
    """The model polygon, its identified edges, an optional transversal and a traced trajectory."""
    width = width or settings.SVG_WIDTH
    xs = [float(v[0]) for v in model.vertices]
    ys = [float(v[1]) for v in model.vertices]
    span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    scale = (width - 2 * MARGIN) / span
    height = int(2 * MARGIN + (max(ys) - min(ys)) * scale)

    def pt(p) -> str:
        return f"{MARGIN + (float(p[0]) - min(xs)) * scale:.2f},{height - MARGIN - (float(p[1]) - min(ys)) * scale:.2f}"

    body = [f'<polygon points="{" ".join(pt(v) for v in model.vertices)}" fill="#f4f6f7" stroke="none"/>']
    colours = {model.boundary_edge: PALETTE["boundary"]}
    for pairing, colour in zip(model.pairings, (PALETTE["pair_a"], PALETTE["pair_b"])):
        colours[pairing.edge_a] = colours[pairing.edge_b] = colour
    for i in range(5):
        start, end = model.edge(i)
        a, b = pt(start).split(","), pt(end).split(",")
        body.append(f'<line x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" stroke="{colours[i]}" stroke-width="3"/>')
    if transversal is not None:
        a, b = pt(model.vertices[transversal[0]]).split(","), pt(model.vertices[transversal[1]]).split(",")
        body.append(f'<line x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" stroke="black" stroke-dasharray="6 4"/>')
    for start, end in segments:
        a, b = pt(start).split(","), pt(end).split(",")
        body.append(f'<line x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" stroke="{PALETTE["trace"]}" stroke-width="1"/>')
    return _document(width, height, body, title)


def svg_to_image(svg_text: str, width: int) -> Optional[Image.Image]:
    try:
        png_data = cairosvg.svg2png(bytestring=svg_text.encode("utf-8"), output_width=width * 2)
        img = Image.open(BytesIO(png_data))
        if img.mode not in ("RGB", "RGBA"):
            img = img.convert("RGBA")
        if img.mode == "RGBA":
            background = Image.new("RGB", img.size, (255, 255, 255))
            background.paste(img, mask=img.split()[3])
            img = background
        return img
    except Exception as e:
        logger.error(f"SVG rasterisation failed: {e}")
        return None


def save_svg(svg_text: str, path: Path, png: bool = False, width: int | None = None) -> Path:
    """Write the SVG and, when asked, a PNG beside it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg_text)
    logger.info(f"Wrote {path}")
    if png:
        img = svg_to_image(svg_text, width or settings.SVG_WIDTH)
        if img is not None:
            img.save(path.with_suffix(".png"), "PNG")
            logger.info(f"Wrote {path.with_suffix('.png')}")
    return path
