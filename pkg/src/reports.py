"""CSV and JSON writers; every file opens with the version and the resolved run config."""
import csv
import json
import logging
from pathlib import Path
from typing import Iterable, Sequence

from src import __version__

logger = logging.getLogger(__name__)


def header_lines(config: dict) -> list[str]:
    return [f"# dilaflow {__version__}", f"# config: {json.dumps(config, sort_keys=True)}"]


def write_csv(path: Path, config: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="") as f:
        for line in header_lines(config):
            f.write(line + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(row)
            count += 1
    logger.info(f"Wrote {count} rows to {path}")
    return path


def write_json(path: Path, config: dict, data: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"_header": {"version": __version__, "config": config}, **data}
    path.write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n")
    logger.info(f"Wrote {path}")
    return path


def read_csv_rows(path: Path) -> list[list[str]]:
    """Rows of a report CSV without its comment header."""
    with Path(path).open(newline="") as f:
        return [row for row in csv.reader(line for line in f if not line.startswith("#"))]
