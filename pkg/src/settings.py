"""Configuration for dilaflow."""
import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

from src.limits import env_cap, env_flag

BASE_DIR = Path(__file__).resolve().parent.parent
LOGS_DIR = BASE_DIR / "logs"
DATA_DIR = BASE_DIR / "data"
OUTPUT_DIR = Path(os.getenv("OUTPUT_DIR", str(DATA_DIR / "out")))
MODELS_DIR = BASE_DIR / "models"

LOGS_DIR.mkdir(exist_ok=True)
DATA_DIR.mkdir(exist_ok=True)
OUTPUT_DIR.mkdir(parents=True, exist_ok=True)

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
BETTERSTACK_SOURCE_TOKEN = os.getenv("BETTERSTACK_SOURCE_TOKEN")
BETTERSTACK_INGEST_HOST = os.getenv("BETTERSTACK_INGEST_HOST")

# Arithmetic
DILAFLOW_BACKEND = os.getenv("DILAFLOW_BACKEND", "auto").strip().lower()  # auto, exact or f64
FLOAT_TOLERANCE = float(os.getenv("FLOAT_TOLERANCE", "1e-12"))
CONE_TOLERANCE = float(os.getenv("CONE_TOLERANCE", "1e-10"))
CONVERGENCE_TOLERANCE = float(os.getenv("CONVERGENCE_TOLERANCE", "1e-13"))
FLOAT_UNDERFLOW = float(os.getenv("FLOAT_UNDERFLOW", "1e-280"))
ESCALATION_PIECE_LENGTH = float(os.getenv("ESCALATION_PIECE_LENGTH", "1e-15"))

# Orbits and induction
MAX_DETECT_PERIOD = int(os.getenv("MAX_DETECT_PERIOD", "64"))
MAX_STEPS_EXACT = int(os.getenv("MAX_STEPS_EXACT", "60"))
MAX_STEPS_FLOAT = int(os.getenv("MAX_STEPS_FLOAT", "48"))
MAX_ROUNDS = int(os.getenv("MAX_ROUNDS", "60"))
TAIL_DEPTH = int(os.getenv("TAIL_DEPTH", "40"))
TAIL_WINDOW = int(os.getenv("TAIL_WINDOW", "8"))

# Parameter space and limit sets
CANTOR_DEPTH_CAP = env_cap("CANTOR_DEPTH_CAP", "16")
OMEGA_DEPTH = int(os.getenv("OMEGA_DEPTH", "30"))

# Torus
ROTATION_TOLERANCE = float(os.getenv("ROTATION_TOLERANCE", "1e-6"))
ROTATION_MAX_ITERATIONS = int(os.getenv("ROTATION_MAX_ITERATIONS", str(2 ** 21)))
RATIONAL_DENOMINATOR_CAP = int(os.getenv("RATIONAL_DENOMINATOR_CAP", "64"))
RATIONAL_TOLERANCE = float(os.getenv("RATIONAL_TOLERANCE", "1e-9"))
TRACE_MAX_CROSSINGS = int(os.getenv("TRACE_MAX_CROSSINGS", "200"))
DEFAULT_MODEL = Path(os.getenv("DEFAULT_MODEL", str(MODELS_DIR / "test_pentagon.json")))

# Execution and output
MAX_PARALLEL_JOBS = int(os.getenv("MAX_PARALLEL_JOBS", "1"))
SVG_WIDTH = int(os.getenv("SVG_WIDTH", "800"))
PNG_EXPORT = env_flag("PNG_EXPORT")

BACKEND_CHOICES = ("auto", "exact", "f64")


def validate_config():
    """Validate configuration."""
    errors = []
    if DILAFLOW_BACKEND not in BACKEND_CHOICES:
        errors.append(f"DILAFLOW_BACKEND must be one of {', '.join(BACKEND_CHOICES)} (got {DILAFLOW_BACKEND!r})")
    for name in ("FLOAT_TOLERANCE", "CONE_TOLERANCE", "CONVERGENCE_TOLERANCE", "ROTATION_TOLERANCE", "RATIONAL_TOLERANCE"):
        if not globals()[name] > 0:
            errors.append(f"{name} must be positive")
    for name in ("MAX_DETECT_PERIOD", "MAX_STEPS_EXACT", "MAX_STEPS_FLOAT", "MAX_ROUNDS", "TAIL_DEPTH",
                 "TAIL_WINDOW", "OMEGA_DEPTH", "TRACE_MAX_CROSSINGS", "MAX_PARALLEL_JOBS", "SVG_WIDTH"):
        if globals()[name] < 1:
            errors.append(f"{name} must be at least 1")
    if TAIL_WINDOW > TAIL_DEPTH:
        errors.append("TAIL_WINDOW must not exceed TAIL_DEPTH")
    if errors:
        raise ValueError("Configuration errors:\n  " + "\n  ".join(errors))
