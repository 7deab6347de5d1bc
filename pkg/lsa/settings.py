from os import environ
from pathlib import Path
import logging

root_dir = Path(__file__).resolve().parents[1]

# ------------------ numerics ------------------

# Residuals below this are treated as zero. `--tolerance` on the CLI rebinds it.
TOLERANCE = float(environ.get("LSA_TOLERANCE", 1e-9))

DEFAULT_SEED = int(environ.get("LSA_SEED", 0))

# Dense structure constants; the envelope of supported base dimensions.
# Phase spaces double the dimension of their base algebra.
MAX_DIM = 16
PHASE_MAX_DIM = 2 * MAX_DIM

# ------------------ logging info ------------------

logger = logging.getLogger("lsa")

log_file = Path(environ.get("LSA_LOG_FILE", root_dir / "lsa" / "lsa.log"))

try:
    logging.basicConfig(
        level=logging.DEBUG,
        format="%(asctime)s %(name)-12s %(levelname)-8s %(message)s",
        datefmt="%m-%d %H:%M",
        filename=str(log_file),
        filemode="a+",
    )
except OSError:
    # Read-only install location.
    logging.basicConfig(level=logging.WARNING)

console = logging.StreamHandler()
console.setLevel(environ.get("LSA_LOG_LEVEL", "WARNING").upper())
console.setFormatter(logging.Formatter("%(name)-12s: %(levelname)-8s %(message)s"))
logger.addHandler(console)
