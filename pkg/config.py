"""Configuration settings for the hydrogen-bond cluster simulator."""

from pathlib import Path

# Project paths
PROJECT_ROOT = Path(__file__).parent
DATA_DIR = PROJECT_ROOT / "data"
OUTPUT_DIR = PROJECT_ROOT / "output"

# Database (steady-state cache and run log)
DATABASE_PATH = DATA_DIR / "results.db"

# Model defaults, dimensionless units (hbar = Omega = 1)
DEFAULT_HBAR = 1.0
DEFAULT_OMEGA = 1.0
DEFAULT_G = 0.1
DEFAULT_GAMMA = 0.02
DEFAULT_MU = 0.0

# Coupling above this fraction of hbar*Omega leaves the RWA regime
RWA_RATIO_LIMIT = 0.2

# Evolution settings
DEFAULT_DT = 0.1
DEFAULT_T_MAX = 1000.0
DEFAULT_STEADY_T_MAX = 5000.0
DEFAULT_STEADY_TOL = 1e-8
DEFAULT_PROBE_INTERVAL = 10.0
DEFAULT_POSITIVITY_TOL = 1e-8
EULER_STABILITY_LIMIT = 0.05  # max dt * gamma before warning

# Inflow sweep settings
DEFAULT_MU_MAX = 0.95
DEFAULT_GRID = 21
DEFAULT_LEVELS = (0.1, 0.5, 0.9)

# Parallel workers (overridden by --workers)
WORKERS_ENV = "HBQED_WORKERS"
DEFAULT_WORKERS = 1

# Output formatting
CSV_FLOAT_FORMAT = "%.12g"
