from pathlib import Path

ROOT_DIR = Path(__file__).resolve().parents[1]
DATA_DIR = ROOT_DIR / "data"

INDEX_PATH = DATA_DIR / "document.idx"
BENCH_DIR = DATA_DIR / "bench"

# Engine configuration
CONFIG_PATH = ROOT_DIR / "tpq_config.yaml"


def ensure_data_dir() -> None:
    """Ensure the data directory exists."""
    DATA_DIR.mkdir(parents=True, exist_ok=True)
