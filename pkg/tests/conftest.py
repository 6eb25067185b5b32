import sys
from pathlib import Path

# Make sibling test helpers (refmodel, fixtures) importable.
sys.path.insert(0, str(Path(__file__).resolve().parent))

FIXTURES = Path(__file__).resolve().parent / "fixtures"
