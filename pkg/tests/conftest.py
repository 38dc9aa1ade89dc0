import sys
from pathlib import Path

# Make tests/oracles.py importable as a plain module from any test.
sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
