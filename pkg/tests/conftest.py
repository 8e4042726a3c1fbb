"""
Pytest configuration and shared fixtures.
"""
import os
import sys
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest

# Add project root to path
ROOT_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT_DIR))

from app.ingest import parse_and_label  # noqa: E402
from app.model import NodeLabel  # noqa: E402

# Sixteen-node document with recursive d and b, used across the suite.
SAMPLE_XML = (
    "<r><a><b><c><c/></c></b><d><d><e/></d><e><f/></e></d></a>"
    "<a><b><b><c/></b></b><d><e/></d></a></r>"
)

SAMPLE_LABELS = {
    "r": [NodeLabel(1, 32, 1)],
    "a": [NodeLabel(2, 19, 2), NodeLabel(20, 31, 2)],
    "b": [NodeLabel(3, 8, 3), NodeLabel(21, 26, 3), NodeLabel(22, 25, 4)],
    "c": [NodeLabel(4, 7, 4), NodeLabel(5, 6, 5), NodeLabel(23, 24, 5)],
    "d": [NodeLabel(9, 18, 3), NodeLabel(10, 13, 4), NodeLabel(27, 30, 3)],
    "e": [NodeLabel(11, 12, 5), NodeLabel(14, 17, 4), NodeLabel(28, 29, 4)],
    "f": [NodeLabel(15, 16, 5)],
}

# Three output nodes a, c, d; b is a non-output core node
SAMPLE_QUERY = "//r/$a[./b//$c]//$d[./e and .//f]"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: large-document scaling checks")


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def sample_xml():
    return SAMPLE_XML


@pytest.fixture
def sample_index():
    """Inverted index of the sixteen-node sample document."""
    return parse_and_label(SAMPLE_XML, source="sample")


@pytest.fixture
def labels():
    """Sample document labels by tag."""
    return SAMPLE_LABELS


@pytest.fixture
def sample_xml_file(temp_dir):
    path = temp_dir / "sample.xml"
    path.write_text(SAMPLE_XML, encoding="utf-8")
    return path


@pytest.fixture(autouse=True)
def isolated_env():
    """Keep TPQ_* settings from the developer's shell out of the tests."""
    clean = {k: v for k, v in os.environ.items() if not k.startswith("TPQ_")}
    with patch.dict(os.environ, clean, clear=True):
        yield
