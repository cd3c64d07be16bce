import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES


def load_fixture(name: str):
    """(context, process, expected-dict) for a fixture directory."""
    from sessionpi import parse_context, parse_process

    root = FIXTURES / name
    process = parse_process((root / "process.pi").read_text())
    ctx = parse_context((root / "context.ctx").read_text())
    expected = json.loads((root / "expected.json").read_text())
    return ctx, process, expected


def fixture_names():
    return sorted(d.name for d in FIXTURES.iterdir() if d.is_dir())
