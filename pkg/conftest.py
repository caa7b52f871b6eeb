"""Shared fixtures; puts the toolkit sources on sys.path like the service scripts do"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(ROOT / "services" / "stk" / "src"))

from stk.clue_catalog import load_catalog  # noqa: E402
from stk.tagger import load_lexicon, load_rules  # noqa: E402

DATA_DIR = ROOT / "data"


@pytest.fixture(autouse=True)
def _no_ambient_config(monkeypatch):
    monkeypatch.delenv("STK_CONFIG", raising=False)
    monkeypatch.delenv("STK_LOG_LEVEL", raising=False)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(DATA_DIR / "lexicon.tsv")


@pytest.fixture(scope="session")
def rules():
    return load_rules(DATA_DIR / "rules.txt")


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(DATA_DIR / "catalog.stk")


@pytest.fixture(scope="session")
def lion_catalog():
    return load_catalog(DATA_DIR / "lion_catalog.stk")


@pytest.fixture(scope="session")
def lion_text() -> str:
    return (DATA_DIR / "lion.txt").read_text(encoding="utf-8")
