from pathlib import Path

import numpy as np
import pytest

from svdmark import codec
from svdmark.image_io import load_pgm
from svdmark.metrics import load_mark

DATA = Path(__file__).parent / "data"
CORPUS = ("hopper", "grass")  # portrait and dense texture, 512x512
KEY_SEED = 1

_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def mark():
    return load_mark(DATA / "mark.txt")


@pytest.fixture(scope="session")
def corpus():
    return {name: load_pgm(DATA / f"{name}.pgm") for name in CORPUS}


@pytest.fixture(scope="session")
def keys(corpus):
    return {name: codec.generate_key(img, KEY_SEED, 64.0) for name, img in corpus.items()}


@pytest.fixture(scope="session")
def watermarked(corpus, keys, mark):
    return {name: codec.embed(img, mark, keys[name]) for name, img in corpus.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(label: str, passed: bool, detail: str) -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
        _acceptance_lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
