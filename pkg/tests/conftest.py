import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from crpmatch.ingest import Alphabet  # noqa: E402

SMALL = Alphabet.from_symbols("AB")
FOUR = Alphabet.from_symbols("ABCD")


def random_field(rng: random.Random, symbols="ABCD", max_count=20, max_len=5):
    return [
        "".join(rng.choice(symbols) for _ in range(rng.randint(0, max_len)))
        for _ in range(rng.randint(0, max_count))
    ]


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(scope="session")
def mixed_table():
    from crpmatch.synthetic import MIXED_FIELDS, generate_synthetic_table

    return generate_synthetic_table(MIXED_FIELDS, 10000, seed=0)


# One line per acceptance criterion, echoed again at the end of the run.
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
