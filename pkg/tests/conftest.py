import json
from pathlib import Path

import pytest

from horn_amoeba.horn import OreSatoCoefficient

DATA = Path(__file__).resolve().parents[1] / "src" / "horn_amoeba" / "data"

# criterion number -> (passed, seconds, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}
STATUS = {True: "PASS", False: "FAIL", None: "INCONCLUSIVE"}


def load_example(name: str) -> OreSatoCoefficient:
    return OreSatoCoefficient.from_json(json.loads((DATA / f"{name}.json").read_text()))


@pytest.fixture(scope="session")
def example1():
    return load_example("example1")


@pytest.fixture(scope="session")
def cardano():
    return load_example("cardano")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, secs, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {STATUS[ok]} ({secs:.1f} s) {detail}")
