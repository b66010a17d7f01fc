import numpy as np
import pytest

from mscf.features import CN_DIMS, CN_ROWS, CnTable


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def cn_table():
    """Stand-in table: softmax over random logits for every quantized colour."""
    logits = np.random.default_rng(7).standard_normal((CN_ROWS, CN_DIMS))
    probs = np.exp(logits)
    return CnTable(probs / probs.sum(axis=1, keepdims=True))


_ACCEPTANCE: list[tuple[int, bool, str]] = []


@pytest.fixture
def record_criterion():
    """Log one acceptance verdict; all verdicts are printed in the terminal summary."""
    def record(number: int, passed: bool, detail: str) -> bool:
        _ACCEPTANCE.append((number, bool(passed), detail))
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda item: item[0]):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
