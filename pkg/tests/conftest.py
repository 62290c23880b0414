import pytest

from gdd4.core import TypeSignature
from gdd4.exact_cover import solve_signature

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[criterion] = (ok, detail)
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


_SOLVED = {}


@pytest.fixture(scope="session")
def solved():
    """Solver-found small designs, shared across tests."""

    def get(text, holes=None):
        key = (text, holes)
        if key not in _SOLVED:
            res = solve_signature(TypeSignature.parse(text), holes, seed=0, time_budget=60.0)
            assert res.status == "sat", f"{text}: {res.status}"
            _SOLVED[key] = res.design
        return _SOLVED[key]

    return get
