import sys
import time
from pathlib import Path

import pytest
from hypothesis import settings

from entrobound.measures import parse_spec

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

THREE_ATOM = "atoms:-1=0.25,0=0.5,1=0.25"


@pytest.fixture
def rademacher():
    return parse_spec("rademacher")


@pytest.fixture
def three_atom():
    return parse_spec(THREE_ATOM)


@pytest.fixture
def q_coin():
    return parse_spec("atoms:-1=0.25,1=0.75")


# -- acceptance bookkeeping: one PASS/FAIL line per criterion -----------------------

_ACCEPTANCE: list[str] = []


class _Criterion:
    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.notes = []

    def note(self, text):
        self.notes.append(text)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        ok = exc_type is None and (self.limit is None or elapsed < self.limit)
        budget = "" if self.limit is None else f" (limit {self.limit:g} s)"
        detail = "; ".join(self.notes)
        if exc_type is not None:
            detail = f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        line = (f"criterion {self.number} {'PASS' if ok else 'FAIL'}: {self.title} "
                f"[{elapsed:.2f} s{budget}] {detail}").rstrip()
        _ACCEPTANCE.append(line)
        print(line)
        if exc_type is None and not ok:
            raise AssertionError(f"runtime {elapsed:.2f} s exceeds {self.limit} s")
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
