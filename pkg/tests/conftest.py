import random

import pytest
from hypothesis import strategies as st

from modalbench.syntax import Box, Cap, Impl, Neg, Prop, Ucl

INDICES = (1, 2, 3)


def index_sets():
    return st.sets(st.sampled_from(INDICES), min_size=1).map(lambda s: tuple(sorted(s)))


def formulas(max_leaves: int = 12):
    leaves = st.sampled_from(["p", "q", "r"]).map(Prop)

    def extend(children):
        return st.one_of(
            children.map(Neg),
            st.tuples(children, children).map(lambda ab: Impl(*ab)),
            st.tuples(st.sampled_from(INDICES), children).map(lambda t: Box(*t)),
            st.tuples(index_sets(), children).map(lambda t: Cap(*t)),
            st.tuples(index_sets(), children).map(lambda t: Ucl(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@pytest.fixture
def rng():
    return random.Random(20240611)


# acceptance results, filled in by test_acceptance.py and printed at the end
ACCEPTANCE: dict = {}


def record(criterion: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {k:>2}. {title}: {detail}")
