import numpy as np
import pytest
from hypothesis import strategies as st

from pipedreams import kernels
from pipedreams.word import Word


def random_alternating(n, length, rng):
    """Greedy random alternating word: pick uniformly among letters that keep every neighbour pair alternating."""
    last = [0] * (n + 1)  # last[i]: most recent letter among {i, i+1}, 0 if none
    letters = []
    for _ in range(length):
        ok = [a for a in range(1, n) if (a < 2 or last[a - 1] != a) and (a > n - 2 or last[a] != a)]
        a = ok[int(rng.integers(len(ok)))]
        if a >= 2:
            last[a - 1] = a
        if a <= n - 2:
            last[a] = a
        letters.append(a)
    return Word(n, letters)


@st.composite
def alternating_words(draw, max_n=12, max_len=60):
    n = draw(st.integers(2, max_n))
    length = draw(st.integers(0, max_len))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_alternating(n, length, np.random.default_rng(seed))


@st.composite
def words(draw, max_n=8, max_len=20):
    n = draw(st.integers(2, max_n))
    letters = draw(st.lists(st.integers(1, n - 1), max_size=max_len))
    return Word(n, letters)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return kernels.get_backend(request.param)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
