import time
from contextlib import contextmanager

import pytest

from questopt.bench import generate_instance
from questopt.model import example_questionnaire, example_table


@pytest.fixture
def a3():
    return example_table()


@pytest.fixture
def fig1():
    return example_questionnaire()


def small_instances(count, n_range, k_range, seed=0, prob_mode="random"):
    """Deterministic list of generated complete tables."""
    import numpy as np

    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        k = int(rng.integers(k_range[0], k_range[1] + 1))
        if 2**k < n:
            continue
        out.append(generate_instance(n, k, int(rng.integers(2**31)), prob_mode=prob_mode))
    return out


# One "PASS"/"FAIL" line per acceptance criterion, printed after the run.
ACCEPTANCE: list[str] = []


@contextmanager
def criterion(number: int, title: str, limit_s: float | None = None):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if limit_s is not None and elapsed > limit_s:
            raise AssertionError(f"took {elapsed:.2f} s, limit {limit_s} s")
    except BaseException as exc:
        line = f"FAIL criterion {number}: {title} ({type(exc).__name__}: {exc})"
        ACCEPTANCE.append(line)
        print(line)
        raise
    line = f"PASS criterion {number}: {title} ({time.perf_counter() - start:.3f} s)"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
