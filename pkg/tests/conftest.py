import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from majcert import graph as gr

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def small_corpus(seed=7):
    """Connected graphs with at most 14 nodes."""
    rng = np.random.default_rng(seed)
    gs = [gr.single_edge()]
    gs += [gr.path_graph(n) for n in (3, 4, 5, 8, 11, 14)]
    gs += [gr.cycle_graph(n) for n in (3, 4, 5, 6, 9, 12, 14)]
    gs += [gr.grid_graph(2, 3), gr.grid_graph(3, 3), gr.grid_graph(3, 4), gr.grid_graph(2, 7)]
    gs += [gr.torus_graph(3, 3), gr.torus_graph(3, 4), gr.complete_graph(5)]
    gs += [gr.random_cubic(n, rng) for n in (4, 6, 8, 10, 12, 14)]
    gs += [gr.random_bounded_degree(n, 4, rng) for n in (6, 8, 10, 12, 13, 14)]
    return gs


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)


def record(number: int, ok: bool, detail: str) -> None:
    """One summary line per acceptance criterion."""
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
