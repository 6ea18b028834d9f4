from __future__ import annotations

import numpy as np
import pytest

from rbsched.model import (
    MATRIX,
    BUILTIN_MATRIX_ORDER,
    BufferSpec,
    Bus,
    BusType,
    Instance,
    SetupModel,
    builtin_paper_instance,
)

T11 = BusType("Type1", "Color1")
T21 = BusType("Type2", "Color1")
T32 = BusType("Type3", "Color2")
T22 = BusType("Type2", "Color2")
T13 = BusType("Type1", "Color3")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def builtin():
    return builtin_paper_instance()


@pytest.fixture(scope="session")
def matrix_model(builtin):
    return builtin.setup


def small_instance(stages, buffer, buses, applies=(2,), setup=None) -> Instance:
    """``buses`` is a list of (BusType, proc_times); ids are assigned 1..S."""
    if setup is None:
        setup = builtin_paper_instance().setup
        setup = SetupModel(MATRIX, frozenset(applies), matrix=setup.matrix)
    return Instance(
        stages=tuple(stages),
        buffer=BufferSpec(*buffer),
        buses=tuple(Bus(k, t, tuple(p)) for k, (t, p) in enumerate(buses, start=1)),
        setup=setup,
    )


def fuzz_instance(rng: np.random.Generator) -> Instance:
    """Random small instance: Q <= 4, S <= 10, buffer <= 3x3."""
    q = int(rng.integers(2, 5))
    stages = [int(rng.integers(1, 4)) for _ in range(q)]
    after = int(rng.integers(1, q))
    rows, cols = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    s = int(rng.integers(0, 11))
    buses = [
        (BUILTIN_MATRIX_ORDER[int(rng.integers(5))], [int(x) for x in rng.integers(1, 21, size=q)])
        for _ in range(s)
    ]
    applies = [l for l in range(1, q + 1) if rng.random() < 0.5] or [after + 1]
    return small_instance(stages, (after, rows, cols), buses, applies=applies)
