from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from minmult.algebra import PolySpec, build_algebra
from minmult.generate import AlgebraShape, random_algebra, random_module
from minmult.linalg import Field

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", parent=settings.get_profile("default"), max_examples=200)
settings.load_profile("default")

F101 = Field.prime(101)
SMALL = AlgebraShape(max_vars=3, max_nilpotency=4, max_length=16)


def algebra_from(field, names, N, gens=()):
    """``gens`` are lists of ``(coefficient, exponent)`` pairs."""
    spec = PolySpec(field, tuple(names), N, tuple(tuple((field.scalar(c), e) for c, e in g) for g in gens))
    return build_algebra(spec)


def mm_ring(r: int, field=F101):
    """``k[x_1..x_r] / (x)^2``."""
    return algebra_from(field, [f"x{i + 1}" for i in range(r)], 2)


@st.composite
def algebras(draw, shape=SMALL, field=F101):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_algebra(np.random.default_rng(seed), field, shape)


@st.composite
def algebra_and_modules(draw, count=1, shape=SMALL, max_dim=24):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    A = random_algebra(rng, F101, shape)
    return (A, *[random_module(rng, A, max_dim=max_dim) for _ in range(count)])


@pytest.fixture
def f101():
    return F101


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


def record(criterion: int, title: str, passed: bool, detail: str, seconds: float) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {title} ({detail}; {seconds:.1f} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
