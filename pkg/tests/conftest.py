import math

import numpy as np
import pytest

from swim.geometry import ShapePoint, classify_array
from swim.optimize import lift_array

ACCEPTANCE_LINES: list[str] = []


def random_interior_shapes(rng: np.random.Generator, count: int, margin: float = 1e-3) -> list[ShapePoint]:
    """Rejection-sample shapes strictly inside the cone, spread over all three faces."""
    out = []
    while len(out) < count:
        W = rng.uniform(0.2, 3.0)
        Y, Z = rng.uniform(-1.2, 1.2, 2) * W
        if classify_array(np.array([W]), np.array([Y]), np.array([Z]), margin)[0] == 1:
            out.append(ShapePoint(W, Y, Z))
    return out


def random_chart_loop(rng: np.random.Generator, n: int, modes: int = 3) -> np.ndarray:
    """Smooth random closed loop in the interior, lifted to the unit-area surface."""
    t = 2 * np.pi * np.arange(n) / n
    while True:
        cy, cz = rng.uniform(-1.0, 0.3), rng.uniform(-0.2, 0.2)
        Y = cy + 0.25 * np.cos(t)
        Z = cz + 0.2 * np.sin(t)
        for k in range(2, modes + 1):
            a = rng.normal(0, 0.04 / k, 4)
            Y += a[0] * np.cos(k * t) + a[1] * np.sin(k * t)
            Z += a[2] * np.cos(k * t) + a[3] * np.sin(k * t)
        nodes = lift_array(Y, Z)
        if np.all(classify_array(*nodes.T, 1e-6) == 1):
            return nodes


def random_space_loop(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random closed loop in (W, Y, Z) around an interior point (not on the unit-area surface)."""
    t = 2 * np.pi * np.arange(n) / n
    while True:
        c = np.array([rng.uniform(1.0, 2.0), rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)])
        u, v = rng.normal(size=(2, 3))
        r = rng.uniform(0.05, 0.2)
        nodes = c + r * (np.cos(t)[:, None] * u + np.sin(t)[:, None] * v) / math.sqrt(3)
        if np.all(classify_array(*nodes.T, 1e-6) == 1):
            return nodes


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
