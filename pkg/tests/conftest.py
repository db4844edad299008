import numpy as np
import pytest

from majorcert.certifiers import EnsembleVotes
from majorcert.geometry import AblationSpec, Geometry
from majorcert.harness.config import RunConfig
from majorcert.votes import ABSTAIN, make_grid

SMALL = RunConfig(
    geometry=Geometry(8, 8),
    num_classes=3,
    strategies=(AblationSpec("row", 2), AblationSpec("column", 2), AblationSpec("block", 3)),
    patch_size=2,
)


def random_ensemble(rng, config=SMALL, abstain=0.05):
    """Each strategy leans toward a random label with a random strength."""
    k = config.num_classes
    grids = []
    for spec in config.strategies:
        n = spec.count(config.geometry)
        lean = int(rng.integers(0, k))
        strength = rng.uniform(0.2, 1.0)
        labels = np.where(rng.random(n) < strength, lean, rng.integers(0, k, n))
        labels[rng.random(n) < abstain] = ABSTAIN
        grids.append(make_grid(spec, labels, k, config.geometry))
    return EnsembleVotes(tuple(grids))


@pytest.fixture
def small_config():
    return SMALL


@pytest.fixture
def worked_example():
    """Ensemble whose may sets at patch (0, 0, 1) are {1, 2}, {2}, {2, 3}."""
    g = Geometry(8, 8)
    row = make_grid("row:1", [2, 2, 2, 2, 1, 1, 1, 0], 4, g)
    col = make_grid("column:1", [2] * 8, 4, g)
    block = make_grid("block:1", [2] * 32 + [3] * 32, 4, g)
    return EnsembleVotes((row, col, block))


def blocked_rival_ensemble():
    """Uncertified yet robust: the row may set holds 2, but label 1 blocks every route to it."""
    g = Geometry(9, 9)
    row = make_grid("row:1", [0, 0, 0, 0, 1, 1, 1, 1, 2], 3, g)
    col = make_grid("column:1", [0] * 9, 3, g)
    block = make_grid("block:1", [0] * 41 + [2] * 40, 3, g)
    return EnsembleVotes((row, col, block))


ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    print(ACCEPTANCE_LINES[-1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
