"""Shared fixtures: the bundled reference sponges and a seeded generator."""

import itertools
import random
from pathlib import Path

import pytest

from spongedim import Sponge, SpongeError, validate_sponge

SPECS = Path(__file__).resolve().parent.parent / "sample_specs"


@pytest.fixture(scope="session")
def sponge_234() -> Sponge:
    """Three-dimensional sponge on bases (2, 3, 4) with ten digits."""
    return validate_sponge(
        (2, 3, 4),
        [
            (0, 0, 0),
            (0, 0, 3),
            (0, 1, 2),
            (1, 0, 2),
            (1, 1, 0),
            (1, 1, 1),
            (1, 1, 2),
            (1, 2, 0),
            (1, 2, 2),
            (1, 2, 3),
        ],
    )


@pytest.fixture(scope="session")
def carpet_24() -> Sponge:
    """Planar carpet on bases (2, 4) whose Bernoulli measures all fail doubling."""
    return validate_sponge((2, 4), [(0, 1), (1, 1), (1, 3)])


@pytest.fixture(scope="session")
def sponge_344() -> Sponge:
    """Sponge with a repeated base; closed-form Assouad/lower do not apply."""
    return validate_sponge(
        (3, 4, 4),
        [
            (0, 0, 0),
            (0, 0, 2),
            (0, 3, 1),
            (0, 3, 3),
            (2, 0, 1),
            (2, 0, 3),
            (2, 3, 0),
            (2, 3, 2),
            (0, 0, 1),
            (2, 0, 0),
        ],
    )


@pytest.fixture(scope="session")
def carpet_vssc() -> Sponge:
    """Carpet on bases (3, 4) whose digits are separated by gaps larger than 1."""
    return validate_sponge((3, 4), [(0, 0), (2, 3)])


@pytest.fixture(scope="session")
def carpet_23() -> Sponge:
    return validate_sponge((2, 3), [(0, 0), (0, 2), (1, 1)])


@pytest.fixture(scope="session")
def full_grid_234() -> Sponge:
    """Full product digit set: every fibre count is maximal."""
    digits = list(itertools.product(range(2), range(3), range(4)))
    return validate_sponge((2, 3, 4), digits)


def random_strict_sponge(
    rng: random.Random,
    max_d: int = 3,
    max_base: int = 6,
    max_digits: int = 20,
) -> Sponge:
    """Draw a valid sponge with strictly increasing bases.

    Roughly a quarter of the draws use a full product of per-coordinate digit
    subsets, which forces uniform fibres; the rest are arbitrary subsets.
    Rejection-samples until validation passes, so every return is valid.
    """
    while True:
        d = rng.randint(2, max_d)
        bases = tuple(sorted(rng.sample(range(2, max_base + 1), d)))
        if rng.random() < 0.25:
            subsets = []
            for n in bases:
                size = rng.randint(1, n)
                subsets.append(sorted(rng.sample(range(n), size)))
            digits = list(itertools.product(*subsets))
            if len(digits) < 2 or len(digits) > max_digits:
                continue
        else:
            grid = list(itertools.product(*(range(n) for n in bases)))
            count = rng.randint(2, min(max_digits, len(grid)))
            digits = rng.sample(grid, count)
        try:
            return validate_sponge(bases, digits)
        except SpongeError:
            continue


@pytest.fixture(scope="session")
def spec_dir() -> Path:
    return SPECS
