"""Shared helpers: set-level oracles for vectors and distributions."""

from __future__ import annotations

import math
import random
from pathlib import Path

import pytest

from state_algebra.algebra import BinaryStateVector, Row
from state_algebra.distribution import Distribution

MODELS = Path(__file__).resolve().parents[1] / "src" / "state_algebra" / "models"
GOLDEN = Path(__file__).resolve().parent / "golden"


def random_row(rng: random.Random, width: int, wild: float = 0.5) -> Row:
    care = value = 0
    for i in range(width):
        if rng.random() >= wild:
            care |= 1 << i
            value |= rng.randint(0, 1) << i
    return Row(width, care, value)


def random_vector(rng: random.Random, width: int, max_rows: int = 5) -> BinaryStateVector:
    rows = [random_row(rng, width, rng.choice((0.2, 0.5, 0.8))) for _ in range(rng.randint(0, max_rows))]
    return BinaryStateVector(width, rows)


def row_states(r: Row) -> set[int]:
    """States of a row as integers (bit i is column i), by brute force."""
    return {x for x in range(1 << r.width) if (x ^ r.value) & r.care == 0}


def state_set(s: BinaryStateVector) -> set[int]:
    out: set[int] = set()
    for r in s.rows:
        out |= row_states(r)
    return out


def dense_masses(d: Distribution) -> list[float]:
    """Mass of every state (integer encoding), straight from the definition."""
    out = []
    for x in range(1 << d.width):
        psi = d.base.psi
        for c in d.components:
            if any((x ^ r.value) & r.care == 0 for r in c.states.rows):
                psi *= c.factor.psi
        out.append(math.ldexp(psi, d.log2_scale))
    return out


def random_distribution(
    rng: random.Random, width: int, max_components: int = 5, columns=None
) -> Distribution:
    cols = list(range(width)) if columns is None else list(columns)
    comps = []
    for _ in range(rng.randint(0, max_components)):
        rows = []
        for _ in range(rng.randint(1, 3)):
            care = value = 0
            for i in cols:
                if rng.random() < 0.5:
                    care |= 1 << i
                    value |= rng.randint(0, 1) << i
            rows.append(Row(width, care, value))
        comps.append((BinaryStateVector(width, rows), rng.uniform(0.05, 3.0)))
    return Distribution(width, rng.uniform(0.5, 2.0), tuple(comps))


def rel_close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)
