from pathlib import Path

import numpy as np
import pytest

from probtele import QuantumChannel

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "probtele" / "fixtures"

WORKED_Q = np.array([[-0.1, -0.7], [0.7, 0.1]])
U_ROT = np.array([[0, 1], [-1, 0]], dtype=complex)


def random_channel(n: int, rng: np.random.Generator) -> QuantumChannel:
    q = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return QuantumChannel(q / np.linalg.norm(q))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
