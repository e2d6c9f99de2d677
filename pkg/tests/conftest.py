import numpy as np
import pytest
from hypothesis import settings

from markovfactor.fixtures import FIXTURES, m2_diag, m2_trace

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, n, floor=0.05):
    w = rng.dirichlet(np.ones(n)) * (1 - n * floor) + floor
    u = random_unitary(rng, n)
    return (u * w) @ u.conj().T


def random_matrix(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


@pytest.fixture(scope="session")
def trace_space():
    return m2_trace()


@pytest.fixture(scope="session")
def diag_space():
    return m2_diag()


@pytest.fixture(scope="session")
def built():
    """Every named fixture map, built once."""
    return {name: f.build() for name, f in FIXTURES.items()}


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
