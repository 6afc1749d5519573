import numpy as np
import pytest

from dtwlvq import alignment_cost, enumerate_warping_paths


def brute_force_dtw(x, y):
    """Minimum alignment cost over every warping path, and the minimizers."""
    costs = {w: alignment_cost(x, y, w) for w in enumerate_warping_paths(len(x), len(y))}
    best = min(costs.values())
    return best, [w for w, c in costs.items() if c == best]


def finite_difference(f, p, h=1e-6):
    p = np.asarray(p, dtype=np.float64)
    grad = np.zeros_like(p)
    for idx in np.ndindex(p.shape):
        up, down = p.copy(), p.copy()
        up[idx] += h
        down[idx] -= h
        grad[idx] = (f(up) - f(down)) / (2 * h)
    return grad


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = []


@pytest.fixture
def record():
    """Record one acceptance verdict; returns the verdict for asserting."""

    def _record(number, ok, detail):
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE.append((number, line))
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
