import os

import numpy as np
import pytest

_ACCEPTANCE = {}


def pytest_collection_modifyitems(config, items):
    if os.environ.get("NETDIM_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="full-scale run; set NETDIM_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(label, passed, detail)``."""

    def record(label, passed, detail=""):
        _ACCEPTANCE[label] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: (len(s.split()[0]), s)):
        ok, detail = _ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")


@pytest.fixture
def gen():
    from netdim.constructors import rng

    return rng(12345)


def brute_two_nn(X):
    """O(n^2) scalar-loop oracle: (r1, r2, j1, j2), ties to the lowest index."""
    n = len(X)
    r1 = np.empty(n)
    r2 = np.empty(n)
    j1 = np.empty(n, dtype=int)
    j2 = np.empty(n, dtype=int)
    for i in range(n):
        best = [(np.inf, -1), (np.inf, -1)]
        for j in range(n):
            if j == i:
                continue
            d = float(np.sqrt(np.sum((X[i] - X[j]) ** 2)))
            if (d, j) < best[0]:
                best = [(d, j), best[0]]
            elif (d, j) < best[1]:
                best[1] = (d, j)
        (r1[i], j1[i]), (r2[i], j2[i]) = best
    return r1, r2, j1, j2
