import itertools
from math import sqrt

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_partial_trace(m, dims, keep):
    """Reduced matrix by explicit index loops (keep: 0-based parties)."""
    n = len(dims)
    kd = [dims[i] for i in keep]
    out = np.zeros((int(np.prod(kd)),) * 2, dtype=complex)
    for a in itertools.product(*[range(d) for d in dims]):
        for b in itertools.product(*[range(d) for d in dims]):
            if any(a[i] != b[i] for i in range(n) if i not in keep):
                continue
            ia = np.ravel_multi_index(a, dims)
            ib = np.ravel_multi_index(b, dims)
            ka = np.ravel_multi_index([a[i] for i in keep], kd)
            kb = np.ravel_multi_index([b[i] for i in keep], kd)
            out[ka, kb] += m[ia, ib]
    return out


def brute_witness(m, dims, pairs, subsets, j):
    """Witness by direct enumeration.

    Sums over both orientations of each pair and minimises over every
    j-element choice of subsets shared by all pairs. ``subsets`` are 1-based.
    """
    def entry(a, b):
        return m[np.ravel_multi_index(a, dims), np.ravel_multi_index(b, dims)]

    def swapped(a, b, r):
        a, b = list(a), list(b)
        for p in r:
            a[p - 1], b[p - 1] = b[p - 1], a[p - 1]
        return tuple(a), tuple(b)

    ordered = [(a, b) for a, b in pairs] + [(b, a) for a, b in pairs]
    coh = sum(abs(entry(a, b)) for a, b in ordered)
    best = None
    for choice in itertools.combinations(subsets, j):
        total = 0.0
        for a, b in ordered:
            for r in choice:
                sa, sb = swapped(a, b, r)
                total += sqrt(max(entry(sa, sa).real, 0) * max(entry(sb, sb).real, 0))
        best = total if best is None else min(best, total)
    return (coh - best) / sqrt(len(pairs))


ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail):
    """Store and print one PASS/FAIL line for an acceptance criterion."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
