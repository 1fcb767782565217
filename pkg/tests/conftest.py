import numpy as np
import pytest

from surfmc import build_layout


@pytest.fixture(scope="session")
def layout3():
    return build_layout(3)


@pytest.fixture(scope="session")
def layout4():
    return build_layout(4)


@pytest.fixture(scope="session")
def layout5():
    return build_layout(5)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def brute_force_min_matching(n_vertices: int, edges) -> int | None:
    """Exhaustive minimum over all perfect matchings; None if infeasible.

    Independent of the production matcher: direct recursion over pairings.
    """
    adj = {}
    for u, v, w in edges:
        adj.setdefault(u, {})[v] = min(w, adj.get(u, {}).get(v, w))
        adj.setdefault(v, {})[u] = min(w, adj.get(v, {}).get(u, w))
    if n_vertices == 0:
        return 0

    def rec(unmatched: frozenset) -> int | None:
        if not unmatched:
            return 0
        u = min(unmatched)
        best = None
        for v, w in adj.get(u, {}).items():
            if v in unmatched and v != u:
                sub = rec(unmatched - {u, v})
                if sub is not None and (best is None or w + sub < best):
                    best = w + sub
        return best

    return rec(frozenset(range(n_vertices)))
