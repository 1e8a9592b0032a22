import random

import pytest

from polyclose.core import Relation, mask_of


def random_relation(rng: random.Random, n_max=8, m_max=6, n_min=1) -> Relation:
    n = rng.randint(n_min, n_max)
    m = rng.randint(1, m_max)
    return Relation(n, [rng.randrange(1 << n) for _ in range(m)])


def brute_filter(closure, width, side):
    """Inclusion-extremal elements of closure minus {0, 1}."""
    full = mask_of(width)
    cands = [c for c in closure if c not in (0, full)]
    out = set()
    for c in cands:
        if side == "max":
            if not any(d != c and d & c == c for d in cands):
                out.add(c)
        else:
            if not any(d != c and d & c == d for d in cands):
                out.add(c)
    return out


@pytest.fixture
def rng():
    return random.Random(0xC10E)
