import random
from fractions import Fraction

import pytest

from groups.exact import Dyadic
from groups.monod import MONOD_ACTION, strongly_transitive_H
from groups.thompson import UNIT_ACTION, random_word

SEED = 20200613


@pytest.fixture
def rng():
    return random.Random(SEED)


def random_dyadic_unit(rng, depth=6):
    """A dyadic rational strictly inside (0, 1)."""
    k = rng.randint(1, depth)
    return Dyadic(rng.randrange(1, 1 << k), k)


def random_increasing_dyadics(rng, count, depth=6):
    values = set()
    while len(values) < count:
        values.add(random_dyadic_unit(rng, depth))
    return sorted(values)


def random_unit_element(rng, max_length=12):
    return UNIT_ACTION.word(random_word(rng, rng.randint(0, max_length)))


def random_rationals(rng, count, spread=20):
    values = set()
    while len(values) < count:
        values.add(Fraction(rng.randint(-spread * 4, spread * 4), rng.randint(1, 4)))
    return sorted(values)


def random_pp_element(rng):
    """Either a short generator word or a random interpolating element."""
    if rng.random() < 0.5:
        return MONOD_ACTION.word("".join(rng.choice("TDPtdp") for _ in range(rng.randint(0, 5))))
    n = rng.randint(1, 3)
    return strongly_transitive_H(random_rationals(rng, n), random_rationals(rng, n))
