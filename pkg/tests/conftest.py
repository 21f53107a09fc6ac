from fractions import Fraction

import pytest

from vgit.corpus import corpus


@pytest.fixture(scope="session")
def actions():
    return corpus()


def F(p, q=1):
    return Fraction(p, q)
