"""Shared model fixtures.

The four bundled models cover the interesting corners: continuous symmetric
(Gaussian), lattice symmetric (TwoPoint C=1), lattice asymmetric with a long
up-jump (TwoPoint C=10), and dependent increments (two-state Markov walk).
"""

from __future__ import annotations

import pytest

from busyburst import FiniteMarkov, Gaussian, TwoPoint

GAUSSIAN = Gaussian(mean=-0.1, variance=1.0)
TP_C1 = TwoPoint(up_value=1.0, up_prob=0.4)
TP_C10 = TwoPoint(up_value=10.0, up_prob=0.04)
MARKOV = FiniteMarkov(values=(-1.0, 1.0), transition=((0.8, 0.2), (0.3, 0.7)))

BUNDLED = {
    "gaussian": GAUSSIAN,
    "two_point_c1": TP_C1,
    "two_point_c10": TP_C10,
    "markov": MARKOV,
}


@pytest.fixture(params=sorted(BUNDLED))
def any_model(request):
    return BUNDLED[request.param]


@pytest.fixture
def gaussian():
    return GAUSSIAN


@pytest.fixture
def tp_c1():
    return TP_C1


@pytest.fixture
def tp_c10():
    return TP_C10


@pytest.fixture
def markov():
    return MARKOV
