import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from catpaths.model import JumpSet

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

POLICIES = ("default", "anywhere", "exclude:0;2", "exclude:1")


@st.composite
def jumpsets(draw, max_c=2, max_d=2, policies=POLICIES):
    """Small weighted jump sets with rational weights."""
    c = draw(st.integers(1, max_c))
    d = draw(st.integers(1, max_d))
    weight = st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=4).filter(lambda x: x > 0)
    w = {-c: draw(weight), d: draw(weight)}
    for j in range(-c + 1, d):
        if draw(st.booleans()):
            w[j] = draw(weight)
    return JumpSet.from_weights(w, draw(weight), draw(st.sampled_from(policies)))


@pytest.fixture
def dyck():
    from catpaths.model import DYCK

    return DYCK
