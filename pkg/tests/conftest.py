import numpy as np
import pytest
from hypothesis import settings, strategies as st

from ap3.groups import AmbientGroup, Interval, SiteSet

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


small_groups = st.one_of(
    st.integers(1, 60).map(AmbientGroup.cyclic),
    st.integers(1, 4).map(AmbientGroup.vector),
)

odd_groups = st.one_of(
    st.integers(0, 30).map(lambda k: AmbientGroup.cyclic(2 * k + 1)),
    st.integers(1, 3).map(AmbientGroup.vector),
)


@st.composite
def site_sets(draw, groups=small_groups, min_size=0):
    g = draw(groups)
    els = draw(st.sets(st.integers(0, g.order - 1), min_size=min(min_size, g.order)))
    return SiteSet.from_elements(g, els)


@st.composite
def interval_sets(draw, max_length=30):
    N = draw(st.integers(1, max_length))
    return SiteSet.from_elements(Interval(N), draw(st.sets(st.integers(1, N))))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
