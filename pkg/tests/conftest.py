import numpy as np
import pytest
from hypothesis import strategies as st

from cnrnn.imagery import GrayImage

ACCEPTANCE_LINES = []


@st.composite
def gray_images(draw, max_side=12, max_level=None):
    w = draw(st.integers(1, max_side))
    h = draw(st.integers(1, max_side))
    L = max_level if max_level is not None else draw(st.sampled_from([1, 3, 7, 255]))
    values = draw(st.lists(st.integers(0, L), min_size=w * h, max_size=w * h))
    return GrayImage(np.array(values).reshape(h, w), L)


def random_image(rng, w, h, L=255):
    return GrayImage(rng.integers(0, L + 1, size=(h, w)), L)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
