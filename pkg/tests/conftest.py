import numpy as np
import pytest

from jndmark import data
from jndmark.mask import compute_mask
from jndmark.watermark import EmbedConfig, embed


@pytest.fixture(scope="session")
def photo():
    return data.photo("launchpad")


@pytest.fixture(scope="session")
def busy_photo():
    return data.photo("gravel")


@pytest.fixture(scope="session")
def lsu12():
    return data.watermark("lsu12x12")


@pytest.fixture(scope="session")
def lsu15():
    return data.watermark("lsu15x12")


@pytest.fixture(scope="session")
def photo_mask(photo):
    return compute_mask(photo)


@pytest.fixture(scope="session")
def marked(photo, lsu12, photo_mask):
    """The reference photo watermarked with the 12x12 logo at beta 0.007, q 2467."""
    return embed(photo, lsu12, EmbedConfig(), photo_mask)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def step_image(shape=(64, 64), col=32, lo=64, hi=192):
    img = np.full(shape, lo, dtype=np.uint8)
    img[:, col:] = hi
    return img


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
