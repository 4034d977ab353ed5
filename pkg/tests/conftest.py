import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", deadline=None, derandomize=True)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(0xA11E)


def random_image(rng, w, h, opaque=False):
    """Random RGBA image on the 2**-53 lattice (native resolution of random())."""
    img = rng.random((h, w, 4))
    if opaque:
        img[..., 3] = 1.0
    return img


def quantized_image(rng, w, h, opaque=False):
    """Random 8-bit-valued image, i.e. what load_png produces."""
    img = rng.integers(0, 256, (h, w, 4)).astype(np.float64) / 255.0
    if opaque:
        img[..., 3] = 1.0
    return img
