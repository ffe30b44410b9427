import numpy as np


def cn(rng, *shape):
    """Circularly symmetric unit-variance complex normals."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)
