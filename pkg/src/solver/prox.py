import numpy as np

from src.errors import DataError
from src.models import FloatArray


def prox_l1(v: FloatArray, t: float) -> FloatArray:
    """Soft thresholding, the proximal operator of t * ||.||_1."""
    if t < 0:
        raise DataError(f"threshold must be non-negative, got {t}")
    if t == 0:
        return v.copy()
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)
