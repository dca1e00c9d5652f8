"""Synthetic images built from three dot-shaped loadings plus Gaussian noise.

Each sample is u1 V1 + u2 V2 + u3 V3 + noise on a side x side image, where V1
covers two upper discs, V2 two lower discs and V3 a central disc.
"""

import logging
import math

import numpy as np

from src.errors import DataError
from src.models import FloatArray, GridMask, SyntheticDataset

logger = logging.getLogger(__name__)

MIN_SIDE = 16
RADIUS_FRACTION = 0.1

# (row, column) centres as fractions of the side length, per loading
DOT_CENTRES: tuple[tuple[tuple[float, float], ...], ...] = (
    ((0.25, 0.3), (0.25, 0.7)),
    ((0.75, 0.3), (0.75, 0.7)),
    ((0.5, 0.5),),
)


def make_loadings(side: int) -> FloatArray:
    """Ground-truth loadings as a (side * side) x 3 matrix with disjoint supports."""
    if side < MIN_SIDE:
        raise DataError(f"side must be >= {MIN_SIDE} to separate the dots, got {side}")

    radius = side * RADIUS_FRACTION
    rows, cols = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    images = np.zeros((len(DOT_CENTRES), side, side))
    for k, centres in enumerate(DOT_CENTRES):
        for row_frac, col_frac in centres:
            r0, c0 = row_frac * (side - 1), col_frac * (side - 1)
            images[k][(rows - r0) ** 2 + (cols - c0) ** 2 <= radius**2] = 1.0

    if np.any(images.sum(axis=0) > 1.0):
        raise DataError(f"side {side} is too small: dot supports overlap")

    # feature index = column + side * row, so the row index of the image
    # is the slow grid axis j and the column is the fast axis i
    return images.reshape(len(DOT_CENTRES), side * side).T.copy()


def generate_dataset(seed: int, n: int, side: int, snr: float) -> SyntheticDataset:
    """Samples with standard normal coefficients and noise scaled to an exact SNR.

    SNR is ||signal||_F / ||noise||_F for the realised matrices; snr = inf
    gives noiseless data.
    """
    if n < 2:
        raise DataError(f"n must be >= 2, got {n}")
    if not snr > 0:
        raise DataError(f"snr must be positive, got {snr}")

    V = make_loadings(side)
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n, V.shape[1]))
    signal = U @ V.T
    noise = rng.standard_normal(signal.shape)

    if math.isinf(snr):
        X = signal
    else:
        scale = np.linalg.norm(signal) / (snr * np.linalg.norm(noise))
        X = signal + scale * noise

    logger.info("generated dataset seed=%d n=%d side=%d snr=%g", seed, n, side, snr)
    return SyntheticDataset(
        X=X,
        U_true=U,
        V_true=V,
        snr=snr,
        seed=seed,
        grid=GridMask.from_dims((side, side)),
    )


def train_test_split(dataset: SyntheticDataset) -> tuple[FloatArray, FloatArray]:
    half = dataset.n_samples // 2
    return dataset.X[:half], dataset.X[half:]
