import math

import numpy as np
import pytest

from src.errors import DataError
from src.synthdata import generate_dataset, make_loadings, train_test_split


def test_loadings_have_disjoint_dot_supports():
    V = make_loadings(50)
    assert V.shape == (2500, 3)
    assert set(np.unique(V)) == {0.0, 1.0}
    assert np.all(V.sum(axis=1) <= 1.0)
    assert np.all(V.sum(axis=0) > 0)


def test_loading_layout_on_the_image():
    side = 50
    V = make_loadings(side)
    images = V.T.reshape(3, side, side)
    # rows are the slow axis: V1 sits in the upper half, V2 in the lower half
    assert images[0, : side // 2].sum() == images[0].sum()
    assert images[1, side // 2 :].sum() == images[1].sum()
    assert images[2, side // 2, side // 2] == 1.0


def test_side_too_small():
    with pytest.raises(DataError, match="side"):
        make_loadings(8)


def test_noise_is_scaled_to_exact_snr():
    data = generate_dataset(seed=1, n=60, side=16, snr=0.1)
    signal = data.U_true @ data.V_true.T
    ratio = np.linalg.norm(signal) / np.linalg.norm(data.X - signal)
    assert ratio == pytest.approx(0.1, rel=1e-10)


def test_noiseless_data():
    data = generate_dataset(seed=1, n=10, side=16, snr=math.inf)
    np.testing.assert_array_equal(data.X, data.U_true @ data.V_true.T)


def test_generation_is_seeded():
    first = generate_dataset(seed=4, n=10, side=16, snr=0.5)
    again = generate_dataset(seed=4, n=10, side=16, snr=0.5)
    other = generate_dataset(seed=5, n=10, side=16, snr=0.5)
    np.testing.assert_array_equal(first.X, again.X)
    assert not np.array_equal(first.X, other.X)


@pytest.mark.parametrize("snr", [0.0, -1.0])
def test_non_positive_snr(snr):
    with pytest.raises(DataError, match="snr must be positive"):
        generate_dataset(seed=0, n=10, side=16, snr=snr)


def test_train_test_split(tiny_dataset):
    train, test = train_test_split(tiny_dataset)
    assert train.shape == (20, 256)
    assert test.shape == (20, 256)
    np.testing.assert_array_equal(np.vstack([train, test]), tiny_dataset.X)
    assert tiny_dataset.grid.dims == (16, 16, 1)
