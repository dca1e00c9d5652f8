import numpy as np
import pytest

from src.errors import DataError
from src.models import GridMask, PenaltyWeights
from src.smoothing import (
    SmoothingState,
    alpha_star,
    project_group_ball,
    project_stacked,
    smooth_part_lipschitz,
    smoothed_gradient,
    smoothed_value,
    tv_value,
)
from src.structure import build_grid_tv_operator


def test_projection_keeps_interior_points():
    x = np.array([0.3, -0.4])
    np.testing.assert_array_equal(project_group_ball(x), x)
    np.testing.assert_allclose(np.linalg.norm(project_group_ball(np.array([3.0, 4.0]))), 1.0)


def test_stacked_projection_is_groupwise(chain_op):
    y = np.array([2.0, 0.5, -3.0])
    alpha = project_stacked(chain_op, y)
    np.testing.assert_allclose(alpha, [1.0, 0.5, -1.0])


def test_alpha_lies_in_unit_balls(rng, grid_op):
    v = rng.standard_normal(grid_op.p)
    alpha = alpha_star(grid_op, v, 1e-3)
    assert np.all(grid_op.stacked_group_norms(alpha) <= 1.0 + 1e-12)


def test_sandwich_inequality(rng):
    op = build_grid_tv_operator(GridMask.from_dims((6, 5)))
    M = op.p / 2.0
    for _ in range(100):
        v = rng.standard_normal(op.p) * rng.uniform(0.01, 10.0)
        mu = 10.0 ** rng.uniform(-6, 1)
        s = tv_value(op, v)
        s_mu = smoothed_value(op, v, mu)
        assert s_mu <= s + 1e-12
        assert s <= s_mu + mu * M + 1e-12


def test_gradient_matches_finite_differences(rng):
    op = build_grid_tv_operator(GridMask.from_dims((8, 8)))
    h = 1e-6
    for _ in range(20):
        v = rng.standard_normal(op.p)
        mu = 10.0 ** rng.uniform(-2, 0)
        grad = smoothed_gradient(op, v, mu)
        numeric = np.array(
            [
                (smoothed_value(op, v + h * e, mu) - smoothed_value(op, v - h * e, mu)) / (2 * h)
                for e in np.eye(op.p)
            ]
        )
        assert np.linalg.norm(grad - numeric) <= 1e-5 * max(1.0, np.linalg.norm(grad))


def test_lipschitz_constant(chain_op):
    weights = PenaltyWeights(l1=0.0, l2=1.0, tv=1.0)
    assert smooth_part_lipschitz(chain_op, 1.0, weights) == pytest.approx(2.0 + 2.0 + np.sqrt(2.0))
    assert smooth_part_lipschitz(chain_op, 1.0, weights) == pytest.approx(5.4142, abs=1e-4)


def test_halving_mu_doubles_tv_term(chain_op):
    weights = PenaltyWeights(l1=0.0, l2=1.0, tv=1.0)
    at_one = smooth_part_lipschitz(chain_op, 1.0, weights) - 2.0
    at_half = smooth_part_lipschitz(chain_op, 0.5, weights) - 2.0
    assert at_half == pytest.approx(2.0 * at_one)


def test_lipschitz_without_tv_is_loss_only(chain_op):
    assert smooth_part_lipschitz(chain_op, 1e-8, PenaltyWeights(0.5, 1.0, 0.0)) == 2.0


@pytest.mark.parametrize("mu", [0.0, -1.0])
def test_non_positive_mu_is_rejected(chain_op, mu):
    with pytest.raises(DataError, match="mu"):
        smoothed_value(chain_op, np.zeros(4), mu)


def test_smoothing_state(rng, grid_op):
    v = rng.standard_normal(grid_op.p)
    state = SmoothingState.at(grid_op, v, 0.1)
    assert state.M == grid_op.p / 2.0
    assert state.alpha_sqnorm <= grid_op.n_groups
    np.testing.assert_array_equal(state.av, grid_op.apply(v))
    assert state.value == smoothed_value(grid_op, v, 0.1)


def test_smoothed_value_is_convex_along_segments(rng, grid_op):
    for _ in range(50):
        a, b = rng.standard_normal((2, grid_op.p))
        mu = 10.0 ** rng.uniform(-3, 0)
        t = rng.uniform()
        mixed = smoothed_value(grid_op, t * a + (1 - t) * b, mu)
        chord = t * smoothed_value(grid_op, a, mu) + (1 - t) * smoothed_value(grid_op, b, mu)
        assert mixed <= chord + 1e-10


def test_smoothed_value_does_not_grow_with_mu(rng, grid_op):
    mus = np.logspace(-5, 1, 13)
    for _ in range(20):
        v = rng.standard_normal(grid_op.p) * rng.uniform(0.1, 5.0)
        values = [smoothed_value(grid_op, v, mu) for mu in mus]
        assert np.all(np.diff(values) <= 1e-10)
