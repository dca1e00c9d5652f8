"""Nesterov smoothing of the group penalty s(v) = sum_g ||A_g v||_2.

s is written as max over alpha in K of alpha^T A v, with K the product of unit
l2 balls (one per group). The smoothed surrogate subtracts (mu / 2) ||alpha||^2
inside the max, which gives a closed-form maximiser alpha*, a gradient
A^T alpha* and the bound s_mu <= s <= s_mu + mu * M with M = p / 2.
"""

from dataclasses import dataclass

import numpy as np

from src.errors import DataError
from src.models import FloatArray, PenaltyWeights
from src.structure import GroupLinearOperator


def _check_mu(mu: float) -> None:
    if not mu > 0:
        raise DataError(f"smoothing parameter mu must be positive, got {mu}")


def project_group_ball(x: FloatArray) -> FloatArray:
    norm = float(np.linalg.norm(x))
    if norm <= 1.0:
        return x.copy()
    return x / norm


def project_stacked(op: GroupLinearOperator, y: FloatArray) -> FloatArray:
    """Group-wise projection of a stacked vector onto K."""
    norms = op.stacked_group_norms(y)
    return y / np.maximum(norms, 1.0)[op.row_group]


def _alpha_from_av(op: GroupLinearOperator, av: FloatArray, mu: float) -> FloatArray:
    return project_stacked(op, av / mu)


def alpha_star(op: GroupLinearOperator, v: FloatArray, mu: float) -> FloatArray:
    _check_mu(mu)
    return _alpha_from_av(op, op.apply(v), mu)


def tv_value(op: GroupLinearOperator, v: FloatArray) -> float:
    return float(op.group_norms(v).sum())


def smoothed_value(op: GroupLinearOperator, v: FloatArray, mu: float) -> float:
    return SmoothingState.at(op, v, mu).value


def smoothed_gradient(op: GroupLinearOperator, v: FloatArray, mu: float) -> FloatArray:
    return op.apply_adjoint(alpha_star(op, v, mu))


def smooth_part_lipschitz(
    op: GroupLinearOperator, mu: float, weights: PenaltyWeights
) -> float:
    """Lipschitz constant of the gradient of l + (lambda / lambda2) s_mu."""
    _check_mu(mu)
    if not weights.l2 > 0:
        raise DataError(f"l2 weight must be positive, got {weights.l2}")
    if weights.tv == 0.0:
        return 2.0
    return 2.0 + weights.gamma * op.norm**2 / mu


@dataclass(frozen=True, eq=False)
class SmoothingState:
    """Av, its maximiser alpha* and the bound constant M at one (v, mu)."""

    mu: float
    M: float
    av: FloatArray
    alpha: FloatArray

    @classmethod
    def at(cls, op: GroupLinearOperator, v: FloatArray, mu: float) -> "SmoothingState":
        _check_mu(mu)
        av = op.apply(v)
        return cls(mu=mu, M=op.p / 2.0, av=av, alpha=_alpha_from_av(op, av, mu))

    @property
    def alpha_sqnorm(self) -> float:
        return float(self.alpha @ self.alpha)

    @property
    def value(self) -> float:
        """s_mu at the state's v."""
        return float(self.alpha @ self.av) - 0.5 * self.mu * self.alpha_sqnorm
