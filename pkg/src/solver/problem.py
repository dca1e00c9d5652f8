from dataclasses import dataclass

import numpy as np

from src.errors import DataError
from src.models import FloatArray, PenaltyWeights
from src.smoothing import SmoothingState, project_stacked, smooth_part_lipschitz, tv_value
from src.structure import GroupLinearOperator


@dataclass(frozen=True, eq=False)
class GapEvaluation:
    gap: float
    objective: float


@dataclass(frozen=True, eq=False)
class RidgeSmoothedProblem:
    """Fixed-u subproblem with every penalty divided through by lambda2.

        f_mu(v) = 1/2 ||v - b||^2 + 1/2 ||v||^2 + gamma s_mu(v) + kappa ||v||_1

    with b = X^T u / (n lambda2), gamma = lambda / lambda2 and
    kappa = lambda1 / lambda2. The first term is the strongly convex loss used
    by the Fenchel gap; the rest is the penalty psi_mu.
    """

    target: FloatArray
    weights: PenaltyWeights
    op: GroupLinearOperator
    n: int

    def __post_init__(self) -> None:
        if self.target.shape != (self.op.p,):
            raise DataError(
                f"target has shape {self.target.shape}, operator expects {self.op.p} features"
            )

    @classmethod
    def from_data(
        cls,
        X: FloatArray,
        u: FloatArray,
        weights: PenaltyWeights,
        op: GroupLinearOperator,
    ) -> "RidgeSmoothedProblem":
        n = X.shape[0]
        if u.shape != (n,):
            raise DataError(f"u has shape {u.shape}, data has {n} samples")
        return cls(target=X.T @ u / (n * weights.l2), weights=weights, op=op, n=n)

    @property
    def p(self) -> int:
        return self.op.p

    @property
    def gamma(self) -> float:
        return self.weights.gamma

    @property
    def kappa(self) -> float:
        return self.weights.kappa

    @property
    def M(self) -> float:
        return self.p / 2.0

    @property
    def has_tv(self) -> bool:
        return self.gamma > 0 and self.op.total_rows > 0

    def lipschitz(self, mu: float) -> float:
        return smooth_part_lipschitz(self.op, mu, self.weights)

    def smooth_gradient(self, v: FloatArray, mu: float) -> FloatArray:
        grad = 2.0 * v - self.target
        if self.has_tv:
            alpha = project_stacked(self.op, self.op.apply(v) / mu)
            grad += self.gamma * self.op.apply_adjoint(alpha)
        return grad

    def _ridge_part(self, v: FloatArray) -> float:
        r = v - self.target
        return 0.5 * float(r @ r) + 0.5 * float(v @ v) + self.kappa * float(np.abs(v).sum())

    def objective(self, v: FloatArray, mu: float) -> float:
        return self.evaluate(v, mu).objective

    def true_objective(self, v: FloatArray) -> float:
        value = self._ridge_part(v)
        if self.has_tv:
            value += self.gamma * tv_value(self.op, v)
        return value

    def evaluate(self, v: FloatArray, mu: float) -> GapEvaluation:
        """Smoothed objective and Fenchel duality gap at v."""
        if not mu > 0:
            raise DataError(f"smoothing parameter mu must be positive, got {mu}")

        objective = self._ridge_part(v)
        sigma = v - self.target
        w = -sigma
        penalty_conj = 0.0
        if self.has_tv:
            state = SmoothingState.at(self.op, v, mu)
            objective += self.gamma * state.value
            w = w - self.gamma * self.op.apply_adjoint(state.alpha)
            penalty_conj += 0.5 * self.gamma * mu * state.alpha_sqnorm

        excess = np.maximum(np.abs(w) - self.kappa, 0.0)
        penalty_conj += 0.5 * float(excess @ excess)
        loss_conj = 0.5 * float(sigma @ sigma) + float(sigma @ self.target)
        return GapEvaluation(gap=objective + loss_conj + penalty_conj, objective=objective)


def duality_gap(problem: RidgeSmoothedProblem, v: FloatArray, mu: float) -> float:
    return problem.evaluate(v, mu).gap
