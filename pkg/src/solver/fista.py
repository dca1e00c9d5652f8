import logging
import math
from dataclasses import dataclass

import numpy as np

from src.errors import DataError, DivergenceError
from src.models import FloatArray
from src.solver.problem import RidgeSmoothedProblem
from src.solver.prox import prox_l1

logger = logging.getLogger(__name__)

MAX_INNER_ITER = 10_000
LARGE_PROBLEM = 10_000
LARGE_PROBLEM_GAP_EVERY = 10


@dataclass(frozen=True, eq=False)
class FistaResult:
    v: FloatArray
    iterations: int
    gap: float
    objective: float
    converged: bool


def fista(
    problem: RidgeSmoothedProblem,
    v0: FloatArray,
    eps_mu: float,
    mu: float,
    max_iter: int = MAX_INNER_ITER,
) -> FistaResult:
    """Accelerated proximal gradient on f_mu, stopped on the duality gap."""
    if not eps_mu > 0:
        raise DataError(f"eps_mu must be positive, got {eps_mu}")
    if not mu > 0:
        raise DataError(f"mu must be positive, got {mu}")

    start = problem.evaluate(v0, mu)
    if start.gap <= eps_mu:
        return FistaResult(v0.copy(), 0, start.gap, start.objective, True)

    step = 1.0 / problem.lipschitz(mu)
    threshold = step * problem.kappa
    gap_every = 1 if problem.p <= LARGE_PROBLEM else LARGE_PROBLEM_GAP_EVERY

    v_prev = v0.copy()
    v = v0.copy()
    evaluation = start
    k = 1
    for k in range(1, max_iter + 1):
        # momentum weight (k - 1) / (k + 2), zero on the first step
        z = v + ((k - 1.0) / (k + 2.0)) * (v - v_prev)
        v_prev = v
        v = prox_l1(z - step * problem.smooth_gradient(z, mu), threshold)

        if k % gap_every and k != max_iter:
            continue
        evaluation = problem.evaluate(v, mu)
        if not (math.isfinite(evaluation.objective) and np.all(np.isfinite(v))):
            raise DivergenceError(
                f"divergence: non-finite objective at FISTA iteration {k} (mu={mu:g})"
            )
        if evaluation.gap <= eps_mu:
            logger.debug("FISTA mu=%g converged in %d iterations, gap=%g", mu, k, evaluation.gap)
            return FistaResult(v, k, evaluation.gap, evaluation.objective, True)

    logger.debug(
        "FISTA mu=%g stopped at the %d iteration cap, gap=%g > %g",
        mu,
        max_iter,
        evaluation.gap,
        eps_mu,
    )
    return FistaResult(v, k, evaluation.gap, evaluation.objective, False)
