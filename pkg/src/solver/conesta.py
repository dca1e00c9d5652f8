import logging
import math

import numpy as np

from src.errors import ConvergenceError, DataError
from src.models import ContinuationRecord, FloatArray, SolverTrace
from src.solver.fista import MAX_INNER_ITER, fista
from src.solver.problem import RidgeSmoothedProblem

logger = logging.getLogger(__name__)

TAU = 0.5
MU_MIN = 1e-8
MAX_CONTINUATIONS = 100
LOSS_LIPSCHITZ = 2.0


def mu_opt(eps: float, problem: RidgeSmoothedProblem) -> float:
    """Smoothing parameter minimising the FISTA iterations needed to reach eps."""
    if not eps > 0:
        raise DataError(f"eps must be positive, got {eps}")
    norm_sq = problem.op.norm**2 if problem.has_tv else 0.0
    if norm_sq == 0.0:
        return MU_MIN

    m = problem.M
    a = problem.gamma * m * norm_sq
    b = m * LOSS_LIPSCHITZ * norm_sq * eps
    # (-a + sqrt(a^2 + b)) / (M L), rationalised to avoid cancellation for small eps
    return b / (m * LOSS_LIPSCHITZ * (a + math.sqrt(a * a + b)))


def conesta(
    problem: RidgeSmoothedProblem,
    eps: float,
    v0: FloatArray | None = None,
    max_continuations: int = MAX_CONTINUATIONS,
    max_inner: int = MAX_INNER_ITER,
) -> tuple[FloatArray, SolverTrace]:
    """Continuation over mu with FISTA inner solves, certified by duality gaps.

    Returns v with gap_mu(v) + mu * gamma * M <= eps, an upper bound on
    f(v) - f(v*) for the non-smoothed problem. Raises ConvergenceError, with the
    trace so far, when an inner solve hits max_inner or the continuation cap is
    exhausted.
    """
    if not eps > 0:
        raise DataError(f"eps must be positive, got {eps}")

    v = np.zeros(problem.p) if v0 is None else v0.astype(np.float64, copy=True)
    trace = SolverTrace()
    bias = problem.gamma * problem.M

    start = problem.evaluate(v, MU_MIN)
    if start.gap + MU_MIN * bias <= eps:
        trace.append(
            ContinuationRecord(
                continuation=0,
                mu=MU_MIN,
                eps=eps,
                eps_mu=eps,
                fista_iters=0,
                gap=start.gap,
                objective=start.objective,
                eps_reached=start.gap + MU_MIN * bias,
            )
        )
        return v, trace

    eps_i = TAU * start.gap
    for i in range(max_continuations):
        mu = mu_opt(eps_i, problem)
        eps_mu = eps_i - mu * bias
        clamped = eps_mu <= 0
        if clamped:
            logger.warning(
                "continuation %d: eps_mu=%g <= 0, clamped to eps/2=%g", i, eps_mu, eps_i / 2
            )
            eps_mu = eps_i / 2

        result = fista(problem, v, eps_mu, mu, max_iter=max_inner)
        v = result.v
        eps_reached = result.gap + mu * bias
        trace.append(
            ContinuationRecord(
                continuation=i,
                mu=mu,
                eps=eps_i,
                eps_mu=eps_mu,
                fista_iters=result.iterations,
                gap=result.gap,
                objective=result.objective,
                eps_reached=eps_reached,
                clamped=clamped,
            )
        )
        logger.debug(
            "continuation %d: mu=%g eps=%g fista_iters=%d gap=%g reached=%g",
            i,
            mu,
            eps_i,
            result.iterations,
            result.gap,
            eps_reached,
        )
        if not result.converged:
            raise ConvergenceError(
                f"FISTA hit the {max_inner} iteration cap at continuation {i} "
                f"(mu={mu:g}, gap={result.gap:g} > eps_mu={eps_mu:g})",
                trace=trace,
            )
        if eps_reached <= eps:
            return v, trace
        eps_i = TAU * eps_reached

    raise ConvergenceError(
        f"CONESTA did not reach eps={eps:g} within {max_continuations} continuations "
        f"(last bound {trace.final_eps:g})",
        trace=trace,
    )
