"""Rank-1 alternating minimisation with Hotelling deflation.

Each component alternates a CONESTA solve for the loading v with the closed-form
unit component u = Xv / ||Xv||, then removes u v^T from the data before the
next component is extracted. Components are not forced to be orthogonal.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.errors import DataError, DegenerateLoadingError
from src.models import FloatArray, PenaltyWeights, SolverTrace, SpcaModel
from src.solver import RidgeSmoothedProblem, conesta
from src.structure import GroupLinearOperator

logger = logging.getLogger(__name__)

MAX_ALTERNATIONS = 100
START_POWER_STEPS = 3
_ERROR_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ComponentFit:
    u: FloatArray
    v: FloatArray
    traces: list[SolverTrace]
    alternations: int
    converged: bool


def center(X: FloatArray) -> tuple[FloatArray, FloatArray]:
    means = X.mean(axis=0)
    return X - means, means


def update_u(X: FloatArray, v: FloatArray) -> FloatArray:
    xv = X @ v
    norm = float(np.linalg.norm(xv))
    if norm == 0.0:
        raise DegenerateLoadingError("degenerate loading: Xv = 0")
    return xv / norm


def deflate(X: FloatArray, u: FloatArray, v: FloatArray) -> FloatArray:
    if u.shape != (X.shape[0],) or v.shape != (X.shape[1],):
        raise DataError(
            f"cannot deflate a {X.shape} matrix with u{u.shape} and v{v.shape}"
        )
    return X - np.outer(u, v)


def principal_direction(X: FloatArray) -> FloatArray:
    """Top left singular vector of X."""
    U, _, _ = np.linalg.svd(X, full_matrices=False)
    return U[:, 0]


def penalty_scale(X: FloatArray) -> float:
    """Smallest l1 weight that zeroes the loading at the principal direction.

    With lambda2 and TV left aside, v = 0 solves the subproblem for u exactly
    when ||X^T u||_inf / n <= lambda1. Weight grids expressed as multiples of this
    value keep their meaning across data scales.
    """
    Xc, _ = center(np.asarray(X, dtype=np.float64))
    if not Xc.any():
        raise DataError("cannot scale penalties on constant data")
    return float(np.abs(Xc.T @ principal_direction(Xc)).max()) / Xc.shape[0]


def _start(X: FloatArray, seed: int) -> FloatArray:
    """Seeded random unit u0, moved towards the principal direction by power steps."""
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(X.shape[0])
    u /= np.linalg.norm(u)
    for _ in range(START_POWER_STEPS):
        step = X @ (X.T @ u)
        norm = float(np.linalg.norm(step))
        if norm == 0.0:
            break
        u = step / norm
    return u


def fit_component(
    X: FloatArray,
    weights: PenaltyWeights,
    op: GroupLinearOperator,
    eps: float,
    seed: int,
    max_alternations: int = MAX_ALTERNATIONS,
) -> ComponentFit:
    """One (u, v) pair of the penalised rank-1 problem.

    After every v-update the loading is rescaled to its least-squares amplitude
    given u, so u v^T is the best rank-1 term along v. The loop stops when the
    relative change of ||X - u v^T||_F falls below eps.

    A zero loading from the seeded start is retried once from the principal
    direction; the component counts as exhausted only when v = 0 there or at a
    u produced by the alternation.
    """
    if X.shape[1] != op.p:
        raise DataError(f"data has {X.shape[1]} features, operator expects {op.p}")
    x_norm = float(np.linalg.norm(X))
    if x_norm == 0.0:
        raise DegenerateLoadingError("degenerate loading: data matrix is zero")

    u = _start(X, seed)
    traces: list[SolverTrace] = []
    v_raw: FloatArray | None = None
    v = np.zeros(X.shape[1])
    previous: float | None = None
    restarted = False
    it = 0
    while it < max_alternations:
        problem = RidgeSmoothedProblem.from_data(X, u, weights, op)
        v_raw, trace = conesta(problem, eps, v0=v_raw)
        traces.append(trace)
        if not v_raw.any():
            if it == 0 and not restarted:
                logger.info(
                    "zero loading from the seeded start, retrying from the principal direction"
                )
                restarted = True
                u = principal_direction(X)
                v_raw = None
                continue
            raise DegenerateLoadingError(
                f"degenerate loading: CONESTA returned v = 0 at alternation {it + 1}"
            )
        it += 1

        u = update_u(X, v_raw)
        v = v_raw * (float(u @ (X @ v_raw)) / float(v_raw @ v_raw))
        error = float(np.linalg.norm(X - np.outer(u, v)))
        logger.debug("alternation %d: reconstruction error %.6g", it, error)

        if previous is not None and abs(error - previous) <= eps * max(
            error, _ERROR_FLOOR * x_norm
        ):
            return ComponentFit(u, v, traces, it, True)
        previous = error

    logger.warning("component did not stabilise within %d alternations", max_alternations)
    return ComponentFit(u, v, traces, max_alternations, False)


def fit(
    X: FloatArray,
    K: int,
    weights: PenaltyWeights,
    op: GroupLinearOperator,
    eps: float,
    seed: int,
) -> SpcaModel:
    if K < 1:
        raise DataError(f"number of components must be >= 1, got {K}")
    if eps <= 0:
        raise DataError(f"eps must be positive, got {eps}")

    Xk, means = center(np.asarray(X, dtype=np.float64))
    energy = [float(np.sum(Xk * Xk))]
    us: list[FloatArray] = []
    vs: list[FloatArray] = []
    traces: list[list[SolverTrace]] = []
    truncated = False

    for k in range(K):
        try:
            component = fit_component(Xk, weights, op, eps, seed + k)
        except DegenerateLoadingError as e:
            logger.warning("component %d exhausted (%s); model truncated to %d", k + 1, e, k)
            truncated = True
            break
        Xk = deflate(Xk, component.u, component.v)
        energy.append(float(np.sum(Xk * Xk)))
        us.append(component.u)
        vs.append(component.v)
        traces.append(component.traces)
        logger.info(
            "component %d: %d alternations, %d nonzero loadings, residual energy %.6g",
            k + 1,
            component.alternations,
            int(np.count_nonzero(component.v)),
            energy[-1],
        )

    residual = np.array(energy)
    explained = -np.diff(residual) / residual[0] if residual[0] > 0 else np.zeros(len(vs))
    n, p = Xk.shape
    return SpcaModel(
        V=np.column_stack(vs) if vs else np.zeros((p, 0)),
        U=np.column_stack(us) if us else np.zeros((n, 0)),
        means=means,
        explained_variance=explained,
        residual_energy=residual,
        weights=weights,
        eps=eps,
        seed=seed,
        traces=traces,
        truncated=truncated,
    )


def transform(model: SpcaModel, X_new: FloatArray) -> FloatArray:
    """Scores of new samples, deflating sequentially as in training."""
    X_new = np.atleast_2d(np.asarray(X_new, dtype=np.float64))
    if X_new.shape[1] != model.n_features:
        raise DataError(
            f"data has {X_new.shape[1]} features, model expects {model.n_features}"
        )
    residual = X_new - model.means
    scores = np.zeros((X_new.shape[0], model.n_components))
    for k in range(model.n_components):
        v = model.V[:, k]
        energy = float(v @ v)
        if energy == 0.0:
            continue
        scores[:, k] = residual @ v / energy
        residual = residual - np.outer(scores[:, k], v)
    return scores


def reconstruction_from(
    model: SpcaModel, scores: FloatArray, add_mean: bool = False
) -> FloatArray:
    if scores.ndim != 2 or scores.shape[1] != model.n_components:
        raise DataError(
            f"scores have shape {scores.shape}, model has {model.n_components} components"
        )
    reconstruction = scores @ model.V.T
    if add_mean:
        reconstruction = reconstruction + model.means
    return reconstruction


def sparsity(model: SpcaModel) -> FloatArray:
    """Fraction of exactly-zero features per component."""
    if model.n_components == 0:
        return np.zeros(0)
    return np.mean(model.V == 0.0, axis=0)
