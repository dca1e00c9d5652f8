"""Cross-validation and multi-dataset benchmark of SPCA-TV against ElasticNet-PCA."""

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from src.errors import ConvergenceError, DataError
from src.metrics import loading_mse, paired_differences, reconstruction_error, stability_dice
from src.models import FloatArray, PenaltyWeights, SpcaModel
from src.spca import fit, sparsity
from src.storage import LoadedData
from src.structure import GroupLinearOperator

logger = logging.getLogger(__name__)

SPCA_TV = "spca-tv"
ENET_PCA = "enet-pca"
REPORT_COLUMNS = ["method", "dataset", "reconstruction_error", "mse", "dice"]

GLOBAL_WEIGHT_GRID = (0.01, 0.1, 1.0, 10.0)
RATIO_GRID = (0.0, 0.1, 0.33, 0.5, 0.8)
MIN_ZERO_FRACTION = 0.5


@dataclass(frozen=True)
class Method:
    name: str
    weights: PenaltyWeights


def default_methods(weights: PenaltyWeights) -> list[Method]:
    """SPCA-TV with the given weights and the same weights without TV."""
    global_weight, l1_ratio, _ = weights.ratios()
    return [
        Method(SPCA_TV, weights),
        Method(ENET_PCA, PenaltyWeights.from_ratios(global_weight, l1_ratio, 0.0)),
    ]


def weight_grid(with_tv: bool = True, scale: float = 1.0) -> list[PenaltyWeights]:
    """Ratio grid with global weights in units of scale, see spca.penalty_scale."""
    if not scale > 0:
        raise DataError(f"penalty scale must be positive, got {scale}")
    candidates: list[PenaltyWeights] = []
    tv_values = tuple(r for r in RATIO_GRID if r > 0) if with_tv else (0.0,)
    for gw, l1, tv in itertools.product(GLOBAL_WEIGHT_GRID, RATIO_GRID, tv_values):
        if l1 + tv < 1.0:
            candidates.append(PenaltyWeights.from_ratios(gw * scale, l1, tv))
    return candidates


def _fit_job(
    X: FloatArray,
    K: int,
    weights: PenaltyWeights,
    op: GroupLinearOperator,
    eps: float,
    seed: int,
) -> SpcaModel:
    return fit(X, K, weights, op, eps, seed)


def _fit_all(
    jobs: Sequence[tuple[FloatArray, PenaltyWeights]],
    K: int,
    op: GroupLinearOperator,
    eps: float,
    seed: int,
    workers: int,
) -> list[SpcaModel]:
    return list(
        Parallel(n_jobs=workers)(
            delayed(_fit_job)(X, K, w, op, eps, seed) for X, w in jobs
        )
    )


def _candidate_job(
    X: FloatArray,
    K: int,
    weights: PenaltyWeights,
    op: GroupLinearOperator,
    eps: float,
    seed: int,
) -> SpcaModel | None:
    try:
        return fit(X, K, weights, op, eps, seed)
    except ConvergenceError as e:
        logger.warning("candidate %s dropped: %s", weights, e)
        return None


def is_admissible(model: SpcaModel) -> bool:
    """All requested components exist and components 2 and 3 are at least half zeros."""
    if model.truncated or model.n_components == 0:
        return False
    zeros = sparsity(model)
    return bool(np.all(zeros[1:3] >= MIN_ZERO_FRACTION))


def select_weights(
    X_train: FloatArray,
    X_test: FloatArray,
    op: GroupLinearOperator,
    K: int,
    eps: float,
    seed: int,
    candidates: Sequence[PenaltyWeights],
    workers: int = 1,
) -> tuple[PenaltyWeights, pd.DataFrame]:
    """Candidate with the lowest test reconstruction error among sparse-enough fits.

    Candidates whose solver fails are kept in the table with an empty error and
    are never chosen.
    """
    models: list[SpcaModel | None] = list(
        Parallel(n_jobs=workers)(
            delayed(_candidate_job)(X_train, K, w, op, eps, seed) for w in candidates
        )
    )
    rows = []
    for w, model in zip(candidates, models):
        gw, l1, tv = w.ratios()
        rows.append(
            {
                "global_weight": gw,
                "l1_ratio": l1,
                "tv_ratio": tv,
                "reconstruction_error": (
                    reconstruction_error(X_test, model) if model is not None else np.nan
                ),
                "components": model.n_components if model is not None else 0,
                "converged": model is not None,
                "admissible": model is not None and is_admissible(model),
            }
        )
    table = pd.DataFrame(rows)

    pool = table[table["admissible"]]
    if pool.empty:
        logger.warning("no candidate meets the sparsity rule; choosing on error alone")
        fitted = table[table["converged"]]
        if fitted.empty:
            raise ConvergenceError(f"all {len(candidates)} candidates failed to converge")
        pool = fitted[fitted["components"] == fitted["components"].max()]
    best = int(pool["reconstruction_error"].idxmin())
    return candidates[best], table


def _dice_per_member(pairwise: FloatArray, members: int) -> list[float]:
    totals = np.zeros(members)
    counts = np.zeros(members)
    for value, (a, b) in zip(pairwise, itertools.combinations(range(members), 2)):
        totals[[a, b]] += value
        counts[[a, b]] += 1
    return list(totals / np.maximum(counts, 1))


def _score(
    method: Method,
    names: Sequence[str],
    models: Sequence[SpcaModel],
    tests: Sequence[FloatArray],
    truths: Sequence[FloatArray | None],
) -> pd.DataFrame:
    stability = stability_dice([m.V for m in models])
    dice = _dice_per_member(stability.pairwise, len(models))
    rows = []
    for name, model, X_test, truth, d in zip(names, models, tests, truths, dice):
        rows.append(
            {
                "method": method.name,
                "dataset": name,
                "reconstruction_error": reconstruction_error(X_test, model),
                "mse": loading_mse(model.V, truth) if truth is not None else np.nan,
                "dice": d,
            }
        )
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def evaluate_datasets(
    datasets: Sequence[LoadedData],
    methods: Sequence[Method],
    op: GroupLinearOperator,
    K: int,
    eps: float,
    seed: int,
    workers: int = 1,
) -> pd.DataFrame:
    """Fit on the first half of every dataset, score on the second half."""
    halves = [(d.X[: d.X.shape[0] // 2], d.X[d.X.shape[0] // 2 :]) for d in datasets]
    truths = [d.V_true for d in datasets]
    if any(t is None for t in truths):
        logger.warning("ground truth missing for some datasets; MSE left empty")

    frames = []
    for method in methods:
        models = _fit_all([(train, method.weights) for train, _ in halves], K, op, eps, seed, workers)
        frames.append(
            _score(method, [d.name for d in datasets], models, [t for _, t in halves], truths)
        )
    return pd.concat(frames, ignore_index=True)


def fold_indices(n: int, folds: int, seed: int) -> list[np.ndarray]:
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(order, folds)]


def evaluate_folds(
    data: LoadedData,
    methods: Sequence[Method],
    op: GroupLinearOperator,
    K: int,
    eps: float,
    seed: int,
    folds: int,
    workers: int = 1,
) -> pd.DataFrame:
    """K-fold cross-validation: train on all folds but one, test on the held-out fold."""
    X = data.X
    splits = fold_indices(X.shape[0], folds, seed)
    tests = [X[idx] for idx in splits]
    trains = [np.delete(X, idx, axis=0) for idx in splits]
    if data.V_true is None:
        logger.warning("no ground truth for %s; MSE left empty", data.name)

    frames = []
    for method in methods:
        models = _fit_all([(tr, method.weights) for tr in trains], K, op, eps, seed, workers)
        names = [f"{data.name}/fold{i + 1}" for i in range(folds)]
        frames.append(_score(method, names, models, tests, [data.V_true] * folds))
    return pd.concat(frames, ignore_index=True)


def paired_report(report: pd.DataFrame, first: str = SPCA_TV, second: str = ENET_PCA) -> pd.DataFrame:
    """Per-metric paired differences first - second across datasets or folds."""
    a = report[report["method"] == first].set_index("dataset")
    b = report[report["method"] == second].set_index("dataset")
    common = a.index.intersection(b.index)
    rows = []
    for metric in ("reconstruction_error", "mse", "dice"):
        x, y = a.loc[common, metric], b.loc[common, metric]
        valid = x.notna() & y.notna()
        if not valid.any():
            continue
        diff = paired_differences(x[valid].tolist(), y[valid].tolist())
        rows.append(
            {
                "metric": metric,
                "comparison": f"{first} - {second}",
                "mean_difference": diff.mean,
                "std": diff.std,
                "n": diff.n,
            }
        )
    return pd.DataFrame(rows)


def summarize(report: pd.DataFrame) -> pd.DataFrame:
    return (
        report.groupby("method", sort=False)[["reconstruction_error", "mse", "dice"]]
        .mean()
        .reset_index()
    )
