import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from src.errors import DataError
from src.models import BoolArray, FloatArray, MatchResult, SpcaModel
from src.spca import reconstruction_from, transform

logger = logging.getLogger(__name__)


def reconstruction_error(X_test: FloatArray, model: SpcaModel) -> float:
    """Frobenius norm of the centred test data minus its model reconstruction."""
    if X_test.ndim != 2 or X_test.shape[1] != model.n_features:
        raise DataError(
            f"test data has shape {X_test.shape}, model expects {model.n_features} features"
        )
    centred = X_test - model.means
    approx = reconstruction_from(model, transform(model, X_test))
    return float(np.linalg.norm(centred - approx))


def _unit_columns(V: FloatArray) -> FloatArray:
    norms = np.linalg.norm(V, axis=0)
    return V / np.where(norms > 0, norms, 1.0)


def match_components(V_est: FloatArray, V_ref: FloatArray) -> MatchResult:
    """Assignment maximising the summed absolute cosine between matched columns."""
    if V_est.shape[0] != V_ref.shape[0]:
        raise DataError(
            f"feature counts differ: {V_est.shape[0]} estimated vs {V_ref.shape[0]} reference"
        )
    complete = V_est.shape[1] == V_ref.shape[1]
    if not complete:
        logger.warning(
            "matching %d estimated against %d reference components",
            V_est.shape[1],
            V_ref.shape[1],
        )

    cosine = _unit_columns(V_est).T @ _unit_columns(V_ref)
    est_index, ref_index = linear_sum_assignment(-np.abs(cosine))
    matched = cosine[est_index, ref_index]
    return MatchResult(
        est_index=est_index.astype(np.int64),
        ref_index=ref_index.astype(np.int64),
        signs=np.where(matched < 0, -1.0, 1.0),
        score=float(np.abs(matched).sum()),
        complete=complete,
    )


def loading_mse(V_est: FloatArray, V_true: FloatArray) -> float:
    """Mean squared difference of unit-normalised, matched and sign-aligned loadings.

    Reference components without an estimated partner are compared with zero.
    """
    match = match_components(V_est, V_true)
    est = _unit_columns(V_est)
    ref = _unit_columns(V_true)
    aligned = np.zeros_like(ref)
    aligned[:, match.ref_index] = est[:, match.est_index] * match.signs
    return float(np.mean((aligned - ref) ** 2))


def dice_index(v_a: FloatArray, v_b: FloatArray) -> float:
    if v_a.shape != v_b.shape:
        raise DataError(f"loading shapes differ: {v_a.shape} vs {v_b.shape}")
    support_a = v_a != 0
    support_b = v_b != 0
    total = int(support_a.sum() + support_b.sum())
    if total == 0:
        return 1.0
    return 2.0 * int(np.sum(support_a & support_b)) / total


@dataclass(frozen=True, eq=False)
class StabilityResult:
    per_component: FloatArray
    overall: float
    pairwise: FloatArray


def _align_to_largest(V_list: Sequence[FloatArray]) -> tuple[list[FloatArray], list[BoolArray]]:
    """Every fit placed in the component slots of the fit with most components.

    Slots a fit has no partner for stay zero and are flagged absent.
    """
    reference = max(V_list, key=lambda V: V.shape[1])
    k = reference.shape[1]
    aligned: list[FloatArray] = []
    present: list[BoolArray] = []
    for V in V_list:
        slots = np.zeros_like(reference)
        mask = np.zeros(k, dtype=bool)
        if V is reference:
            slots[:] = V
            mask[:] = True
        elif V.shape[1]:
            match = match_components(V, reference)
            slots[:, match.ref_index] = V[:, match.est_index]
            mask[match.ref_index] = True
        aligned.append(slots)
        present.append(mask)
    return aligned, present


def stability_dice(V_list: Sequence[FloatArray]) -> StabilityResult:
    """Mean pairwise Dice of matched loadings across folds or datasets.

    Components are reported in the order of the fit with most components. A
    component missing from either fit of a pair scores 0, so truncated or
    empty fits never look stable.
    """
    if len(V_list) < 2:
        raise DataError(f"stability needs at least 2 folds, got {len(V_list)}")

    aligned, present = _align_to_largest(V_list)
    k = aligned[0].shape[1]
    n_pairs = len(aligned) * (len(aligned) - 1) // 2
    if k == 0:
        logger.warning("no fit has any component; stability is 0")
        return StabilityResult(per_component=np.zeros(0), overall=0.0, pairwise=np.zeros(n_pairs))

    sums = np.zeros(k)
    pairwise: list[float] = []
    for a, b in itertools.combinations(range(len(aligned)), 2):
        cols_a = np.flatnonzero(present[a])
        cols_b = np.flatnonzero(present[b])
        scores = np.zeros(k)
        if cols_a.size and cols_b.size:
            match = match_components(aligned[a][:, cols_a], aligned[b][:, cols_b])
            for e, r in zip(match.est_index, match.ref_index):
                scores[cols_a[e]] = dice_index(aligned[a][:, cols_a[e]], aligned[b][:, cols_b[r]])
        sums += scores
        pairwise.append(float(scores.mean()))

    per_component = sums / n_pairs
    return StabilityResult(
        per_component=per_component,
        overall=float(per_component.mean()),
        pairwise=np.array(pairwise),
    )


@dataclass(frozen=True)
class PairedDifference:
    mean: float
    std: float
    n: int


def paired_differences(a: Sequence[float], b: Sequence[float]) -> PairedDifference:
    """Mean and spread of a - b over paired datasets or folds."""
    diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    n = diff.size
    if n == 0:
        raise DataError("paired differences need at least one pair")
    mean = float(diff.mean())
    std = float(diff.std(ddof=1)) if n > 1 else 0.0
    return PairedDifference(mean=mean, std=std, n=n)
