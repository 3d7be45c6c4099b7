"""Rank-based ROC AUC."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy.stats import rankdata

from ledpose.pose.core import InvalidInputError


def auc_binary(scores: Sequence[float] | np.ndarray, labels: Sequence[bool] | np.ndarray) -> float:
    """
    Probability that a random positive outscores a random negative, ties counting 1/2.

    Computed from the Mann-Whitney U statistic over average ranks.

    Raises:
        InvalidInputError: If lengths differ, a score is not finite or only one class is present
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels, dtype=bool).ravel()
    if s.shape != y.shape:
        raise InvalidInputError(f"{s.size} scores for {y.size} labels")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("scores must be finite")
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise InvalidInputError("AUC needs both positive and negative samples")
    ranks = rankdata(s)
    u = float(ranks[y].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


__all__ = ["auc_binary"]
