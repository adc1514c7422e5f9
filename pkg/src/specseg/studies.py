"""Synthetic experiments tying band limits, CE discrepancy and IoU drops together."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .iou import mean_iou
from .segmap import LabelMap, block_annotation, one_hot, random_blob_map
from .spectral_ce import ce_decompose, discrepancy_R

__all__ = ["CorrelationPoint", "band_limited_predictor_study", "confident_logits", "spearman"]


def confident_logits(label_map: LabelMap, alpha: float) -> np.ndarray:
    """Synthetic predictor logits ``alpha * one_hot(map)``."""
    return alpha * one_hot(label_map)


@dataclass(frozen=True)
class CorrelationPoint:
    seed: int
    nu: int
    iou_drop: float
    R: float


def band_limited_predictor_study(seeds, size: int = 64, num_classes: int = 4,
                                 nu_list=(2, 4, 8, 16), alpha: float = 2.0,
                                 smoothness: int = 4, method: str = "vote"):
    """IoU drop of band-limited predictors against ``R`` at the same band limit.

    For every seed a smooth random map is drawn.  The predictor at band
    limit ``nu`` is the block-wise annotation of the map; its IoU drop is
    ``1 - mIoU(predictor, map)``.  ``R(nu)`` comes from decomposing the CE of
    confident logits ``alpha * one_hot(map)`` against the map itself.
    """
    points = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        label_map = random_blob_map((size, size), num_classes, rng, smoothness)
        dec = ce_decompose(confident_logits(label_map, alpha), one_hot(label_map))
        for nu in nu_list:
            pred = block_annotation(label_map, nu, method=method)
            drop = 1.0 - mean_iou(pred, label_map)
            points.append(CorrelationPoint(int(seed), int(nu), drop, discrepancy_R(dec, nu)))
    return points


def spearman(points) -> float:
    drops = [p.iou_drop for p in points]
    rs = [p.R for p in points]
    return float(stats.spearmanr(drops, rs).statistic)
