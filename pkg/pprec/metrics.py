# -*- coding: utf-8 -*-
# Copyright (C) the pprec developers (2024)
#
# This file is part of pprec.
#
# pprec is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# pprec is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with pprec.  If not, see <http://www.gnu.org/licenses/>.

"""`metrics`

Per-impression ranking and diversity metrics.
"""

import dataclasses

import numpy as np
from sklearn.metrics import roc_auc_score

from .errors import ContractError

__all__ = [
    "ImpressionEvaluation",
    "ranking",
    "auc",
    "mrr",
    "ndcg_at_k",
    "ilad_at_k",
    "new_topic_ratio_at_k",
    "evaluate_impression",
]


@dataclasses.dataclass
class ImpressionEvaluation(object):
    """Metrics of one impression; `None` where the metric is undefined"""

    auc: float
    mrr: float
    ndcg5: float
    ndcg10: float
    ranked: np.ndarray


def ranking(scores):
    """Item indices by descending score, ties kept in input order"""
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


def _check(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ContractError(
            "scores and labels must be 1-d of equal length, got {0} and {1}".format(
                scores.shape, labels.shape
            )
        )
    return scores, labels


def auc(scores, labels):
    """Fraction of (positive, negative) pairs ranked correctly, ties count 1/2

    Raises
    ------
    ContractError
        if the impression has only one class
    """
    scores, labels = _check(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0 or n_pos == len(labels):
        raise ContractError("AUC needs at least one positive and one negative")
    return float(roc_auc_score(labels, scores))


def mrr(scores, labels):
    """Mean reciprocal rank of the positives (ranks are 1-based)"""
    scores, labels = _check(scores, labels)
    if not labels.any():
        raise ContractError("MRR needs at least one positive")
    ranked_labels = labels[ranking(scores)]
    ranks = np.flatnonzero(ranked_labels) + 1
    return float(np.mean(1.0 / ranks))


def ndcg_at_k(scores, labels, k):
    """nDCG@k with binary relevance

    The ideal DCG sums ``1 / log2(1 + i)`` over ``i = 1 .. min(P, k)`` for
    ``P`` positives, so a perfect ranking scores 1.
    """
    scores, labels = _check(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise ContractError("nDCG needs at least one positive")
    top = labels[ranking(scores)][:k]
    dcg = np.sum(top / np.log2(np.arange(2, len(top) + 2)))
    ideal = np.sum(1.0 / np.log2(np.arange(2, min(n_pos, k) + 2)))
    return float(dcg / ideal)


def ilad_at_k(embeddings):
    """Intra-list average cosine distance of the top-K news embeddings

    Parameters
    ----------
    embeddings : `numpy.ndarray`
        (K, D) embeddings of the recommended news in rank order

    Returns
    -------
    ilad : `float`
        mean of ``1 - cos`` over all pairs, in [0, 2]; 0 when K < 2

    excluded : `int`
        pairs skipped because one of the two embeddings has zero norm
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.shape[0] < 2:
        return 0.0, 0
    norms = np.linalg.norm(embeddings, axis=1)
    valid = norms > 0
    upper = np.triu_indices(embeddings.shape[0], k=1)
    pair_valid = valid[upper[0]] & valid[upper[1]]
    excluded = int((~pair_valid).sum())
    if not pair_valid.any():
        return 0.0, excluded
    unit = np.zeros_like(embeddings)
    unit[valid] = embeddings[valid] / norms[valid, None]
    cosine = (unit @ unit.T)[upper][pair_valid]
    return float(np.mean(1.0 - cosine)), excluded


def new_topic_ratio_at_k(recommended, clicked, history_topics, topic_of, k):
    """Share of novel topics among the clicked top-K recommendations

    Parameters
    ----------
    recommended : `list` of `str`
        news ids in rank order; only the first ``k`` count

    clicked : `set`
        news ids clicked in this impression

    history_topics : `set`
        topics of the user's earlier clicks

    topic_of : `dict`
        news id to topic

    k : `int`
        normaliser, also when fewer than ``k`` news were recommended

    Returns
    -------
    ratio : `float`
    """
    novel = set(
        topic_of[news_id] for news_id in recommended[:k] if news_id in clicked
    ) - set(history_topics)
    return len(novel) / float(k)


def evaluate_impression(scores, labels):
    """AUC, MRR, nDCG@5 and nDCG@10 of one impression

    Metrics that need a class the impression lacks are `None`.
    """
    scores, labels = _check(scores, labels)
    n_pos = int(labels.sum())
    has_pos = n_pos > 0
    both = has_pos and n_pos < len(labels)
    return ImpressionEvaluation(
        auc=auc(scores, labels) if both else None,
        mrr=mrr(scores, labels) if has_pos else None,
        ndcg5=ndcg_at_k(scores, labels, 5) if has_pos else None,
        ndcg10=ndcg_at_k(scores, labels, 10) if has_pos else None,
        ranked=ranking(scores),
    )
