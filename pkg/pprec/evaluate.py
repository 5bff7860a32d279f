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

"""`evaluate`

Offline evaluation of scorers (trained models or baselines) over impression
splits, cold-start buckets and diversity at K, plus the report writers.
"""

import dataclasses
import json
import os
import warnings

import numpy as np
import pandas as pd
from schwimmbad import MultiPool, SerialPool

from .errors import DataFormatError
from .metrics import evaluate_impression, ilad_at_k, new_topic_ratio_at_k, ranking

__all__ = [
    "METRICS",
    "COLD_START_BUCKETS",
    "DIVERSITY_KS",
    "EvalReport",
    "ModelScorer",
    "impression_metrics",
    "summarize",
    "evaluate",
    "cold_start_buckets",
    "diversity_at_k",
    "aggregate_runs",
    "report_frame",
    "write_report",
    "write_cold_start",
    "write_diversity",
]

METRICS = ["auc", "mrr", "ndcg5", "ndcg10"]

COLD_START_BUCKETS = (0, 1, 3, 5)

DIVERSITY_KS = tuple(range(1, 11))


@dataclasses.dataclass
class EvalReport(object):
    """Mean and standard deviation of every metric over one or more runs

    ``excluded`` counts the impressions each metric could not be computed
    on (single-class impressions for AUC, no positives for the others).
    """

    method: str
    mean: dict
    std: dict
    excluded: dict
    impressions: int
    runs: int = 1

    def to_json(self):
        return {
            "method": self.method,
            "mean": self.mean,
            "std": self.std,
            "excluded": self.excluded,
            "impressions": self.impressions,
            "runs": self.runs,
        }


class ModelScorer(object):
    """Adapts a trained `PPRec` to the baseline scorer interface

    News embeddings are computed once and reused for every impression.
    """

    def __init__(self, model, store, batch_size=64):
        self.model = model
        self.store = store
        self.batch_size = batch_size
        self._news_vectors = None

    @property
    def news_vectors(self):
        if self._news_vectors is None:
            self._news_vectors = self.model.encode_all(self.store)
        return self._news_vectors

    def score_impressions(self, impressions):
        return self.model.score_impressions(
            self.store, impressions, batch_size=self.batch_size, news_vectors=self.news_vectors
        )


def _evaluate_chunk(chunk):
    rows = []
    for scores, labels in chunk:
        result = evaluate_impression(scores, labels)
        rows.append([np.nan if getattr(result, name) is None else getattr(result, name)
                     for name in METRICS])
    return np.asarray(rows, dtype=np.float64).reshape(-1, len(METRICS))


def impression_metrics(scores, impressions, nproc=1, pool=None, chunk_size=500):
    """Per-impression metrics as an (N, 4) array, NaN where undefined

    Parameters
    ----------
    scores : `list` of `numpy.ndarray`
        one score array per impression

    impressions : `list` of `ImpressionRecord`

    nproc : `int`, optional
        worker processes when no ``pool`` is given; 1 evaluates serially

    pool : `schwimmbad` pool, optional
        any object with a ``map`` method

    chunk_size : `int`, optional
        impressions handed to a worker at once
    """
    items = [(score, imp.labels) for score, imp in zip(scores, impressions)]
    chunks = [items[start:start + chunk_size] for start in range(0, len(items), chunk_size)]
    if pool is None:
        pool_class = SerialPool if nproc <= 1 else MultiPool
        kwargs = {} if nproc <= 1 else {"processes": nproc}
        with pool_class(**kwargs) as pool:
            output = list(pool.map(_evaluate_chunk, chunks))
    else:
        output = list(pool.map(_evaluate_chunk, chunks))
    if not output:
        return np.zeros((0, len(METRICS)))
    # chunks come back in submission order so the reduction is deterministic
    return np.vstack(output)


def summarize(method, table):
    """`EvalReport` of a single run from the per-impression ``table``"""
    mean, excluded = {}, {}
    for col, name in enumerate(METRICS):
        values = table[:, col]
        valid = ~np.isnan(values)
        excluded[name] = int((~valid).sum())
        mean[name] = float(values[valid].mean()) if valid.any() else None
    if excluded["auc"]:
        warnings.warn(
            "{0}: {1} of {2} impressions have a single class and are excluded "
            "from AUC".format(method, excluded["auc"], len(table))
        )
    return EvalReport(
        method=method,
        mean=mean,
        std=dict((name, 0.0) for name in METRICS),
        excluded=excluded,
        impressions=int(len(table)),
    )


def evaluate(scorer, impressions, method="pprec", nproc=1, pool=None, scores=None):
    """Evaluate ``scorer`` on a split

    Parameters
    ----------
    scorer : `ModelScorer` or `BaselineScorer`
        anything with ``score_impressions(impressions)``

    impressions : `list` of `ImpressionRecord`

    method : `str`, optional
        row label of the report

    nproc : `int`, optional
        processes for the per-impression metrics

    scores : `list` of `numpy.ndarray`, optional
        scores already computed by ``scorer``

    Returns
    -------
    report : `EvalReport`

    Raises
    ------
    DataFormatError
        if ``impressions`` is empty
    """
    if not impressions:
        raise DataFormatError("cannot evaluate an empty split")
    if scores is None:
        scores = scorer.score_impressions(impressions)
    return summarize(method, impression_metrics(scores, impressions, nproc=nproc, pool=pool))


def cold_start_buckets(scores, impressions, store, buckets=COLD_START_BUCKETS, method="pprec",
                       nproc=1):
    """Reports for users with exactly K historical clicks

    Parameters
    ----------
    scores : `list` of `numpy.ndarray`

    impressions : `list` of `ImpressionRecord`

    store : `FeatureStore`
        source of the user histories

    buckets : `tuple` of `int`, optional

    Returns
    -------
    reports : `dict`
        bucket to `EvalReport`, `None` for a bucket without impressions
    """
    lengths = np.array(
        [len(store.history(imp.user_id, imp.impression_time)) for imp in impressions],
        dtype=np.int64,
    )
    reports = {}
    for k in buckets:
        members = np.flatnonzero(lengths == k)
        if members.size == 0:
            reports[k] = None
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            reports[k] = evaluate(
                None,
                [impressions[i] for i in members],
                method=method,
                nproc=nproc,
                scores=[scores[i] for i in members],
            )
    return reports


def diversity_at_k(scores, impressions, store, news_vectors, ks=DIVERSITY_KS):
    """ILAD@K and new topic ratio@K averaged over impressions

    Parameters
    ----------
    scores : `list` of `numpy.ndarray`

    impressions : `list` of `ImpressionRecord`

    store : `FeatureStore`
        user histories and article topics

    news_vectors : `numpy.ndarray`
        content embeddings aligned with ``store.news_ids``

    ks : `tuple` of `int`, optional

    Returns
    -------
    diversity : `pandas.DataFrame`
        columns ``k``, ``ilad``, ``new_topic_ratio`` and ``excluded_pairs``
    """
    if not impressions:
        raise DataFormatError("cannot evaluate an empty split")
    topic_of = dict((news_id, article.topic) for news_id, article in store.articles.items())
    ilad = np.zeros(len(ks))
    ntr = np.zeros(len(ks))
    excluded = np.zeros(len(ks), dtype=np.int64)
    for score, imp in zip(scores, impressions):
        ids = imp.news_ids
        recommended = [ids[i] for i in ranking(score)]
        rows = np.array([store.position(news_id) for news_id in recommended], dtype=np.int64)
        clicked = set(imp.positives)
        history = store.history(imp.user_id, imp.impression_time)
        history_topics = set(topic_of[news_id] for news_id in history.clicked_news)
        for idx, k in enumerate(ks):
            value, skipped = ilad_at_k(news_vectors[rows[:k]])
            ilad[idx] += value
            excluded[idx] += skipped
            ntr[idx] += new_topic_ratio_at_k(recommended, clicked, history_topics, topic_of, k)
    if excluded.any():
        warnings.warn("{0} embedding pairs with zero norm were excluded from ILAD".format(
            int(excluded.sum())))
    return pd.DataFrame(
        {
            "k": list(ks),
            "ilad": ilad / len(impressions),
            "new_topic_ratio": ntr / len(impressions),
            "excluded_pairs": excluded,
        }
    )


def aggregate_runs(reports):
    """Combine single-run reports of one method into mean and population std"""
    if not reports:
        raise DataFormatError("no runs to aggregate")
    mean, std = {}, {}
    for name in METRICS:
        values = [report.mean[name] for report in reports if report.mean[name] is not None]
        mean[name] = float(np.mean(values)) if values else None
        std[name] = float(np.std(values)) if values else None
    return EvalReport(
        method=reports[0].method,
        mean=mean,
        std=std,
        excluded=dict((name, max(report.excluded[name] for report in reports))
                      for name in METRICS),
        impressions=reports[0].impressions,
        runs=len(reports),
    )


def _percent(mean, std):
    if mean is None:
        return "nan"
    return "{0:.2f}±{1:.2f}".format(100.0 * mean, 100.0 * std)


def report_frame(reports):
    """Rows are methods, columns are metrics as percent ``mean±std``"""
    return pd.DataFrame(
        [[_percent(report.mean[name], report.std[name]) for name in METRICS]
         for report in reports],
        index=pd.Index([report.method for report in reports], name="method"),
        columns=METRICS,
    )


def write_report(reports, output_dir):
    """Write ``report.tsv`` and ``report.json``; returns both paths"""
    os.makedirs(output_dir, exist_ok=True)
    tsv = os.path.join(output_dir, "report.tsv")
    path_json = os.path.join(output_dir, "report.json")
    report_frame(reports).to_csv(tsv, sep="\t", lineterminator="\n", encoding="utf-8")
    with open(path_json, "w", encoding="utf-8", newline="\n") as f:
        json.dump([report.to_json() for report in reports], f, indent=2, sort_keys=True)
        f.write("\n")
    return tsv, path_json


def write_cold_start(buckets_by_method, path):
    """Write one row per (method, bucket); absent buckets are marked as such

    Parameters
    ----------
    buckets_by_method : `dict`
        method to the output of `cold_start_buckets` (or its aggregate)

    path : `str`
    """
    rows = []
    for method, buckets in buckets_by_method.items():
        for k, report in buckets.items():
            if report is None:
                rows.append([method, k, 0] + ["absent"] * len(METRICS))
            else:
                rows.append([method, k, report.impressions]
                            + [_percent(report.mean[name], report.std[name]) for name in METRICS])
    frame = pd.DataFrame(rows, columns=["method", "history", "impressions"] + METRICS)
    frame.to_csv(path, sep="\t", index=False, lineterminator="\n", encoding="utf-8")
    return path


def write_diversity(frames_by_method, path):
    """Write the diversity tables of every method into one TSV"""
    frames = []
    for method, frame in frames_by_method.items():
        frame = frame.copy()
        frame.insert(0, "method", method)
        frames.append(frame)
    pd.concat(frames, ignore_index=True).to_csv(
        path, sep="\t", index=False, lineterminator="\n", encoding="utf-8", float_format="%.6f"
    )
    return path
