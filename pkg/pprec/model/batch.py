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

"""`batch`

Feature lookup and batch assembly: histories, CTRs, recency and popularity
bins for impressions, and in-impression negative sampling.
"""

import dataclasses

import numpy as np

from ..data.corpus import ClickLog
from ..data.ctr import CtrIndex, quantize_popularity, quantize_recency
from ..errors import DataFormatError
from .news_encoder import news_batch

__all__ = ["FeatureStore", "Batch", "build_batch", "sample_training_pairs"]


class FeatureStore(object):
    """Everything needed to featurize impressions at their own time

    Parameters
    ----------
    articles : `dict`
        news id to `NewsArticle`

    ctr_index : `CtrIndex`

    click_log : `ClickLog`

    config : `ModelConfig`
    """

    def __init__(self, articles, ctr_index, click_log, config):
        self.articles = articles
        self.news_ids = list(articles)
        self.index = dict((news_id, idx) for idx, news_id in enumerate(self.news_ids))
        self.ctr_index = ctr_index
        self.click_log = click_log
        self.config = config

    @classmethod
    def from_corpus(cls, corpus, articles, config):
        return cls(articles, CtrIndex(corpus.all_impressions), ClickLog(corpus.clicks), config)

    def position(self, news_id):
        try:
            return self.index[news_id]
        except KeyError:
            raise DataFormatError("news {0!r} is not in the news file".format(news_id))

    def ctr(self, news_id, when):
        config = self.config
        return self.ctr_index.ctr(
            news_id, when, config.ctr_window_hours, config.ctr_prior_clicks,
            config.ctr_prior_impressions
        )

    def recency(self, news_id, when):
        article = self.articles[news_id]
        return quantize_recency(article.publish_time, when, self.config.max_recency_hours)

    def history(self, user_id, when):
        return self.click_log.history(user_id, when, self.config.max_history)

    def history_bins(self, history, when):
        """Popularity bins of the clicked news, from the CTR at click time
        (or at ``when`` for ``history_popularity_time = impression-time``)"""
        at_click = self.config.history_popularity_time == "click-time"
        ctrs = [
            self.ctr(news_id, click_time if at_click else when)
            for news_id, click_time in zip(history.clicked_news, history.click_times)
        ]
        return quantize_popularity(np.asarray(ctrs, dtype=np.float64), self.config.popularity_bins)


@dataclasses.dataclass
class Batch(object):
    """A batch of impressions ready for scoring

    ``item_*`` arrays have one entry per scored (impression, news) pair;
    ``item_row`` is the impression (user) row. News indices point into
    ``news`` when it is set, otherwise into the store's full news list.
    """

    impressions: list
    news_ids: list
    news: object
    history_index: np.ndarray
    history_mask: np.ndarray
    history_bins: np.ndarray
    item_row: np.ndarray
    item_news: np.ndarray
    item_ctr: np.ndarray
    item_recency: np.ndarray
    item_offsets: np.ndarray
    pairs: np.ndarray = None

    @property
    def history_lengths(self):
        return self.history_mask.sum(axis=1)

    def split_items(self, values):
        """Split per-item ``values`` into one array per impression"""
        return np.split(np.asarray(values), self.item_offsets[1:-1])


def sample_training_pairs(impression, rng):
    """One uniformly drawn in-impression negative per positive

    Returns
    -------
    pairs : `list` of `tuple`
        ``(positive_id, negative_id)``; empty when the impression lacks
        positives or negatives
    """
    positives = impression.positives
    negatives = impression.negatives
    if not positives or not negatives:
        return []
    picks = rng.integers(len(negatives), size=len(positives))
    return [(pos, negatives[pick]) for pos, pick in zip(positives, picks)]


def build_batch(store, impressions, pairs=None, local=True):
    """Assemble a `Batch`

    Parameters
    ----------
    store : `FeatureStore`

    impressions : `list` of `ImpressionRecord`

    pairs : `list` of `list`, optional
        per impression training pairs; only the paired news are scored
        when given, every shown news otherwise

    local : `bool`, optional, default: `True`
        gather the distinct news of the batch into ``Batch.news`` so the
        news encoder runs on them; with `False` indices refer to the
        store's full news list (precomputed embeddings)
    """
    config = store.config
    local_index = {}
    news_ids = []

    def _news(news_id):
        if not local:
            return store.position(news_id)
        if news_id not in local_index:
            store.position(news_id)
            local_index[news_id] = len(news_ids)
            news_ids.append(news_id)
        return local_index[news_id]

    histories = [store.history(imp.user_id, imp.impression_time) for imp in impressions]
    width = max([1] + [len(hist) for hist in histories])
    n_rows = len(impressions)
    history_index = np.zeros((n_rows, width), dtype=np.int64)
    history_mask = np.zeros((n_rows, width), dtype=bool)
    history_bins = np.zeros((n_rows, width), dtype=np.int64)

    item_row, item_news, item_ctr, item_recency, offsets = [], [], [], [], [0]
    pair_index = []
    for row, (imp, hist) in enumerate(zip(impressions, histories)):
        for col, news_id in enumerate(hist.clicked_news):
            history_index[row, col] = _news(news_id)
        history_mask[row, : len(hist)] = True
        if len(hist):
            history_bins[row, : len(hist)] = store.history_bins(hist, imp.impression_time)

        if pairs is None:
            scored = imp.news_ids
        else:
            scored = []
            for pos, neg in pairs[row]:
                for news_id in (pos, neg):
                    if news_id not in scored:
                        scored.append(news_id)
        start = len(item_row)
        slot = dict((news_id, start + k) for k, news_id in enumerate(scored))
        for news_id in scored:
            item_row.append(row)
            item_news.append(_news(news_id))
            item_ctr.append(store.ctr(news_id, imp.impression_time))
            item_recency.append(store.recency(news_id, imp.impression_time))
        if pairs is not None:
            pair_index.extend((slot[pos], slot[neg]) for pos, neg in pairs[row])
        offsets.append(len(item_row))

    return Batch(
        impressions=list(impressions),
        news_ids=news_ids if local else store.news_ids,
        news=news_batch([store.articles[news_id] for news_id in news_ids]) if local else None,
        history_index=history_index,
        history_mask=history_mask,
        history_bins=history_bins,
        item_row=np.asarray(item_row, dtype=np.int64),
        item_news=np.asarray(item_news, dtype=np.int64),
        item_ctr=np.asarray(item_ctr, dtype=np.float64),
        item_recency=np.asarray(item_recency, dtype=np.int64),
        item_offsets=np.asarray(offsets, dtype=np.int64),
        pairs=np.asarray(pair_index, dtype=np.int64).reshape(-1, 2) if pairs is not None else None,
    )
