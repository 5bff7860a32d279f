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

"""`ranker`

The popularity-aware ranking model: a personalized gate mixes the
user/news matching score with the time-aware popularity score, trained
with the BPR pairwise loss.
"""

import dataclasses

import numpy as np

from ..config import child_rng
from ..core import tensor as T
from ..data.corpus import ImpressionRecord
from ..errors import ContractError
from .batch import build_batch
from .layers import Gate, Module
from .news_encoder import NewsEncoder, news_batch
from .popularity import PopularityPredictor
from .user_encoder import UserEncoder

__all__ = [
    "RankingBreakdown",
    "PPRec",
    "matching_score",
    "combine_scores",
    "bpr_loss",
]


@dataclasses.dataclass
class RankingBreakdown(object):
    """Scores of a set of candidates; ``score = (1 - eta) s_m + eta s_p``"""

    matching: object
    popularity: object
    eta: object
    score: object


def matching_score(user, news):
    """Dot product of user and news embeddings along the last axis

    Raises
    ------
    ContractError
        if the two embeddings differ in width
    """
    if user.shape[-1] != news.shape[-1]:
        raise ContractError(
            "matching score needs equal widths, got {0} and {1}".format(user.shape, news.shape)
        )
    return T.sum_(T.mul(user, news), axis=-1)


def combine_scores(matching, popularity, eta, config):
    """Personalized aggregation of matching and popularity scores

    ``no_popularity_score`` returns the matching score and
    ``no_matching_score`` the popularity score unchanged.
    """
    if config.no_popularity_score:
        return matching
    if config.no_matching_score:
        return popularity
    return T.add(T.mul(T.sub(1.0, eta), matching), T.mul(eta, popularity))


def bpr_loss(positive, negative):
    """Mean of ``-log sigmoid(positive - negative)`` over the pairs

    Parameters
    ----------
    positive : `Tensor`
        scores of the clicked news, shape (P,)

    negative : `Tensor`
        scores of the sampled non-clicked news, shape (P,)

    Returns
    -------
    loss : `Tensor`
        0-d

    Raises
    ------
    ContractError
        if there are no pairs
    """
    positive = positive if isinstance(positive, T.Tensor) else T.Tensor(positive)
    negative = negative if isinstance(negative, T.Tensor) else T.Tensor(negative)
    if positive.size == 0:
        raise ContractError("bpr_loss needs at least one pair")
    margin = T.sub(positive, negative)
    return T.scale(T.sum_(T.log_sigmoid(margin)), -1.0 / positive.size)


class PPRec(Module):
    """News encoder, popularity predictor, user encoder and gate in one model

    Parameters
    ----------
    config : `ModelConfig`

    word_table : `numpy.ndarray`
        initial word embeddings (V, word_dim)

    entity_table : `numpy.ndarray` or `None`
        initial entity embeddings (E, entity_dim)

    rng : `numpy.random.Generator`, optional
        initializer; defaults to the ``init`` child of ``config.seed``
    """

    def __init__(self, config, word_table, entity_table=None, rng=None):
        super(PPRec, self).__init__("pprec")
        if rng is None:
            rng = child_rng(config.seed, "init")
        if entity_table is None and not config.no_knowledge:
            raise ContractError("an entity table is needed unless no_knowledge is set")
        self.config = config
        self.news_encoder = self.child(NewsEncoder(config, word_table, entity_table, rng))
        self.popularity = self.child(PopularityPredictor(config, rng))
        self.user_encoder = self.child(UserEncoder(config, rng))
        self.user_gate = self.child(Gate(config.news_dim, config.gate_hidden, rng, "user_gate"))

    def personalized_gate(self, user):
        """``eta`` in (0, 1) for user embeddings (U, D) or (D,)"""
        return self.user_gate(user)

    def encode_all(self, store, chunk=256):
        """News embeddings of every article of ``store``, shape (M, D)"""
        blocks = []
        ids = store.news_ids
        for start in range(0, len(ids), chunk):
            batch = news_batch([store.articles[news_id] for news_id in ids[start:start + chunk]])
            blocks.append(self.news_encoder(batch).values)
        if not blocks:
            return np.zeros((0, self.config.news_dim))
        return np.concatenate(blocks, axis=0)

    def score_batch(self, batch, training=False, rng=None, news_vectors=None):
        """Score every item of a `Batch`

        Parameters
        ----------
        batch : `Batch`

        training : `bool`, optional
            enables dropout

        rng : `numpy.random.Generator`, optional
            dropout generator

        news_vectors : `numpy.ndarray`, optional
            precomputed news embeddings for batches built with
            ``local=False``

        Returns
        -------
        breakdown : `RankingBreakdown`
            tensors of shape (K,)
        """
        if batch.news is not None:
            news = self.news_encoder(batch.news, training=training, rng=rng)
        elif news_vectors is not None:
            news = T.Tensor(news_vectors)
        else:
            raise ContractError("batch carries no news and no news vectors were given")
        history = T.take(news, batch.history_index)
        user, _ = self.user_encoder(history, batch.history_mask, batch.history_bins)
        # users without clicks are exactly zero
        eta = self.personalized_gate(user)
        item_user = T.take(user, batch.item_row)
        item_news = T.take(news, batch.item_news)
        s_m = matching_score(item_user, item_news)
        pop = self.popularity(item_news, batch.item_recency, batch.item_ctr)
        item_eta = T.take(eta, batch.item_row)
        score = combine_scores(s_m, pop.score, item_eta, self.config)
        return RankingBreakdown(s_m, pop.score, item_eta, score)

    def loss(self, batch, training=True, rng=None):
        """BPR loss over ``batch.pairs``"""
        breakdown = self.score_batch(batch, training=training, rng=rng)
        positive = T.take(breakdown.score, batch.pairs[:, 0])
        negative = T.take(breakdown.score, batch.pairs[:, 1])
        return bpr_loss(positive, negative), breakdown

    def score_impressions(self, store, impressions, batch_size=64, news_vectors=None,
                          breakdown=False):
        """Ranking scores of every shown news, one array per impression

        Parameters
        ----------
        store : `FeatureStore`

        impressions : `list` of `ImpressionRecord`

        batch_size : `int`, optional

        news_vectors : `numpy.ndarray`, optional
            output of `encode_all`, computed when not given

        breakdown : `bool`, optional
            return per-impression `RankingBreakdown` of arrays instead

        Returns
        -------
        scores : `list` of `numpy.ndarray`
        """
        if news_vectors is None:
            news_vectors = self.encode_all(store)
        out = []
        for start in range(0, len(impressions), batch_size):
            batch = build_batch(store, impressions[start:start + batch_size], local=False)
            result = self.score_batch(batch, news_vectors=news_vectors)
            if breakdown:
                parts = [batch.split_items(getattr(result, name).values)
                         for name in ("matching", "popularity", "eta", "score")]
                out.extend(RankingBreakdown(*values) for values in zip(*parts))
            else:
                out.extend(batch.split_items(result.score.values))
        return out

    def ranking_score(self, store, user_id, news_id, reference_time):
        """`RankingBreakdown` of floats for one user and candidate"""
        impression = ImpressionRecord(user_id, int(reference_time), ((news_id, 0),))
        batch = build_batch(store, [impression])
        result = self.score_batch(batch)
        return RankingBreakdown(
            float(result.matching.values[0]),
            float(result.popularity.values[0]),
            float(result.eta.values[0]),
            float(result.score.values[0]),
        )

    def popularity_table(self, store, reference_time, news_ids=None, ctr=None, no_ctr=None):
        """Per-news ``c_t``, ``p_c``, ``p_r``, ``theta`` and ``s_p`` at ``reference_time``

        Parameters
        ----------
        store : `FeatureStore`

        reference_time : `int`

        news_ids : `list` of `str`, optional
            default: every news of ``store``

        ctr : `float` or `numpy.ndarray`, optional
            CTR to use instead of the windowed one, e.g. for what-if tables

        no_ctr : `bool`, optional
            drop the CTR term from ``s_p``; default: the model configuration
        """
        news_ids = store.news_ids if news_ids is None else list(news_ids)
        vectors = self.encode_all(store)
        rows = np.array([store.position(news_id) for news_id in news_ids], dtype=np.int64)
        if ctr is None:
            ctr = np.array([store.ctr(news_id, reference_time) for news_id in news_ids])
        else:
            ctr = np.broadcast_to(np.asarray(ctr, dtype=np.float64), (len(news_ids),)).copy()
            if ctr.size and (ctr.min() < 0.0 or ctr.max() > 1.0):
                raise ContractError("CTR must be in [0, 1], got [{0}, {1}]".format(
                    ctr.min(), ctr.max()))
        recency = np.array([store.recency(news_id, reference_time) for news_id in news_ids],
                           dtype=np.int64)
        pop = self.popularity(T.Tensor(vectors[rows]), recency, ctr, no_ctr=no_ctr)
        return {
            "news": news_ids,
            "ctr": ctr,
            "content": pop.content.values,
            "recency": pop.recency.values,
            "theta": pop.theta.values,
            "score": pop.score.values,
        }
