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

"""`popularity`

Time-aware news popularity from content, recency and near real-time CTR.
"""

import dataclasses

import numpy as np

from ..core import tensor as T
from ..errors import ContractError
from .layers import Embedding, Gate, Module, TwoLayerNet

__all__ = ["PopularityBreakdown", "PopularityPredictor"]


@dataclasses.dataclass
class PopularityBreakdown(object):
    """Intermediate and final popularity scores of a batch of news"""

    content: T.Tensor
    recency: T.Tensor
    theta: T.Tensor
    combined: T.Tensor
    score: T.Tensor


class PopularityPredictor(Module):
    """Predicts ``s_p = w_c * c_t + w_p * (theta * p_c + (1 - theta) * p_r)``

    ``p_c`` comes from a dense network over the news embedding, ``p_r``
    from a dense network over the embedding of the recency bin, and the
    gate ``theta`` from both.

    Parameters
    ----------
    config : `ModelConfig`

    rng : `numpy.random.Generator`
    """

    def __init__(self, config, rng):
        super(PopularityPredictor, self).__init__("popularity")
        self.config = config
        dim = config.news_dim
        self.content_net = self.child(
            TwoLayerNet(dim, config.popularity_hidden, 1, rng, "popularity.content")
        )
        self.recency_embedding = self.child(
            Embedding(
                rng.normal(0.0, config.embedding_init_std,
                           size=(config.max_recency_hours + 1, config.recency_dim)),
                "popularity.recency_embedding",
            )
        )
        self.recency_net = self.child(
            TwoLayerNet(config.recency_dim, config.popularity_hidden, 1, rng, "popularity.recency")
        )
        self.gate = self.child(
            Gate(dim + config.recency_dim, config.gate_hidden, rng, "popularity.gate",
                 single_layer=config.single_layer_gate)
        )
        self.w_ctr = self.param("w_ctr", np.ones(1))
        self.w_pop = self.param("w_pop", np.ones(1))

    def _check_bins(self, bins):
        bins = np.asarray(bins, dtype=np.int64)
        if bins.size and (bins.min() < 0 or bins.max() > self.config.max_recency_hours):
            raise ContractError(
                "recency bins must be in [0, {0}], got [{1}, {2}]".format(
                    self.config.max_recency_hours, bins.min(), bins.max()
                )
            )
        return bins

    def content_popularity(self, news):
        """Content-based popularity, one unbounded scalar per row of (B, D)"""
        out = self.content_net(news)
        return T.reshape(out, out.shape[:-1])

    def recency_popularity(self, bins):
        """Recency-based popularity and the recency embeddings of ``bins``"""
        emb = self.recency_embedding(self._check_bins(bins))
        out = self.recency_net(emb)
        return T.reshape(out, out.shape[:-1]), emb

    def content_specific_gate(self, news, recency_emb):
        """``theta`` in (0, 1) from the news and recency embeddings"""
        axis = news.ndim - 1
        return self.gate(T.concat([news, recency_emb], axis=axis))

    def __call__(self, news, recency_bins, ctr, no_ctr=None):
        """Popularity of news embeddings (B, D) at recency bins and CTRs (B,)

        ``no_ctr`` overrides the configured switch; with it set the score is
        ``w_p * combined`` and does not depend on ``ctr``.

        Returns
        -------
        breakdown : `PopularityBreakdown`
        """
        ctr = np.asarray(ctr, dtype=np.float64)
        p_content = self.content_popularity(news)
        p_recency, recency_emb = self.recency_popularity(recency_bins)
        if self.config.no_content:
            theta = T.Tensor(np.zeros(p_recency.shape))
            combined = p_recency
        elif self.config.no_recency:
            theta = T.Tensor(np.ones(p_content.shape))
            combined = p_content
        else:
            theta = self.content_specific_gate(news, recency_emb)
            combined = T.add(T.mul(theta, p_content), T.mul(T.sub(1.0, theta), p_recency))
        score = T.mul(self.w_pop, combined)
        if no_ctr is None:
            no_ctr = self.config.no_ctr
        if not no_ctr:
            score = T.add(T.mul(self.w_ctr, T.Tensor(ctr)), score)
        return PopularityBreakdown(p_content, p_recency, theta, combined, score)

    def time_aware_popularity(self, news, recency_bin, ctr):
        """``s_p`` of one news embedding (D,) as a 0-d tensor"""
        out = self(T.reshape(news, (1,) + news.shape), np.array([recency_bin]), np.array([ctr]))
        return T.reshape(out.score, ())

    def ctr_only_popularity(self, ctr):
        """``w_c * c_t``, the popularity whose bins the user encoder embeds"""
        return self.w_ctr.values[0] * np.asarray(ctr, dtype=np.float64)
