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

"""`user_encoder`

Popularity-aware user encoder: self-attention over clicked news followed by
a content-popularity joint attention that weighs each click by its
contextual representation and the embedding of its popularity bin.
"""

import numpy as np

from ..core import tensor as T
from ..errors import ContractError
from .layers import Embedding, Module, MultiHeadAttention, glorot

__all__ = ["UserEncoder"]


class UserEncoder(Module):
    """Encode click histories into user embeddings ``u``

    Parameters
    ----------
    config : `ModelConfig`

    rng : `numpy.random.Generator`
    """

    def __init__(self, config, rng):
        super(UserEncoder, self).__init__("user")
        dim = config.news_dim
        self.config = config
        self.use_popularity = not config.no_user_popularity
        self.news_mhsa = self.child(
            MultiHeadAttention(dim, dim, config.num_heads, config.head_dim, rng, "user.news_mhsa")
        )
        joint_dim = dim
        if self.use_popularity:
            self.popularity_embedding = self.child(
                Embedding(
                    rng.normal(0.0, config.embedding_init_std,
                               size=(config.popularity_bins, config.popularity_dim)),
                    "user.popularity_embedding",
                )
            )
            joint_dim += config.popularity_dim
        self.w_joint = self.param("w_joint", glorot(rng, joint_dim, config.query_dim))
        self.query = self.param("query", glorot(rng, config.query_dim, 1))

    def contextual_news_reps(self, history, mask=None):
        """Self-attention over clicked news embeddings (U, N, D) or (N, D)"""
        reps, _ = self.news_mhsa(history, history, mask)
        return reps

    def cpja(self, reps, popularity_bins, mask=None):
        """Content-popularity joint attention

        Parameters
        ----------
        reps : `Tensor`
            contextual news representations, (U, N, D) or (N, D)

        popularity_bins : `numpy.ndarray`
            integer bins of the clicked news, (U, N) or (N,)

        mask : `numpy.ndarray`, optional
            `True` for real clicks

        Returns
        -------
        alpha : `Tensor`
            attention weights, zero for padding

        user : `Tensor`
            ``sum_i alpha_i m_i``, zero for users without clicks
        """
        squeeze = reps.ndim == 2
        if squeeze:
            reps = T.reshape(reps, (1,) + reps.shape)
            popularity_bins = np.asarray(popularity_bins)[None, :]
            if mask is not None:
                mask = np.asarray(mask)[None, :]
        n_users, length, dim = reps.shape
        joint = reps
        if self.use_popularity:
            bins = np.asarray(popularity_bins, dtype=np.int64)
            if bins.size and (bins.min() < 0 or bins.max() >= self.config.popularity_bins):
                raise ContractError(
                    "popularity bins must be in [0, {0})".format(self.config.popularity_bins)
                )
            joint = T.concat([reps, self.popularity_embedding(bins)], axis=2)
        logits = T.matmul(T.tanh(T.matmul(joint, self.w_joint)), self.query)
        alpha = T.softmax_rows(T.reshape(logits, (n_users, length)), mask)
        user = T.reshape(T.matmul(T.reshape(alpha, (n_users, 1, length)), reps), (n_users, dim))
        if squeeze:
            return T.reshape(alpha, (length,)), T.reshape(user, (dim,))
        return alpha, user

    def __call__(self, history, mask, popularity_bins):
        """User embeddings (U, D) from padded histories (U, N, D)

        Returns
        -------
        user : `Tensor`

        alpha : `Tensor`
            (U, N)
        """
        reps = self.contextual_news_reps(history, mask)
        alpha, user = self.cpja(reps, popularity_bins, mask)
        return user, alpha

    def encode_user(self, history_embeddings, popularity_bins):
        """``u`` of one user from its clicked news embeddings (N, D)

        An empty history gives the zero vector.
        """
        if history_embeddings.shape[0] == 0:
            return T.Tensor(np.zeros(self.config.news_dim))
        user, _ = self(
            T.reshape(history_embeddings, (1,) + history_embeddings.shape),
            np.ones((1, history_embeddings.shape[0]), dtype=bool),
            np.asarray(popularity_bins, dtype=np.int64)[None, :],
        )
        return T.reshape(user, (self.config.news_dim,))
