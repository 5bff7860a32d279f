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

"""`news_encoder`

Knowledge-aware news encoder: word and entity self-attention, word/entity
cross-attention, attention pooling of each branch and an attentive fusion
of the two pooled vectors into the news embedding ``n``.
"""

import dataclasses

import numpy as np

from ..core import tensor as T
from .layers import AttentionPooling, Embedding, Dense, Module, MultiHeadAttention

__all__ = ["NewsBatch", "news_batch", "NewsEncoder"]


@dataclasses.dataclass
class NewsBatch(object):
    """Padded token and entity ids of a batch of articles"""

    words: np.ndarray
    word_mask: np.ndarray
    entities: np.ndarray
    entity_mask: np.ndarray

    def __len__(self):
        return self.words.shape[0]


def news_batch(articles):
    """Pad a list of `NewsArticle` into a `NewsBatch`

    Both sequence axes have length at least 1; articles without entities
    get a fully masked entity row.
    """
    n_news = len(articles)
    max_words = max([1] + [len(a.title_tokens) for a in articles])
    max_entities = max([1] + [len(a.entity_ids) for a in articles])
    words = np.zeros((n_news, max_words), dtype=np.int64)
    word_mask = np.zeros((n_news, max_words), dtype=bool)
    entities = np.zeros((n_news, max_entities), dtype=np.int64)
    entity_mask = np.zeros((n_news, max_entities), dtype=bool)
    for row, article in enumerate(articles):
        words[row, : len(article.title_tokens)] = article.title_tokens
        word_mask[row, : len(article.title_tokens)] = True
        entities[row, : len(article.entity_ids)] = article.entity_ids
        entity_mask[row, : len(article.entity_ids)] = True
    return NewsBatch(words, word_mask, entities, entity_mask)


class NewsEncoder(Module):
    """Encode articles into ``config.news_dim`` vectors

    Parameters
    ----------
    config : `ModelConfig`

    word_table : `numpy.ndarray`
        initial word embeddings, shape (V, word_dim)

    entity_table : `numpy.ndarray` or `None`
        initial entity embeddings, shape (E, entity_dim); ignored and no
        entity parameter is created when ``config.no_knowledge`` is set

    rng : `numpy.random.Generator`
    """

    def __init__(self, config, word_table, entity_table, rng):
        super(NewsEncoder, self).__init__("news")
        dim = config.news_dim
        heads, head_dim = config.num_heads, config.head_dim
        self.config = config
        self.knowledge = not config.no_knowledge
        self.word_embedding = self.child(Embedding(word_table, "news.word_embedding"))
        word_dim = word_table.shape[1]
        self.word_mhsa = self.child(
            MultiHeadAttention(word_dim, word_dim, heads, head_dim, rng, "news.word_mhsa")
        )
        self.word_pool = self.child(AttentionPooling(dim, config.query_dim, rng, "news.word_pool"))
        if self.knowledge:
            self.entity_embedding = self.child(Embedding(entity_table, "news.entity_embedding"))
            self.entity_projection = self.child(
                Dense(entity_table.shape[1], dim, rng, "news.entity_projection")
            )
            self.word_mhca = self.child(
                MultiHeadAttention(word_dim, dim, heads, head_dim, rng, "news.word_mhca")
            )
            self.entity_mhsa = self.child(
                MultiHeadAttention(dim, dim, heads, head_dim, rng, "news.entity_mhsa")
            )
            self.entity_mhca = self.child(
                MultiHeadAttention(dim, word_dim, heads, head_dim, rng, "news.entity_mhca")
            )
            self.entity_pool = self.child(
                AttentionPooling(dim, config.query_dim, rng, "news.entity_pool")
            )
            self.fusion = self.child(AttentionPooling(dim, config.query_dim, rng, "news.fusion"))

    def token_reps(self, batch, training=False, rng=None):
        """Unified word and entity representations

        Returns
        -------
        word_reps : `Tensor`
            (B, Lw, D), word self-attention plus word-to-entity cross-attention

        entity_reps : `Tensor` or `None`
            (B, Le, D), entity self-attention plus entity-to-word cross-attention
        """
        words = T.dropout(self.word_embedding(batch.words), self.config.dropout, rng, training)
        word_reps, _ = self.word_mhsa(words, words, batch.word_mask)
        if not self.knowledge:
            return word_reps, None
        entities = self.entity_projection(
            T.dropout(self.entity_embedding(batch.entities), self.config.dropout, rng, training)
        )
        # a fully masked entity row makes the cross term exactly zero
        word_cross, _ = self.word_mhca(words, entities, batch.entity_mask)
        entity_self, _ = self.entity_mhsa(entities, entities, batch.entity_mask)
        entity_cross, _ = self.entity_mhca(entities, words, batch.word_mask)
        return T.add(word_reps, word_cross), T.add(entity_self, entity_cross)

    def __call__(self, batch, training=False, rng=None):
        """News embeddings of a `NewsBatch`, shape (B, D)"""
        word_reps, entity_reps = self.token_reps(batch, training, rng)
        pooled_words, _ = self.word_pool(word_reps, batch.word_mask)
        if not self.knowledge:
            return pooled_words
        pooled_entities, _ = self.entity_pool(entity_reps, batch.entity_mask)
        n_news, dim = pooled_words.shape
        stacked = T.concat(
            [T.reshape(pooled_words, (n_news, 1, dim)), T.reshape(pooled_entities, (n_news, 1, dim))],
            axis=1,
        )
        has_entities = batch.entity_mask.any(axis=1)
        fusion_mask = np.stack([np.ones(n_news, dtype=bool), has_entities], axis=1)
        news, _ = self.fusion(stacked, fusion_mask)
        return news

    def unified_token_reps(self, article):
        """Word and entity representations of one article

        Returns
        -------
        word_reps : `Tensor`
            (Lw, D)

        entity_reps : `Tensor`
            (Le, D); empty when the article has no entities or the encoder
            has no knowledge branch
        """
        batch = news_batch([article])
        word_reps, entity_reps = self.token_reps(batch)
        n_words = len(article.title_tokens)
        word_reps = T.Tensor(word_reps.values[0, :n_words])
        if entity_reps is None or not article.entity_ids:
            return word_reps, T.Tensor(np.zeros((0, self.config.news_dim)))
        return word_reps, T.Tensor(entity_reps.values[0, : len(article.entity_ids)])

    def encode_news(self, article):
        """The news embedding ``n`` of one article, shape (D,)"""
        return T.reshape(self(news_batch([article])), (self.config.news_dim,))
