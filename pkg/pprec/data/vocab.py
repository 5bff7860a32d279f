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

"""`vocab`

Word and entity dictionaries and article preprocessing.
"""

import os
import re
from collections import Counter

import numpy as np
import pandas as pd

from ..config import child_rng
from ..errors import DataFormatError
from .corpus import NewsArticle

__all__ = [
    "UNKNOWN_ID",
    "tokenize",
    "Vocabulary",
    "EntityVocabulary",
    "build_vocabulary",
    "build_entity_vocabulary",
    "preprocess_news",
    "preprocess_corpus",
    "read_vocabulary",
    "write_vocabulary",
    "read_entity_vocabulary",
    "write_entity_vocabulary",
]

UNKNOWN_ID = 0

TOKEN_REGEX = re.compile(r"\w+", re.UNICODE)


def tokenize(title):
    """Lowercase ``title`` and split it on whitespace and punctuation

    >>> tokenize("Stocks Rally, Again!")
    ['stocks', 'rally', 'again']
    """
    return TOKEN_REGEX.findall(title.lower())


class Vocabulary(object):
    """Word dictionary; id 0 stands for padding and unknown words

    Parameters
    ----------
    words : `list` of `str`
        retained words in id order, starting at id 1

    counts : `list` of `int`
        corpus frequency of each retained word
    """

    def __init__(self, words, counts):
        self.id_to_word = ["<unk>"] + list(words)
        self.counts = [0] + list(counts)
        self.word_to_id = dict((word, idx) for idx, word in enumerate(self.id_to_word) if idx)

    def __len__(self):
        return len(self.id_to_word)

    def __contains__(self, word):
        return word in self.word_to_id

    def lookup(self, word):
        return self.word_to_id.get(word, UNKNOWN_ID)

    def encode(self, tokens):
        return [self.lookup(token) for token in tokens]


class EntityVocabulary(object):
    """Entity dictionary with dense ids from 1, 0 being padding"""

    def __init__(self, entities):
        self.id_to_entity = ["<pad>"] + list(entities)
        self.entity_to_id = dict(
            (entity, idx) for idx, entity in enumerate(self.id_to_entity) if idx
        )

    def __len__(self):
        return len(self.id_to_entity)

    def lookup(self, entity):
        return self.entity_to_id.get(entity)


def build_vocabulary(titles, min_freq=3):
    """Build the word dictionary of a corpus of raw titles

    Words occurring fewer than ``min_freq`` times are dropped; the rest are
    numbered by decreasing frequency, ties broken alphabetically.

    Parameters
    ----------
    titles : `list` of `str`

    min_freq : `int`, optional, default: 3

    Returns
    -------
    vocab : `Vocabulary`

    Raises
    ------
    DataFormatError
        if ``titles`` is empty
    """
    titles = list(titles)
    if not titles:
        raise DataFormatError("cannot build a vocabulary from an empty corpus")
    counter = Counter()
    for title in titles:
        counter.update(tokenize(title))
    kept = sorted(
        ((word, count) for word, count in counter.items() if count >= min_freq),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return Vocabulary([word for word, _ in kept], [count for _, count in kept])


def build_entity_vocabulary(news):
    """Number every entity of ``news`` (an iterable of `RawNews`) by first appearance"""
    seen = {}
    for item in news:
        for entity in item.entities:
            if entity not in seen:
                seen[entity] = len(seen)
    return EntityVocabulary(sorted(seen, key=seen.get))


def preprocess_news(raw, vocab, entity_vocab, seed=0, max_title_len=30, max_entities=5):
    """Turn a `RawNews` into a `NewsArticle`

    The title keeps its first ``max_title_len`` tokens; an empty title becomes
    one unknown token. When an article has more than ``max_entities``
    entities a uniform sample (seeded per article) is kept in original order.

    Returns
    -------
    article : `NewsArticle`
    """
    tokens = vocab.encode(tokenize(raw.title))[:max_title_len]
    if not tokens:
        tokens = [UNKNOWN_ID]
    entities = [entity_vocab.lookup(ent) for ent in raw.entities]
    entities = [ent for ent in entities if ent is not None]
    if len(entities) > max_entities:
        rng = child_rng(seed, "entities:" + raw.news_id)
        keep = np.sort(rng.choice(len(entities), size=max_entities, replace=False))
        entities = [entities[idx] for idx in keep]
    return NewsArticle(
        news_id=raw.news_id,
        title_tokens=tuple(tokens),
        entity_ids=tuple(entities),
        publish_time=raw.publish_time,
        topic=raw.topic,
    )


def preprocess_corpus(news, config, vocab=None, entity_vocab=None, vocab_news=None):
    """Preprocess every article of ``news`` (`dict` of `RawNews`)

    Dictionaries not given are built from the articles in ``vocab_news``
    (default: all of them); words and entities of the other articles map
    to the unknown word or are dropped.

    Returns
    -------
    articles : `dict`
        news id to `NewsArticle`

    vocab : `Vocabulary`

    entity_vocab : `EntityVocabulary`
    """
    source = list(news.values())
    if vocab_news is not None:
        source = [item for news_id, item in news.items() if news_id in vocab_news]
    if vocab is None:
        vocab = build_vocabulary([item.title for item in source], config.min_word_freq)
    if entity_vocab is None:
        entity_vocab = build_entity_vocabulary(source)
    articles = dict(
        (
            news_id,
            preprocess_news(
                item, vocab, entity_vocab, config.seed, config.max_title_len, config.max_entities
            ),
        )
        for news_id, item in news.items()
    )
    return articles, vocab, entity_vocab


def write_vocabulary(path, vocab):
    """Write ``vocab.tsv`` with columns id, word, count"""
    frame = pd.DataFrame(
        {
            "id": np.arange(1, len(vocab), dtype=np.int64),
            "word": vocab.id_to_word[1:],
            "count": vocab.counts[1:],
        }
    )
    frame.to_csv(path, sep="\t", index=False, lineterminator="\n")


def read_vocabulary(path):
    if not os.path.isfile(path):
        raise DataFormatError("{0} does not exist".format(path))
    frame = pd.read_csv(path, sep="\t", dtype={"word": str}, keep_default_na=False)
    if list(frame["id"]) != list(range(1, len(frame) + 1)):
        raise DataFormatError("{0}: word ids must be dense from 1".format(path))
    return Vocabulary(frame["word"].tolist(), frame["count"].tolist())


def write_entity_vocabulary(path, entity_vocab):
    frame = pd.DataFrame(
        {
            "id": np.arange(1, len(entity_vocab), dtype=np.int64),
            "entity": entity_vocab.id_to_entity[1:],
        }
    )
    frame.to_csv(path, sep="\t", index=False, lineterminator="\n")


def read_entity_vocabulary(path):
    if not os.path.isfile(path):
        raise DataFormatError("{0} does not exist".format(path))
    frame = pd.read_csv(path, sep="\t", dtype={"entity": str}, keep_default_na=False)
    return EntityVocabulary(frame["entity"].tolist())
