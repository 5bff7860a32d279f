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

"""`synthetic`

Synthetic news corpora with controllable interest and popularity effects.

Every user has latent topic preferences and every article a topic and a
latent popularity that decays with age. An item shown at time ``t`` is
clicked with probability proportional to

    (1 - pop_weight) * topic_affinity + pop_weight * popularity(t)
"""

import dataclasses

import numpy as np
import pandas as pd

from ..config import child_rng
from ..errors import ConfigError
from .corpus import Corpus, ImpressionRecord, RawNews, split_by_time

__all__ = ["GeneratorSettings", "SyntheticCorpusGenerator", "generate_synthetic_corpus"]

SECONDS_PER_HOUR = 3600
SECONDS_PER_DAY = 86400


@dataclasses.dataclass(frozen=True)
class GeneratorSettings(object):
    """Knobs of the synthetic corpus"""

    users: int = 500
    news: int = 1000
    topics: int = 12
    vocab_size: int = 2000
    impressions: int = 10000
    pop_weight: float = 0.5
    days: int = 21
    start_time: int = 1600000000
    impression_size: int = 10
    candidate_hours: float = 72.0
    decay_hours: float = 36.0
    click_scale: float = 0.35
    title_words: tuple = (6, 14)
    entities_per_topic: int = 30
    max_news_entities: int = 8
    topic_concentration: float = 0.3
    activity_exponent: float = 1.1
    split: tuple = (0.7, 0.1, 0.2)

    def error_check(self):
        for flag in ["users", "news", "topics", "vocab_size", "impressions", "days",
                     "entities_per_topic"]:
            if getattr(self, flag) < 1:
                raise ConfigError(
                    "{0} needs to be a positive integer (you set it to {1})".format(
                        flag, getattr(self, flag)
                    )
                )
        if self.impression_size < 2:
            raise ConfigError("impression_size needs at least 2 candidates")
        if self.news < self.impression_size:
            raise ConfigError(
                "news ({0}) must be at least impression_size ({1})".format(
                    self.news, self.impression_size
                )
            )
        if self.vocab_size < self.topics:
            raise ConfigError("vocab_size must be at least the number of topics")
        if not 0.0 <= self.pop_weight <= 1.0:
            raise ConfigError(
                "pop_weight needs to be in [0, 1] (you set it to {0})".format(self.pop_weight)
            )
        if not 0.0 < self.click_scale <= 1.0:
            raise ConfigError("click_scale needs to be in (0, 1]")
        if self.title_words[0] < 1 or self.title_words[1] < self.title_words[0]:
            raise ConfigError("title_words must be (min, max) with 1 <= min <= max")
        if self.start_time <= 2 * SECONDS_PER_DAY:
            raise ConfigError("start_time must leave room for news published before it")
        if self.decay_hours <= 0 or self.candidate_hours <= 0:
            raise ConfigError("decay_hours and candidate_hours need to be positive")
        return self


class SyntheticCorpusGenerator(object):
    """Draws a `Corpus` from `GeneratorSettings`

    Parameters
    ----------
    settings : `GeneratorSettings`

    seed : `int`
    """

    def __init__(self, settings, seed=0):
        self.settings = settings.error_check()
        self.seed = seed

    def sample_vocabulary(self, rng):
        """Word lists per topic plus shared filler words"""
        n_topic_words = max(1, int(0.7 * self.settings.vocab_size) // self.settings.topics)
        n_common = max(1, self.settings.vocab_size - n_topic_words * self.settings.topics)
        topic_words = [
            ["t{0}w{1}".format(topic, idx) for idx in range(n_topic_words)]
            for topic in range(self.settings.topics)
        ]
        common_words = ["c{0}".format(idx) for idx in range(n_common)]
        return topic_words, common_words

    def sample_news(self, rng):
        """Articles, their latent peak popularity and publish times"""
        settings = self.settings
        topic_words, common_words = self.sample_vocabulary(rng)
        # heavier topics get more articles
        topic_share = rng.dirichlet(np.full(settings.topics, 2.0))
        topics = rng.choice(settings.topics, size=settings.news, p=topic_share)
        first = settings.start_time - 2 * SECONDS_PER_DAY
        last = settings.start_time + settings.days * SECONDS_PER_DAY
        publish = np.sort(rng.integers(first, last, size=settings.news))
        peak = rng.beta(0.6, 1.8, size=settings.news)

        news = []
        for idx in range(settings.news):
            topic = int(topics[idx])
            n_words = int(rng.integers(settings.title_words[0], settings.title_words[1] + 1))
            from_topic = rng.random(n_words) < 0.7
            words = [
                topic_words[topic][rng.integers(len(topic_words[topic]))]
                if use_topic
                else common_words[rng.integers(len(common_words))]
                for use_topic in from_topic
            ]
            n_entities = int(rng.integers(0, settings.max_news_entities + 1))
            entity_idx = rng.choice(
                settings.entities_per_topic,
                size=min(n_entities, settings.entities_per_topic),
                replace=False,
            )
            news.append(
                RawNews(
                    news_id="N{0}".format(idx + 1),
                    title=" ".join(words),
                    entities=tuple("Q{0}x{1}".format(topic, int(ent)) for ent in entity_idx),
                    publish_time=int(publish[idx]),
                    topic="topic{0}".format(topic),
                )
            )
        return news, topics, publish, peak

    def sample_users(self, rng):
        """Topic preferences and Zipf-like activity weights"""
        settings = self.settings
        prefs = rng.dirichlet(np.full(settings.topics, settings.topic_concentration),
                              size=settings.users)
        affinity = prefs / prefs.max(axis=1, keepdims=True)
        ranks = rng.permutation(settings.users) + 1
        activity = 1.0 / ranks ** settings.activity_exponent
        return affinity, activity / activity.sum()

    def popularity(self, peak, publish, when):
        """Latent popularity of articles at time ``when``"""
        age = (when - publish) / float(SECONDS_PER_HOUR)
        return np.where(age >= 0, peak * np.exp(-np.clip(age, 0, None) / self.settings.decay_hours),
                        0.0)

    def candidate_pool(self, publish, when):
        """Indices of articles published at or before ``when``

        Articles of the last ``candidate_hours``, topped up with older ones to
        ``impression_size``. Articles published after ``when`` never join.
        """
        settings = self.settings
        hi = int(np.searchsorted(publish, when, side="right"))
        lo = int(np.searchsorted(publish, when - settings.candidate_hours * SECONDS_PER_HOUR,
                                 side="left"))
        lo = min(lo, max(0, hi - settings.impression_size))
        return np.arange(lo, hi)

    def sample_impressions(self, rng, news, topics, publish, peak):
        settings = self.settings
        affinity, activity = self.sample_users(rng)
        times = np.sort(
            rng.integers(settings.start_time, settings.start_time + settings.days * SECONDS_PER_DAY,
                         size=settings.impressions)
        )
        # no impression before two articles are out
        times = np.maximum(times, publish[1])
        users = rng.choice(settings.users, size=settings.impressions, p=activity)

        impressions = []
        for when, user in zip(times, users):
            pool = self.candidate_pool(publish, when)
            shown = rng.choice(pool, size=min(settings.impression_size, len(pool)), replace=False)
            mix = ((1.0 - settings.pop_weight) * affinity[user, topics[shown]]
                   + settings.pop_weight * self.popularity(peak[shown], publish[shown], when))
            clicked = rng.random(len(shown)) < settings.click_scale * mix
            if not clicked.any():
                weights = mix / mix.sum() if mix.sum() > 0 else None
                clicked[rng.choice(len(shown), p=weights)] = True
            impressions.append(
                ImpressionRecord(
                    user_id="U{0}".format(int(user) + 1),
                    impression_time=int(when),
                    shown=tuple(
                        (news[idx].news_id, int(flag)) for idx, flag in zip(shown, clicked)
                    ),
                )
            )
        return impressions

    def generate(self):
        """Draw the corpus

        Returns
        -------
        corpus : `Corpus`
            news, the click log of every impression click and the impressions
            split by time

        latent : `pandas.DataFrame`
            per-news topic index and peak popularity
        """
        rng = child_rng(self.seed, "synthetic")
        news, topics, publish, peak = self.sample_news(rng)
        impressions = self.sample_impressions(rng, news, topics, publish, peak)
        clicks = pd.DataFrame(
            [
                (imp.user_id, news_id, imp.impression_time)
                for imp in impressions
                for news_id, clicked in imp.shown
                if clicked
            ],
            columns=["user", "news", "ts"],
        )
        clicks["ts"] = clicks["ts"].astype(np.int64)
        corpus = Corpus(
            news=dict((item.news_id, item) for item in news),
            clicks=clicks,
            splits=split_by_time(impressions, self.settings.split),
        )
        latent = pd.DataFrame(
            {"news": [item.news_id for item in news], "topic": topics, "peak": peak}
        )
        return corpus, latent


def generate_synthetic_corpus(settings, seed=0):
    """Generate a synthetic corpus

    Parameters
    ----------
    settings : `GeneratorSettings`

    seed : `int`

    Returns
    -------
    news : `list` of `RawNews`

    impressions : `list` of `ImpressionRecord`
        time-sorted

    clicks : `pandas.DataFrame`
        click log with columns user, news, ts
    """
    corpus, _ = SyntheticCorpusGenerator(settings, seed).generate()
    return list(corpus.news.values()), corpus.all_impressions, corpus.clicks
