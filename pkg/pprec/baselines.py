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

"""`baselines`

Popularity baselines and their registry. Every scorer exposes
``score_impressions(impressions)`` returning one score array per impression,
the same interface `evaluate` uses for trained models.
"""

import numpy as np

from .config import ModelConfig, child_rng
from .data.ctr import compute_ctr
from .errors import ConfigError

__all__ = [
    "register_baseline",
    "get_baseline",
    "available_baselines",
    "baseline_scores",
    "BaselineScorer",
    "ViewNumScorer",
    "RecentPopScorer",
    "CtrScorer",
    "RandomScorer",
]

_BASELINES = {}


def register_baseline(name, scorer_class, force=False, usage=None):
    """Register a baseline scorer class under ``name``

    Parameters
    ----------
    name : `str`
        lower-case name used on the command line

    scorer_class : `type`
        `BaselineScorer` subclass

    force : `bool`, optional
        overwrite existing registration for ``name`` if found,
        default: `False`
    """
    if name in _BASELINES and not force:
        raise ConfigError("Baseline '{0}' has already been defined".format(name))
    _BASELINES[name] = (scorer_class, usage)


def get_baseline(name):
    """Return the scorer class registered under ``name``

    Raises
    ------
    ConfigError
        if no baseline is registered under ``name``
    """
    try:
        return _BASELINES[name.lower()][0]
    except KeyError:
        raise ConfigError(
            "No baseline named {0!r}. The available baselines are: {1}".format(
                name, ", ".join(available_baselines())
            )
        )


def available_baselines():
    return sorted(_BASELINES)


class BaselineScorer(object):
    """Scores news from windowed statistics at each impression's time

    Parameters
    ----------
    ctr_index : `CtrIndex`

    config : `ModelConfig`, optional
    """

    name = None

    def __init__(self, ctr_index, config=None):
        self.ctr_index = ctr_index
        self.config = config if config is not None else ModelConfig()

    def score(self, snapshot, news_id):
        raise NotImplementedError

    def score_impressions(self, impressions):
        out = []
        for imp in impressions:
            snapshot = self.ctr_index.snapshot(imp.impression_time, self.config.ctr_window_hours)
            out.append(np.array([self.score(snapshot, news_id) for news_id in imp.news_ids],
                                dtype=np.float64))
        return out


class ViewNumScorer(BaselineScorer):
    """Number of views before the impression"""

    name = "viewnum"

    def score(self, snapshot, news_id):
        return float(snapshot.views(news_id, count=self.config.view_count))


class RecentPopScorer(BaselineScorer):
    """Number of views in the last ``recentpop_hours``"""

    name = "recentpop"

    def score(self, snapshot, news_id):
        return float(
            snapshot.views(news_id, hours=self.config.recentpop_hours, count=self.config.view_count)
        )


class CtrScorer(BaselineScorer):
    """Smoothed near real-time CTR"""

    name = "ctr"

    def score(self, snapshot, news_id):
        return compute_ctr(
            snapshot, news_id, self.config.ctr_prior_clicks, self.config.ctr_prior_impressions
        )


class RandomScorer(BaselineScorer):
    """Seeded uniform scores, the chance level of every metric"""

    name = "random"

    def __init__(self, ctr_index=None, config=None):
        super(RandomScorer, self).__init__(ctr_index, config)
        self.rng = child_rng(self.config.seed, "random-baseline")

    def score_impressions(self, impressions):
        return [self.rng.random(len(imp.shown)) for imp in impressions]


def baseline_scores(kind, snapshot, news_id, config=None):
    """Score of ``news_id`` under a deterministic popularity baseline

    Parameters
    ----------
    kind : `str`
        ``viewnum``, ``recentpop`` or ``ctr``

    snapshot : `CtrSnapshot`

    news_id : `str`

    Returns
    -------
    score : `float`
        0 views or the CTR prior for unseen news
    """
    scorer_class = get_baseline(kind)
    if scorer_class is RandomScorer:
        raise ConfigError("the random baseline has no per-news score")
    return scorer_class(snapshot.index, config).score(snapshot, news_id)


for _scorer in (ViewNumScorer, RecentPopScorer, CtrScorer, RandomScorer):
    register_baseline(_scorer.name, _scorer)
