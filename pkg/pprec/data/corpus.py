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

"""`corpus`

Records of the news corpus and the line-oriented files they live in:

* ``news.jsonl``: ``{"id", "title", "entities", "publish_ts", "topic"}``
* ``{train,valid,test}/impressions.jsonl``: ``{"user", "ts", "items"}``
* ``clicks.tsv``: ``user <TAB> newsId <TAB> ts``
"""

import dataclasses
import json
import os

import numpy as np
import pandas as pd

from ..errors import DataFormatError

__all__ = [
    "RawNews",
    "NewsArticle",
    "ImpressionRecord",
    "UserHistory",
    "ClickLog",
    "Corpus",
    "SPLITS",
    "build_user_history",
    "split_by_time",
    "read_news",
    "write_news",
    "read_impressions",
    "write_impressions",
    "read_clicks",
    "write_clicks",
    "load_corpus",
    "write_corpus",
]

SPLITS = ["train", "valid", "test"]

CLICK_COLUMNS = ["user", "news", "ts"]


@dataclasses.dataclass(frozen=True)
class RawNews(object):
    """A news article as read from ``news.jsonl``"""

    news_id: str
    title: str
    entities: tuple
    publish_time: int
    topic: str

    def to_json(self):
        return {
            "id": self.news_id,
            "title": self.title,
            "entities": list(self.entities),
            "publish_ts": self.publish_time,
            "topic": self.topic,
        }


@dataclasses.dataclass(frozen=True)
class NewsArticle(object):
    """A preprocessed news article, the unit being ranked

    ``title_tokens`` holds at most ``max_title_len`` word ids (0 is the
    unknown word) and ``entity_ids`` at most ``max_entities`` entity ids.
    """

    news_id: str
    title_tokens: tuple
    entity_ids: tuple
    publish_time: int
    topic: str


@dataclasses.dataclass(frozen=True)
class ImpressionRecord(object):
    """One display of candidate news to a user with per-item click labels"""

    user_id: str
    impression_time: int
    shown: tuple

    @property
    def news_ids(self):
        return [news_id for news_id, _ in self.shown]

    @property
    def labels(self):
        return np.array([clicked for _, clicked in self.shown], dtype=np.int64)

    @property
    def positives(self):
        return [news_id for news_id, clicked in self.shown if clicked]

    @property
    def negatives(self):
        return [news_id for news_id, clicked in self.shown if not clicked]

    def to_json(self):
        return {
            "user": self.user_id,
            "ts": self.impression_time,
            "items": [[news_id, int(clicked)] for news_id, clicked in self.shown],
        }


@dataclasses.dataclass(frozen=True)
class UserHistory(object):
    """The most recent clicks of a user before an impression, most recent last"""

    user_id: str
    clicked_news: tuple
    click_times: tuple

    def __len__(self):
        return len(self.clicked_news)


class ClickLog(object):
    """Per-user, time-sorted click events

    Parameters
    ----------
    clicks : `pandas.DataFrame`
        columns ``user``, ``news``, ``ts``
    """

    def __init__(self, clicks):
        self.frame = clicks.reset_index(drop=True)
        ordered = self.frame.sort_values("ts", kind="mergesort")
        self._users = {}
        for user, group in ordered.groupby("user", sort=False):
            self._users[user] = (
                group["ts"].to_numpy(dtype=np.int64),
                group["news"].to_numpy(dtype=object),
            )

    def __len__(self):
        return len(self.frame)

    def history(self, user_id, impression_time, max_history=50):
        """The at most ``max_history`` clicks strictly before ``impression_time``"""
        if user_id not in self._users:
            return UserHistory(user_id, (), ())
        times, news = self._users[user_id]
        end = int(np.searchsorted(times, impression_time, side="left"))
        start = max(0, end - max_history)
        return UserHistory(
            user_id,
            tuple(news[start:end].tolist()),
            tuple(int(t) for t in times[start:end]),
        )


def build_user_history(click_log, user_id, impression_time, max_history=50):
    """Build the `UserHistory` of ``user_id`` at ``impression_time``

    Parameters
    ----------
    click_log : `ClickLog` or `pandas.DataFrame`
        the full click log

    user_id : `str`

    impression_time : `int`
        epoch seconds; clicks at exactly this time are excluded

    max_history : `int`, optional, default: 50

    Returns
    -------
    history : `UserHistory`
        empty for unknown users
    """
    if not isinstance(click_log, ClickLog):
        click_log = ClickLog(click_log)
    return click_log.history(user_id, impression_time, max_history=max_history)


@dataclasses.dataclass
class Corpus(object):
    """News, the click log and impressions split by time"""

    news: dict
    clicks: pd.DataFrame
    splits: dict

    def __post_init__(self):
        self.click_log = ClickLog(self.clicks)

    @property
    def all_impressions(self):
        return [imp for name in SPLITS for imp in self.splits.get(name, [])]

    def training_news_ids(self):
        """News shown in the training split or clicked no later than its last impression"""
        train = self.splits.get("train", [])
        ids = set(news_id for imp in train for news_id in imp.news_ids)
        if train:
            last = max(imp.impression_time for imp in train)
            ids.update(self.clicks.loc[self.clicks["ts"] <= last, "news"].tolist())
        return ids


def split_by_time(impressions, fractions=(0.7, 0.1, 0.2)):
    """Split impressions into train/valid/test by impression time

    Impressions sharing a timestamp always land in the same split, so
    ``max(train) < min(valid) < min(test)`` holds whenever all three are
    non-empty.

    Parameters
    ----------
    impressions : `list` of `ImpressionRecord`

    fractions : `tuple` of `float`
        approximate share of each split, must sum to 1

    Returns
    -------
    splits : `dict`
        ``{"train": [...], "valid": [...], "test": [...]}``, each time-sorted
    """
    if len(fractions) != 3 or abs(sum(fractions) - 1.0) > 1e-9 or min(fractions) < 0:
        raise ValueError("fractions must be three non-negative numbers summing to 1")
    ordered = sorted(impressions, key=lambda imp: imp.impression_time)
    if not ordered:
        return dict((name, []) for name in SPLITS)
    times = np.array([imp.impression_time for imp in ordered], dtype=np.int64)
    n_tot = len(ordered)
    idx_valid = min(n_tot - 1, int(round(fractions[0] * n_tot)))
    idx_test = min(n_tot - 1, int(round((fractions[0] + fractions[1]) * n_tot)))
    t_valid = times[idx_valid]
    t_test = times[idx_test]
    return {
        "train": [imp for imp in ordered if imp.impression_time < t_valid],
        "valid": [imp for imp in ordered if t_valid <= imp.impression_time < t_test],
        "test": [imp for imp in ordered if imp.impression_time >= t_test],
    }


# -- reading and writing ------------------------------------------------------


def _read_jsonl(path):
    if not os.path.isfile(path):
        raise DataFormatError("{0} does not exist".format(path))
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except ValueError as exc:
                raise DataFormatError("{0}:{1}: invalid JSON ({2})".format(path, lineno, exc))


def _write_jsonl(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            f.write("\n")


def read_news(path):
    """Read ``news.jsonl`` into `RawNews` records, file order kept"""
    news = []
    for lineno, obj in _read_jsonl(path):
        try:
            item = RawNews(
                news_id=str(obj["id"]),
                title=str(obj["title"]),
                entities=tuple(str(ent) for ent in obj.get("entities", [])),
                publish_time=int(obj["publish_ts"]),
                topic=str(obj.get("topic", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError("{0}:{1}: bad news record ({2})".format(path, lineno, exc))
        if item.publish_time <= 0:
            raise DataFormatError(
                "{0}:{1}: publish_ts must be positive, got {2}".format(
                    path, lineno, item.publish_time
                )
            )
        news.append(item)
    return news


def write_news(path, news):
    _write_jsonl(path, [item.to_json() for item in news])


def read_impressions(path):
    """Read an ``impressions.jsonl`` file into `ImpressionRecord` records"""
    impressions = []
    for lineno, obj in _read_jsonl(path):
        try:
            shown = tuple((str(news_id), int(clicked)) for news_id, clicked in obj["items"])
            record = ImpressionRecord(str(obj["user"]), int(obj["ts"]), shown)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(
                "{0}:{1}: bad impression record ({2})".format(path, lineno, exc)
            )
        if not shown:
            raise DataFormatError("{0}:{1}: impression shows no news".format(path, lineno))
        if any(clicked not in (0, 1) for _, clicked in shown):
            raise DataFormatError("{0}:{1}: click labels must be 0 or 1".format(path, lineno))
        impressions.append(record)
    return impressions


def write_impressions(path, impressions):
    _write_jsonl(path, [imp.to_json() for imp in impressions])


def read_clicks(path):
    """Read ``clicks.tsv`` into a `pandas.DataFrame` with columns user, news, ts"""
    if not os.path.isfile(path):
        raise DataFormatError("{0} does not exist".format(path))
    if os.path.getsize(path) == 0:
        return pd.DataFrame(
            {"user": pd.Series([], dtype=str), "news": pd.Series([], dtype=str),
             "ts": pd.Series([], dtype=np.int64)}
        )
    try:
        clicks = pd.read_csv(
            path,
            sep="\t",
            header=None,
            names=CLICK_COLUMNS,
            dtype={"user": str, "news": str, "ts": np.int64},
            keep_default_na=False,
        )
    except (ValueError, pd.errors.ParserError) as exc:
        raise DataFormatError("{0}: bad click log ({1})".format(path, exc))
    return clicks


def write_clicks(path, clicks):
    clicks[CLICK_COLUMNS].to_csv(path, sep="\t", header=False, index=False, lineterminator="\n")


def load_corpus(data_dir):
    """Load every corpus file under ``data_dir``

    Returns
    -------
    corpus : `Corpus`
    """
    if not os.path.isdir(data_dir):
        raise DataFormatError("corpus directory {0} does not exist".format(data_dir))
    news = read_news(os.path.join(data_dir, "news.jsonl"))
    clicks = read_clicks(os.path.join(data_dir, "clicks.tsv"))
    splits = {}
    for name in SPLITS:
        path = os.path.join(data_dir, name, "impressions.jsonl")
        splits[name] = read_impressions(path) if os.path.isfile(path) else []
    return Corpus(news=dict((item.news_id, item) for item in news), clicks=clicks, splits=splits)


def write_corpus(data_dir, corpus):
    """Write ``corpus`` under ``data_dir``; returns the written paths"""
    os.makedirs(data_dir, exist_ok=True)
    paths = [os.path.join(data_dir, "news.jsonl"), os.path.join(data_dir, "clicks.tsv")]
    write_news(paths[0], list(corpus.news.values()))
    write_clicks(paths[1], corpus.clicks)
    for name in SPLITS:
        os.makedirs(os.path.join(data_dir, name), exist_ok=True)
        path = os.path.join(data_dir, name, "impressions.jsonl")
        write_impressions(path, corpus.splits.get(name, []))
        paths.append(path)
    return paths
