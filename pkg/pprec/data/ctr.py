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

"""`ctr`

Windowed click/impression statistics and the recency and popularity
quantizers.
"""

import numpy as np

__all__ = [
    "CtrIndex",
    "CtrSnapshot",
    "compute_ctr",
    "quantize_recency",
    "quantize_popularity",
]

SECONDS_PER_HOUR = 3600.0


class CtrIndex(object):
    """Per-news shown/click events sorted by time

    Counting over any half-open window ``[start, end)`` is two binary
    searches into the cumulative arrays of one news.

    Parameters
    ----------
    impressions : `list` of `ImpressionRecord`
        every impression of the corpus; clicks are read from the labels
    """

    def __init__(self, impressions):
        times = {}
        clicks = {}
        for imp in impressions:
            for news_id, clicked in imp.shown:
                times.setdefault(news_id, []).append(imp.impression_time)
                clicks.setdefault(news_id, []).append(clicked)
        self._events = {}
        for news_id, news_times in times.items():
            news_times = np.asarray(news_times, dtype=np.int64)
            order = np.argsort(news_times, kind="stable")
            news_clicks = np.asarray(clicks[news_id], dtype=np.int64)[order]
            self._events[news_id] = (
                news_times[order],
                np.concatenate([[0], np.cumsum(news_clicks)]),
            )

    def __contains__(self, news_id):
        return news_id in self._events

    def counts(self, news_id, start, end):
        """``(clicks, impressions)`` of ``news_id`` in ``[start, end)``"""
        if news_id not in self._events:
            return 0, 0
        times, cum_clicks = self._events[news_id]
        lo = int(np.searchsorted(times, start, side="left"))
        hi = int(np.searchsorted(times, end, side="left"))
        return int(cum_clicks[hi] - cum_clicks[lo]), hi - lo

    def snapshot(self, reference_time, window_hours=1.0):
        return CtrSnapshot(self, reference_time, window_hours)

    def ctr(self, news_id, reference_time, window_hours=1.0, prior_clicks=1.0,
            prior_impressions=20.0):
        """Smoothed near real-time CTR of ``news_id`` at ``reference_time``"""
        return compute_ctr(
            self.snapshot(reference_time, window_hours), news_id, prior_clicks, prior_impressions
        )


class CtrSnapshot(object):
    """Counts of every news as seen at ``reference_time``

    Window counts only use events in
    ``[reference_time - window_hours, reference_time)``; lifetime views
    only use events before ``reference_time``.
    """

    def __init__(self, index, reference_time, window_hours=1.0):
        self.index = index
        self.reference_time = reference_time
        self.window_hours = window_hours

    def _start(self, hours):
        return self.reference_time - int(round(hours * SECONDS_PER_HOUR))

    def clicks(self, news_id):
        return self.index.counts(news_id, self._start(self.window_hours), self.reference_time)[0]

    def impressions(self, news_id):
        return self.index.counts(news_id, self._start(self.window_hours), self.reference_time)[1]

    def views(self, news_id, hours=None, count="impressions"):
        """View count before the reference time

        Parameters
        ----------
        hours : `float`, optional
            restrict to the most recent ``hours``; lifetime when `None`

        count : `str`, optional, default: ``"impressions"``
            ``"impressions"`` counts shown events, ``"clicks"`` counts clicks
        """
        start = np.iinfo(np.int64).min if hours is None else self._start(hours)
        clicks, shown = self.index.counts(news_id, start, self.reference_time)
        return clicks if count == "clicks" else shown


def compute_ctr(snapshot, news_id, prior_clicks=1.0, prior_impressions=20.0):
    """Smoothed CTR ``(clicks + 1) / (impressions + 20)`` in the window

    News absent from the window get the prior ``1 / 20 = 0.05``.

    Parameters
    ----------
    snapshot : `CtrSnapshot`

    news_id : `str`

    Returns
    -------
    c_t : `float`
        in (0, 1)
    """
    clicks = snapshot.clicks(news_id)
    impressions = snapshot.impressions(news_id)
    return (clicks + prior_clicks) / (impressions + prior_impressions)


def quantize_recency(publish_time, reference_time, max_hours=720):
    """Whole hours between publication and ``reference_time``

    Negative ages clamp to 0 and ages past ``max_hours`` clamp to
    ``max_hours``; works elementwise on arrays.
    """
    delta = np.asarray(reference_time, dtype=np.float64) - np.asarray(
        publish_time, dtype=np.float64
    )
    bins = np.clip(np.floor(delta / SECONDS_PER_HOUR), 0, max_hours).astype(np.int64)
    return int(bins) if bins.ndim == 0 else bins


def quantize_popularity(value, bins=200):
    """Uniform bin of a popularity in [0, 1]; 1.0 lands in the last bin"""
    clamped = np.clip(np.asarray(value, dtype=np.float64), 0.0, 1.0)
    out = np.minimum(np.floor(clamped * bins), bins - 1).astype(np.int64)
    return int(out) if out.ndim == 0 else out
