"""Unit test for pprec.baselines
"""

import unittest
import warnings

import numpy as np

from .. import baselines
from ..data.corpus import ImpressionRecord
from ..data.ctr import CtrIndex
from ..data.synthetic import GeneratorSettings, SyntheticCorpusGenerator
from ..errors import ConfigError
from ..evaluate import evaluate
from .fixtures import SPLITS, T0, tiny_config, tiny_corpus

TEST_TIME = T0 + 10000


class TestBaselines(unittest.TestCase):
    """`TestCase` for the popularity baselines
    """

    def setUp(self):
        self.index = CtrIndex(tiny_corpus().all_impressions)
        self.config = tiny_config()

    def scores(self, name, config=None):
        scorer = baselines.get_baseline(name)(self.index, config or self.config)
        return scorer.score_impressions(SPLITS["test"][:1])[0]

    def test_registry(self):
        self.assertEqual(baselines.available_baselines(),
                         ["ctr", "random", "recentpop", "viewnum"])
        self.assertIs(baselines.get_baseline("CTR"), baselines.CtrScorer)
        with self.assertRaises(ConfigError) as exc:
            baselines.get_baseline("mostpop")
        self.assertIn("viewnum", str(exc.exception))
        self.assertRaises(ConfigError, baselines.register_baseline, "ctr", baselines.CtrScorer)
        baselines.register_baseline("ctr", baselines.CtrScorer, force=True)

    def test_viewnum(self):
        np.testing.assert_array_equal(self.scores("viewnum"), [2, 3, 2, 3])
        np.testing.assert_array_equal(
            self.scores("viewnum", self.config.replace(view_count="clicks")), [1, 1, 0, 2]
        )

    def test_recentpop(self):
        np.testing.assert_array_equal(self.scores("recentpop"), [2, 3, 2, 3])
        np.testing.assert_array_equal(
            self.scores("recentpop", self.config.replace(recentpop_hours=0.5)), [1, 1, 0, 0]
        )

    def test_ctr(self):
        np.testing.assert_allclose(self.scores("ctr"), [2 / 22.0, 2 / 23.0, 1 / 22.0, 3 / 23.0])

    def test_unseen_news(self):
        snapshot = self.index.snapshot(TEST_TIME, 1.0)
        self.assertEqual(baselines.baseline_scores("viewnum", snapshot, "N9"), 0.0)
        self.assertEqual(baselines.baseline_scores("recentpop", snapshot, "N9"), 0.0)
        self.assertEqual(baselines.baseline_scores("ctr", snapshot, "N9"), 0.05)
        self.assertRaises(ConfigError, baselines.baseline_scores, "random", snapshot, "N9")

    def test_random(self):
        first = baselines.RandomScorer(config=self.config).score_impressions(SPLITS["test"])
        second = baselines.RandomScorer(config=self.config).score_impressions(SPLITS["test"])
        self.assertEqual([len(scores) for scores in first], [4, 2])
        for one, two in zip(first, second):
            np.testing.assert_array_equal(one, two)


class TestBaselineRanking(unittest.TestCase):
    """`TestCase` for baseline ranking quality on generated impressions
    """

    def test_ctr_beats_viewnum_on_popularity_driven_clicks(self):
        settings = GeneratorSettings(users=300, news=400, impressions=6000, pop_weight=1.0)
        corpus, _ = SyntheticCorpusGenerator(settings, seed=0).generate()
        index = CtrIndex(corpus.all_impressions)
        config = tiny_config()
        auc = {}
        for name in ["viewnum", "ctr"]:
            scorer = baselines.get_baseline(name)(index, config)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                auc[name] = evaluate(scorer, corpus.splits["test"], method=name).mean["auc"]
        self.assertGreater(auc["ctr"], auc["viewnum"])
        self.assertGreater(auc["ctr"], 0.55)

    def test_random_is_chance_level(self):
        rng = np.random.default_rng(11)
        impressions = []
        for i in range(10000):
            labels = np.zeros(5, dtype=int)
            labels[rng.choice(5, size=rng.integers(1, 4), replace=False)] = 1
            shown = tuple(("N{0}".format(j), int(flag)) for j, flag in enumerate(labels))
            impressions.append(ImpressionRecord("U{0}".format(i % 50), T0 + i, shown))
        scorer = baselines.RandomScorer(config=tiny_config(seed=5))
        report = evaluate(scorer, impressions, method="random")
        self.assertAlmostEqual(report.mean["auc"], 0.5, delta=0.02)
        self.assertEqual(report.excluded["auc"], 0)
