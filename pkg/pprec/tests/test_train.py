"""Unit test for pprec.train
"""

import io
import json
import os
import tempfile
import unittest
import warnings
from unittest import mock

import numpy as np
import pandas as pd

from .. import train as train_module
from ..data.corpus import Corpus, ImpressionRecord, RawNews
from ..errors import DataFormatError, NumericError
from ..model.batch import build_batch, sample_training_pairs
from ..model.checkpoint import load_checkpoint
from .fixtures import SPLITS, T0, tiny_config, tiny_corpus, tiny_setup


class TestTrain(unittest.TestCase):
    """`TestCase` for the training loop
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = tiny_config(epochs=2, batch_size=2, learning_rate=1e-3)

    def tearDown(self):
        self.tmp.cleanup()

    def run_training(self, config=None, output_dir=None, log_file=None):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return train_module.train(tiny_corpus(), config or self.config,
                                      output_dir=output_dir, log_file=log_file)

    def test_train(self):
        log = io.StringIO()
        result = self.run_training(output_dir=self.tmp.name, log_file=log)
        self.assertEqual(len(result.epoch_losses), 2)
        # three training impressions in batches of two
        self.assertEqual([len(losses) for losses in result.epoch_losses], [2, 2])
        self.assertTrue(all(np.isfinite(loss) for losses in result.epoch_losses for loss in losses))
        self.assertEqual(len(result.valid_auc), 2)
        self.assertIn(result.best_epoch, (1, 2))
        self.assertEqual(result.valid_auc[result.best_epoch - 1], max(result.valid_auc))
        self.assertEqual(result.skipped, 0)
        self.assertEqual([os.path.basename(path) for path in result.checkpoints],
                         ["epoch_1.h5", "epoch_2.h5", "best.h5"])
        self.assertIn("selected epoch", log.getvalue())
        model, _, _, attrs = load_checkpoint(result.checkpoints[-1], self.config)
        self.assertEqual(int(attrs["epoch"]), result.best_epoch)

    def test_deterministic(self):
        first = self.run_training()
        second = self.run_training()
        self.assertEqual(first.epoch_losses, second.epoch_losses)
        for one, two in zip(first.model.parameters(), second.model.parameters()):
            np.testing.assert_array_equal(one.values, two.values)
        other = self.run_training(self.config.replace(seed=1))
        self.assertNotEqual(first.epoch_losses, other.epoch_losses)

    def test_without_validation(self):
        corpus = tiny_corpus()
        corpus.splits["valid"] = []
        with self.assertWarns(UserWarning):
            result = train_module.train(corpus, self.config)
        self.assertEqual(result.valid_auc, [None, None])
        self.assertEqual(result.best_epoch, 2)

    def test_empty_training_split(self):
        corpus = tiny_corpus()
        corpus.splits["train"] = []
        self.assertRaises(DataFormatError, train_module.train, corpus, self.config)

    def test_non_finite_loss(self):
        original = train_module.PPRec.loss

        def broken(model, batch, training=True, rng=None):
            loss, breakdown = original(model, batch, training=training, rng=rng)
            loss.values = np.array(np.nan)
            return loss, breakdown

        with mock.patch.object(train_module.PPRec, "loss", broken):
            with self.assertRaises(NumericError):
                self.run_training(output_dir=self.tmp.name)
        with open(os.path.join(self.tmp.name, "nan_batch.json"), encoding="utf-8") as f:
            dump = json.load(f)
        self.assertEqual(dump["epoch"], 1)
        self.assertEqual(dump["loss"], "nan")
        self.assertTrue(dump["impressions"])


def separable_corpus(n_news=50, n_impressions=200, seed=0):
    """Every shown "hot" news is clicked and every "dull" one is not"""
    rng = np.random.default_rng(seed)
    news = {}
    for i in range(n_news):
        kind = "hot" if i % 2 == 0 else "dull"
        news["N{0}".format(i)] = RawNews("N{0}".format(i), "{0} story item{1}".format(kind, i),
                                         (), T0 + 600 * i, kind)
    hot = [news_id for news_id, item in news.items() if item.topic == "hot"]
    dull = [news_id for news_id, item in news.items() if item.topic == "dull"]
    impressions = []
    for k in range(n_impressions):
        n_hot = int(rng.integers(1, 4))
        shown = [(news_id, 1) for news_id in rng.choice(hot, size=n_hot, replace=False)]
        shown += [(news_id, 0) for news_id in rng.choice(dull, size=5 - n_hot, replace=False)]
        order = rng.permutation(len(shown))
        impressions.append(ImpressionRecord("U{0}".format(k % 10), T0 + 30000 + 60 * k,
                                            tuple((str(shown[i][0]), shown[i][1])
                                                  for i in order)))
    clicks = pd.DataFrame([(imp.user_id, news_id, imp.impression_time)
                           for imp in impressions for news_id in imp.positives],
                          columns=["user", "news", "ts"])
    # the training impressions double as the validation split
    return Corpus(news=news, clicks=clicks,
                  splits={"train": impressions, "valid": list(impressions), "test": []})


class TestTrainingSanity(unittest.TestCase):
    """`TestCase` for the loss at initialization and the ability to overfit
    """

    def test_initial_loss_near_ln2(self):
        for seed in range(10):
            _, store, model, _, _ = tiny_setup(tiny_config(seed=seed))
            rng = np.random.default_rng(seed)
            pairs = [sample_training_pairs(imp, rng) for imp in SPLITS["train"]]
            batch = build_batch(store, SPLITS["train"], pairs=pairs)
            loss, _ = model.loss(batch, training=False)
            self.assertGreaterEqual(loss.item(), 0.62, msg="seed {0}".format(seed))
            self.assertLessEqual(loss.item(), 0.76, msg="seed {0}".format(seed))

    def test_overfits_separable_fixture(self):
        config = tiny_config(epochs=30, batch_size=16, learning_rate=1e-2, max_history=10)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = train_module.train(separable_corpus(), config)
        self.assertEqual(len(result.valid_auc), 30)
        self.assertGreater(max(result.valid_auc), 0.95)
        self.assertEqual(result.valid_auc[result.best_epoch - 1], max(result.valid_auc))
