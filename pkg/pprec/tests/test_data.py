"""Unit test for pprec.data
"""

import os
import tempfile
import unittest
import warnings

import numpy as np
import pandas as pd

from ..config import ModelConfig, child_rng
from ..data import corpus as dc
from ..data import ctr as dctr
from ..data import embeddings as demb
from ..data import vocab as dv
from ..errors import DataFormatError

T0 = 1600000000
HOUR = 3600

LONG_TITLE = " ".join("w{0}".format(idx) for idx in range(45))
CTR_FLOOR = 0.05
CTR_81_OF_1000 = 0.081
POPULARITY_BIN_0081 = 16


def impression(user, when, *items):
    return dc.ImpressionRecord(user, when, tuple(items))


class TestCorpus(unittest.TestCase):
    """`TestCase` for records, click histories and splits
    """

    def test_history_keeps_latest_fifty(self):
        clicks = pd.DataFrame(
            {"user": ["U1"] * 70, "news": ["N{0}".format(i) for i in range(70)],
             "ts": T0 + np.arange(70)}
        )
        history = dc.build_user_history(clicks, "U1", T0 + 1000)
        self.assertEqual(len(history), 50)
        self.assertEqual(history.clicked_news[0], "N20")
        self.assertEqual(history.clicked_news[-1], "N69")
        self.assertEqual(len(dc.build_user_history(clicks, "U9", T0 + 1000)), 0)

    def test_history_is_strictly_before(self):
        clicks = pd.DataFrame({"user": ["U1", "U1"], "news": ["N1", "N2"], "ts": [T0, T0 + 10]})
        history = dc.ClickLog(clicks).history("U1", T0 + 10)
        self.assertEqual(history.clicked_news, ("N1",))
        self.assertEqual(history.click_times, (T0,))

    def test_impression_views(self):
        imp = impression("U1", T0, ("N1", 0), ("N2", 1), ("N3", 1))
        self.assertEqual(imp.news_ids, ["N1", "N2", "N3"])
        self.assertEqual(imp.positives, ["N2", "N3"])
        self.assertEqual(imp.negatives, ["N1"])
        np.testing.assert_array_equal(imp.labels, [0, 1, 1])

    def test_split_by_time(self):
        imps = [impression("U1", T0 + i // 2, ("N1", 1)) for i in range(20)]
        splits = dc.split_by_time(imps, (0.6, 0.2, 0.2))
        self.assertEqual(sum(len(v) for v in splits.values()), 20)
        self.assertLess(max(i.impression_time for i in splits["train"]),
                        min(i.impression_time for i in splits["valid"]))
        self.assertLess(max(i.impression_time for i in splits["valid"]),
                        min(i.impression_time for i in splits["test"]))
        self.assertRaises(ValueError, dc.split_by_time, imps, (0.5, 0.5))

    def test_corpus_round_trip(self):
        news = {
            "N1": dc.RawNews("N1", "Ünïcode title", ("Q1",), T0, "world"),
            "N2": dc.RawNews("N2", "Plain", (), T0 + 5, "sports"),
        }
        clicks = pd.DataFrame({"user": ["U1"], "news": ["N1"], "ts": [T0 + 20]})
        splits = {
            "train": [impression("U1", T0 + 20, ("N1", 1), ("N2", 0))],
            "valid": [],
            "test": [impression("U2", T0 + 40, ("N2", 1))],
        }
        corpus = dc.Corpus(news=news, clicks=clicks, splits=splits)
        with tempfile.TemporaryDirectory() as tmp:
            paths = dc.write_corpus(tmp, corpus)
            self.assertEqual(len(paths), 5)
            loaded = dc.load_corpus(tmp)
            with open(paths[0], "rb") as f:
                self.assertNotIn(b"\r\n", f.read())
        self.assertEqual(loaded.news, news)
        self.assertEqual(loaded.splits, splits)
        pd.testing.assert_frame_equal(loaded.clicks, clicks, check_dtype=False)

    def test_malformed_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "news.jsonl")
            with open(path, "w") as f:
                f.write('{"id": "N1", "title": "a", "publish_ts": 5}\n{"id": "N2"}\n')
            with self.assertRaises(DataFormatError) as ctx:
                dc.read_news(path)
            self.assertIn(":2:", str(ctx.exception))
            path = os.path.join(tmp, "impressions.jsonl")
            with open(path, "w") as f:
                f.write('{"user": "U1", "ts": 5, "items": [["N1", 2]]}\n')
            self.assertRaises(DataFormatError, dc.read_impressions, path)
            self.assertRaises(DataFormatError, dc.load_corpus, os.path.join(tmp, "missing"))


class TestVocabulary(unittest.TestCase):
    """`TestCase` for tokenization and dictionaries
    """

    def test_tokenize(self):
        self.assertEqual(dv.tokenize("Stocks Rally, Again!"), ["stocks", "rally", "again"])

    def test_frequency_filter(self):
        titles = ["the cat", "the dog", "the zyx", "the cat", "the cat dog dog"]
        vocab = dv.build_vocabulary(titles, min_freq=3)
        self.assertEqual(vocab.id_to_word, ["<unk>", "the", "cat", "dog"])
        self.assertEqual(vocab.lookup("zyx"), dv.UNKNOWN_ID)
        self.assertIn("dog", vocab)
        self.assertRaises(DataFormatError, dv.build_vocabulary, [])

    def test_preprocess_news(self):
        vocab = dv.build_vocabulary([LONG_TITLE], min_freq=1)
        raw = dc.RawNews("N1", LONG_TITLE, tuple("E{0}".format(i) for i in range(8)), T0, "t")
        entity_vocab = dv.build_entity_vocabulary([raw])
        article = dv.preprocess_news(raw, vocab, entity_vocab, seed=3)
        self.assertEqual(len(article.title_tokens), 30)
        self.assertEqual(len(article.entity_ids), 5)
        self.assertEqual(list(article.entity_ids), sorted(article.entity_ids))
        self.assertEqual(article, dv.preprocess_news(raw, vocab, entity_vocab, seed=3))

        empty = dc.RawNews("N2", "", (), T0, "t")
        article = dv.preprocess_news(empty, vocab, entity_vocab)
        self.assertEqual(article.title_tokens, (dv.UNKNOWN_ID,))
        self.assertEqual(article.entity_ids, ())

    def test_preprocess_corpus_and_files(self):
        news = {
            "N1": dc.RawNews("N1", "a b a", ("Q1", "Q2"), T0, "x"),
            "N2": dc.RawNews("N2", "b c", ("Q2", "Q3"), T0, "y"),
        }
        config = ModelConfig().replace(min_word_freq=1)
        articles, vocab, entity_vocab = dv.preprocess_corpus(news, config)
        self.assertEqual(entity_vocab.id_to_entity, ["<pad>", "Q1", "Q2", "Q3"])
        self.assertEqual(articles["N2"].entity_ids, (2, 3))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "vocab.tsv")
            dv.write_vocabulary(path, vocab)
            loaded = dv.read_vocabulary(path)
            epath = os.path.join(tmp, "entities.tsv")
            dv.write_entity_vocabulary(epath, entity_vocab)
            eloaded = dv.read_entity_vocabulary(epath)
        self.assertEqual(loaded.id_to_word, vocab.id_to_word)
        self.assertEqual(loaded.counts, vocab.counts)
        self.assertEqual(eloaded.id_to_entity, entity_vocab.id_to_entity)

    def test_dictionaries_from_training_news(self):
        news = {
            "N1": dc.RawNews("N1", "a b", ("Q1",), T0, "x"),
            "N2": dc.RawNews("N2", "b c", ("Q2",), T0, "y"),
            "N3": dc.RawNews("N3", "d e", ("Q3",), T0, "z"),
        }
        corpus = dc.Corpus(
            news=news,
            clicks=pd.DataFrame([("U1", "N2", T0 + 50), ("U1", "N3", T0 + 200)],
                                columns=["user", "news", "ts"]),
            splits={
                "train": [dc.ImpressionRecord("U1", T0 + 100, (("N1", 1), ("N2", 0)))],
                "valid": [],
                "test": [dc.ImpressionRecord("U1", T0 + 200, (("N3", 1), ("N1", 0)))],
            },
        )
        self.assertEqual(corpus.training_news_ids(), {"N1", "N2"})
        config = ModelConfig().replace(min_word_freq=1)
        articles, vocab, entity_vocab = dv.preprocess_corpus(
            news, config, vocab_news=corpus.training_news_ids())
        self.assertEqual(vocab.id_to_word[1:], ["b", "a", "c"])
        self.assertNotIn("d", vocab)
        self.assertEqual(articles["N3"].title_tokens, (dv.UNKNOWN_ID, dv.UNKNOWN_ID))
        self.assertEqual(articles["N3"].entity_ids, ())
        self.assertEqual(entity_vocab.id_to_entity, ["<pad>", "Q1", "Q2"])


class TestCtr(unittest.TestCase):
    """`TestCase` for windowed statistics and quantization
    """

    def setUp(self):
        self.index = dctr.CtrIndex([
            impression("U1", T0 - 2 * HOUR, ("N1", 1), ("N2", 0)),
            impression("U2", T0 - HOUR // 2, ("N1", 0), ("N2", 1)),
            impression("U3", T0 - 60, ("N1", 1)),
            impression("U4", T0, ("N1", 1)),
        ])

    def test_window_counts(self):
        snapshot = self.index.snapshot(T0, window_hours=1.0)
        self.assertEqual(snapshot.clicks("N1"), 1)
        self.assertEqual(snapshot.impressions("N1"), 2)
        self.assertEqual(snapshot.views("N1"), 3)
        self.assertEqual(snapshot.views("N1", count="clicks"), 2)
        self.assertEqual(snapshot.views("N2", hours=1.0), 1)
        self.assertEqual(snapshot.views("N9"), 0)

    def test_compute_ctr(self):
        snapshot = self.index.snapshot(T0)
        self.assertAlmostEqual(dctr.compute_ctr(snapshot, "N9"), CTR_FLOOR)
        self.assertAlmostEqual(dctr.compute_ctr(snapshot, "N1"), 2.0 / 22.0)
        busy = dctr.CtrIndex([impression("U", T0 - 10, *([("N1", 1)] * 80 + [("N1", 0)] * 900))])
        self.assertAlmostEqual(dctr.compute_ctr(busy.snapshot(T0), "N1"), CTR_81_OF_1000)

    def test_quantize_recency(self):
        self.assertEqual(dctr.quantize_recency(T0, T0 + 90 * 60), 1)
        self.assertEqual(dctr.quantize_recency(T0, T0), 0)
        self.assertEqual(dctr.quantize_recency(T0, T0 - HOUR), 0)
        self.assertEqual(dctr.quantize_recency(T0, T0 + 45 * 24 * HOUR), 720)
        np.testing.assert_array_equal(
            dctr.quantize_recency(np.array([T0, T0 - 3 * HOUR]), T0), [0, 3]
        )

    def test_quantize_popularity(self):
        self.assertEqual(dctr.quantize_popularity(0.0), 0)
        self.assertEqual(dctr.quantize_popularity(1.0), 199)
        self.assertEqual(dctr.quantize_popularity(CTR_81_OF_1000), POPULARITY_BIN_0081)
        values = np.linspace(-0.5, 1.5, 101)
        bins = dctr.quantize_popularity(values)
        self.assertTrue(np.all(np.diff(bins) >= 0))
        self.assertTrue(bins.min() == 0 and bins.max() == 199)


class TestEmbeddings(unittest.TestCase):
    """`TestCase` for pretrained vectors
    """

    def test_load_embeddings(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "vectors.txt")
            with open(path, "w", encoding="utf-8") as f:
                f.write("cat 0.1 0.2 0.3\ndog 1 2 3\n")
            vectors = demb.load_embeddings(path, 3)
            self.assertEqual(len(vectors), 2)
            np.testing.assert_allclose(vectors.vectors["dog"], [1, 2, 3])
            with open(path, "a", encoding="utf-8") as f:
                f.write("bird 1 2\n")
            with self.assertRaises(DataFormatError) as ctx:
                demb.load_embeddings(path, 3)
            self.assertIn(":3:", str(ctx.exception))

    def test_embedding_matrix(self):
        pretrained = demb.EmbeddingFile({"cat": np.ones(3)}, 3)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table = demb.embedding_matrix(["<unk>", "cat", "dog"], 3, child_rng(0, "emb"),
                                          pretrained)
        self.assertEqual(len(caught), 1)
        np.testing.assert_array_equal(table[0], 0.0)
        np.testing.assert_array_equal(table[1], 1.0)
        again = demb.embedding_matrix(["<unk>", "cat", "dog"], 3, child_rng(0, "emb"), pretrained)
        np.testing.assert_array_equal(table, again)
        self.assertRaises(DataFormatError, demb.embedding_matrix, ["<unk>"], 4,
                          child_rng(0, "emb"), pretrained)
