"""Unit test for pprec.model.user_encoder
"""

import unittest

import numpy as np

from ..core import tensor as T
from ..errors import ContractError
from ..model.user_encoder import UserEncoder
from .fixtures import tiny_config

MASK = np.array([[True, True, True, False], [False, False, False, False]])
BINS = np.array([[0, 9, 4, 0], [0, 0, 0, 0]])


class TestUserEncoder(unittest.TestCase):
    """`TestCase` for the popularity-aware user encoder
    """

    def setUp(self):
        self.encoder = UserEncoder(tiny_config(), np.random.default_rng(8))
        self.history = np.random.default_rng(9).normal(size=(2, 4, 6))

    def test_attention_weights(self):
        user, alpha = self.encoder(T.Tensor(self.history), MASK, BINS)
        self.assertEqual(user.shape, (2, 6))
        np.testing.assert_allclose(alpha.values[0].sum(), 1.0, atol=1e-12)
        self.assertEqual(alpha.values[0, 3], 0.0)
        np.testing.assert_array_equal(alpha.values[1], 0.0)
        np.testing.assert_array_equal(user.values[1], 0.0)
        reps = self.encoder.contextual_news_reps(T.Tensor(self.history), MASK)
        np.testing.assert_allclose(user.values[0], alpha.values[0] @ reps.values[0], rtol=1e-10)

    def test_order_of_clicks_is_irrelevant(self):
        clicks = self.history[0, :3]
        bins = BINS[0, :3]
        order = [2, 0, 1]
        first = self.encoder.encode_user(T.Tensor(clicks), bins).values
        second = self.encoder.encode_user(T.Tensor(clicks[order]), bins[order]).values
        np.testing.assert_allclose(first, second, rtol=1e-10, atol=1e-12)
        padded, _ = self.encoder(T.Tensor(self.history), MASK, BINS)
        np.testing.assert_allclose(first, padded.values[0], rtol=1e-10, atol=1e-12)

    def test_empty_history(self):
        user = self.encoder.encode_user(T.Tensor(np.zeros((0, 6))), np.zeros(0, dtype=int))
        np.testing.assert_array_equal(user.values, np.zeros(6))

    def test_popularity_bins(self):
        bad = BINS.copy()
        bad[0, 0] = 10
        self.assertRaises(ContractError, self.encoder, T.Tensor(self.history), MASK, bad)
        plain = UserEncoder(tiny_config(no_user_popularity=True), np.random.default_rng(8))
        self.assertNotIn("user.popularity_embedding.table", plain.named_parameters())
        # bins are not looked up without the popularity branch
        user, _ = plain(T.Tensor(self.history), MASK, bad)
        self.assertEqual(user.shape, (2, 6))
