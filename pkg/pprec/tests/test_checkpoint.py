"""Unit test for pprec.model.checkpoint
"""

import os
import tempfile
import unittest

import h5py
import numpy as np

from ..errors import ConfigError
from ..model.checkpoint import (load_checkpoint, restore_params, save_checkpoint,
                                snapshot_params)
from .fixtures import SPLITS, tiny_config, tiny_setup


class TestCheckpoint(unittest.TestCase):
    """`TestCase` for HDF5 checkpoints
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, "model.h5")

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip(self):
        _, store, model, vocab, entity_vocab = tiny_setup()
        save_checkpoint(self.path, model, vocab, entity_vocab, epoch=3, valid_auc=0.75)
        loaded, loaded_vocab, loaded_entities, attrs = load_checkpoint(self.path, tiny_config())
        self.assertEqual(int(attrs["epoch"]), 3)
        self.assertEqual(float(attrs["valid_auc"]), 0.75)
        self.assertEqual(loaded_vocab.id_to_word, vocab.id_to_word)
        self.assertEqual(loaded_entities.id_to_entity, entity_vocab.id_to_entity)
        before = model.score_impressions(store, SPLITS["test"])
        after = loaded.score_impressions(store, SPLITS["test"])
        for first, second in zip(before, after):
            np.testing.assert_array_equal(first, second)

    def test_configuration_mismatch(self):
        _, _, model, vocab, entity_vocab = tiny_setup()
        save_checkpoint(self.path, model, vocab, entity_vocab)
        self.assertRaises(ConfigError, load_checkpoint, self.path, tiny_config(no_ctr=True))
        # run bookkeeping does not have to match
        load_checkpoint(self.path, tiny_config(seed=7, epochs=1))
        self.assertRaises(ConfigError, load_checkpoint, os.path.join(self.tmp.name, "missing.h5"))
        with h5py.File(self.path, "a") as f:
            f.attrs["format_version"] = 99
        self.assertRaises(ConfigError, load_checkpoint, self.path)

    def test_no_knowledge_has_no_entity_parameters(self):
        _, _, model, vocab, entity_vocab = tiny_setup(tiny_config(no_knowledge=True))
        save_checkpoint(self.path, model, vocab, entity_vocab)
        with h5py.File(self.path, "r") as f:
            self.assertFalse([name for name in f["params"] if "entity" in name])
        loaded = load_checkpoint(self.path)[0]
        self.assertTrue(loaded.config.no_knowledge)

    def test_restore_params(self):
        _, _, model, _, _ = tiny_setup()
        values = snapshot_params(model)
        model.parameters()[0].values[...] += 1.0
        restore_params(model, values)
        np.testing.assert_array_equal(model.parameters()[0].values,
                                      values[model.parameters()[0].name])
        values.pop(model.parameters()[0].name)
        self.assertRaises(ConfigError, restore_params, model, values)
