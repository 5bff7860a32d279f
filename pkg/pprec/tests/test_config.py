"""Unit test for pprec.config
"""

import json
import os
import tempfile
import unittest
from unittest import mock

import numpy as np

from .. import config as cfg
from ..errors import ConfigError

TABLE_DEFAULTS = {
    "word_dim": 300,
    "entity_dim": 100,
    "recency_dim": 100,
    "num_heads": 20,
    "head_dim": 20,
    "query_dim": 200,
    "dropout": 0.2,
    "learning_rate": 1e-4,
    "batch_size": 32,
    "epochs": 2,
    "ctr_window_hours": 1.0,
}

INIFILE = """[model]
num_heads = 4
head_dim = 2 * 8
dropout = 0.1

[data]
history_popularity_time = impression-time
ctr_window_hours = 0.5

[ablation]
no_ctr = True

[rand_seed]
seed = 12
"""


class TestConfig(unittest.TestCase):
    """`TestCase` for configuration handling
    """

    def test_defaults_match_table(self):
        config = cfg.ModelConfig()
        for key, value in TABLE_DEFAULTS.items():
            self.assertEqual(getattr(config, key), value, key)
        self.assertEqual(config.news_dim, 400)
        self.assertFalse(any(getattr(config, name) for name in config.sections()["ablation"]))
        cfg.error_check(config)

    def test_config_from_dict(self):
        config = cfg.config_from_dict({"epochs": "3", "no_ctr": "true"})
        self.assertEqual(config.epochs, 3)
        self.assertTrue(config.no_ctr)
        config = cfg.config_from_dict({"train": {"batch_size": 8}}, base=config)
        self.assertEqual(config.batch_size, 8)
        self.assertEqual(config.epochs, 3)
        self.assertRaises(ConfigError, cfg.config_from_dict, {"not_a_key": 1})
        self.assertRaises(ConfigError, cfg.config_from_dict, {"bogus": {"epochs": 1}})
        self.assertRaises(ConfigError, cfg.config_from_dict, {"epochs": 1.5})
        self.assertRaises(ConfigError, cfg.config_from_dict, {"no_ctr": "maybe"})

    def test_parse_inifile(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "params.ini")
            with open(path, "w") as f:
                f.write(INIFILE)
            sections = cfg.parse_inifile(path)
            self.assertEqual(sections["model"]["head_dim"], 16)
            self.assertEqual(sections["data"]["history_popularity_time"], "impression-time")
            config = cfg.load_config(path)
        self.assertEqual(config.news_dim, 64)
        self.assertEqual(config.dropout, 0.1)
        self.assertEqual(config.history_popularity_time, "impression-time")
        self.assertTrue(config.no_ctr)
        self.assertEqual(config.seed, 12)
        self.assertRaises(ConfigError, cfg.parse_inifile, "does_not_exist.ini")

    def test_json_config_round_trip(self):
        config = cfg.ModelConfig().replace(epochs=5, no_knowledge=True)
        self.assertEqual(cfg.ModelConfig.from_json(config.to_json()), config)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "params.json")
            with open(path, "w") as f:
                json.dump(config.sections(), f)
            self.assertEqual(cfg.load_config(path), config)
            with open(path, "w") as f:
                f.write("[1, 2]")
            self.assertRaises(ConfigError, cfg.load_config, path)

    def test_error_check(self):
        base = cfg.ModelConfig()
        bad = [
            {"num_heads": 0},
            {"dropout": 1.0},
            {"dropout": -0.1},
            {"learning_rate": 0.0},
            {"ctr_prior_clicks": 30.0},
            {"history_popularity_time": "never"},
            {"view_count": "likes"},
            {"no_content": True, "no_recency": True},
            {"no_popularity_score": True, "no_matching_score": True},
            {"seed": -1},
        ]
        for overrides in bad:
            self.assertRaises(ConfigError, cfg.error_check, base.replace(**overrides))
        with self.assertRaises(ConfigError) as ctx:
            cfg.error_check(base.replace(batch_size=0))
        self.assertIn("you set it to 0", str(ctx.exception))

    def test_child_rng(self):
        first = cfg.child_rng(7, "dropout").random(5)
        np.testing.assert_array_equal(first, cfg.child_rng(7, "dropout").random(5))
        self.assertFalse(np.array_equal(first, cfg.child_rng(7, "shuffle").random(5)))
        self.assertFalse(np.array_equal(first, cfg.child_rng(8, "dropout").random(5)))

    def test_data_dir_default(self):
        with mock.patch.dict(os.environ, {"PPREC_DATA_DIR": "/tmp/corpus"}):
            self.assertEqual(cfg.data_dir_default(), "/tmp/corpus")
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(cfg.data_dir_default(), os.getcwd())
