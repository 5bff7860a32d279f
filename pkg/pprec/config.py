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

"""`config`

Model and run configuration, ini/JSON parsing and validation.
"""

import ast
import dataclasses
import json
import operator
import os
import warnings
import zlib
from configparser import ConfigParser

import numpy as np

from .errors import ConfigError

__all__ = [
    "ModelConfig",
    "SECTIONS",
    "parse_inifile",
    "load_config",
    "config_from_dict",
    "error_check",
    "child_rng",
    "data_dir_default",
]

SECTIONS = ["model", "train", "data", "ablation", "rand_seed"]


def _opt(default, section):
    return dataclasses.field(default=default, metadata={"section": section})


@dataclasses.dataclass(frozen=True)
class ModelConfig(object):
    """Every hyperparameter of a run

    Defaults are the published settings: 300-d words, 100-d entities,
    recency and popularity embeddings, 20 heads of 20 dims, 200-d
    attention queries, dropout 0.2, Adam at 1e-4, batches of 32
    impressions for 2 epochs and a one hour CTR window.
    """

    # model geometry
    word_dim: int = _opt(300, "model")
    entity_dim: int = _opt(100, "model")
    num_heads: int = _opt(20, "model")
    head_dim: int = _opt(20, "model")
    query_dim: int = _opt(200, "model")
    recency_dim: int = _opt(100, "model")
    popularity_dim: int = _opt(100, "model")
    popularity_hidden: int = _opt(128, "model")
    gate_hidden: int = _opt(100, "model")
    single_layer_gate: bool = _opt(False, "model")
    dropout: float = _opt(0.2, "model")
    embedding_init_std: float = _opt(0.1, "model")

    # optimisation
    learning_rate: float = _opt(1e-4, "train")
    batch_size: int = _opt(32, "train")
    epochs: int = _opt(2, "train")
    runs: int = _opt(1, "train")

    # preprocessing and popularity statistics
    max_title_len: int = _opt(30, "data")
    max_entities: int = _opt(5, "data")
    max_history: int = _opt(50, "data")
    min_word_freq: int = _opt(3, "data")
    ctr_window_hours: float = _opt(1.0, "data")
    ctr_prior_clicks: float = _opt(1.0, "data")
    ctr_prior_impressions: float = _opt(20.0, "data")
    max_recency_hours: int = _opt(720, "data")
    popularity_bins: int = _opt(200, "data")
    history_popularity_time: str = _opt("click-time", "data")
    view_count: str = _opt("impressions", "data")
    recentpop_hours: float = _opt(24.0, "data")

    # ablations
    no_popularity_score: bool = _opt(False, "ablation")
    no_matching_score: bool = _opt(False, "ablation")
    no_ctr: bool = _opt(False, "ablation")
    no_content: bool = _opt(False, "ablation")
    no_recency: bool = _opt(False, "ablation")
    no_user_popularity: bool = _opt(False, "ablation")
    no_knowledge: bool = _opt(False, "ablation")

    seed: int = _opt(0, "rand_seed")

    @property
    def news_dim(self):
        """Width of every attention output and of n and u"""
        return self.num_heads * self.head_dim

    def replace(self, **overrides):
        return dataclasses.replace(self, **overrides)

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return config_from_dict(json.loads(text))

    def sections(self):
        """Values grouped by ini section"""
        out = dict((name, {}) for name in SECTIONS)
        for field in dataclasses.fields(self):
            out[field.metadata["section"]][field.name] = getattr(self, field.name)
        return out


_FIELDS = dict((field.name, field) for field in dataclasses.fields(ModelConfig))


def config_from_dict(values, base=None):
    """Build a `ModelConfig` from a flat or per-section `dict`

    Parameters
    ----------
    values : `dict`
        either ``{key: value}`` or ``{section: {key: value}}`` as returned
        by `parse_inifile`

    base : `ModelConfig`, optional
        configuration the values override, defaults to `ModelConfig()`

    Returns
    -------
    config : `ModelConfig`
    """
    base = base if base is not None else ModelConfig()
    flat = {}
    for key, value in values.items():
        if isinstance(value, dict):
            if key not in SECTIONS:
                raise ConfigError(
                    "Unknown config section [{0}]; sections are {1}".format(key, SECTIONS)
                )
            for subkey, subvalue in value.items():
                if subkey in flat:
                    warnings.warn("config key {0} given twice, keeping [{1}]".format(subkey, key))
                flat[subkey] = subvalue
        else:
            flat[key] = value

    overrides = {}
    for key, value in flat.items():
        if key not in _FIELDS:
            raise ConfigError("Unknown config key {0!r}".format(key))
        overrides[key] = _coerce(key, value)
    config = dataclasses.replace(base, **overrides)
    error_check(config)
    return config


def _coerce(key, value):
    kind = _FIELDS[key].type
    if kind in ("bool", bool):
        if isinstance(value, str):
            lowered = value.lower()
            if lowered in ("true", "1", "yes"):
                return True
            if lowered in ("false", "0", "no"):
                return False
            raise ConfigError("{0} needs to be True or False (you set it to {1})".format(key, value))
        return bool(value)
    try:
        if kind in ("int", int):
            if float(value) != int(float(value)):
                raise ValueError
            return int(float(value))
        if kind in ("float", float):
            return float(value)
    except (TypeError, ValueError):
        raise ConfigError("{0} needs to be a {1} (you set it to {2!r})".format(key, kind, value))
    return str(value)


_BIN_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Mod: operator.mod,
}

_CONSTANTS = {"True": True, "False": False, "None": None}


def _arithmetic_eval(text):
    """Evaluate numbers, strings, lists and simple arithmetic from an ini value

    Bare names evaluate to themselves so ``history_popularity_time =
    impression-time`` style values need no quotes.
    """

    def _eval(node):
        if isinstance(node, ast.Expression):
            return _eval(node.body)
        elif isinstance(node, ast.Constant):
            return node.value
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -_eval(node.operand)
        elif isinstance(node, ast.BinOp) and type(node.op) in _BIN_OPS:
            return _BIN_OPS[type(node.op)](_eval(node.left), _eval(node.right))
        elif isinstance(node, ast.List):
            return [_eval(x) for x in node.elts]
        elif isinstance(node, ast.Name):
            return _CONSTANTS.get(node.id, node.id)
        raise ValueError("Unsupported expression {0}".format(ast.dump(node)))

    return _eval(ast.parse(text, mode="eval"))


def parse_inifile(inifile):
    """Provides a method for parsing the inifile and returning dicts of each section

    Values are evaluated with a restricted arithmetic evaluator and fall back
    to JSON, then to the raw string.

    Parameters
    ----------
    inifile : `str`
        path to the ini file

    Returns
    -------
    sections : `dict`
        ``{section: {option: value}}``
    """
    if inifile is None:
        raise ConfigError("Please supply an inifile")
    elif not os.path.isfile(inifile):
        raise ConfigError("inifile {0} does not exist".format(inifile))

    cp = ConfigParser()
    cp.optionxform = str
    cp.read(inifile)

    dictionary = {}
    for section in cp.sections():
        dictionary[section] = {}
        for option in cp.options(section):
            opt = cp.get(section, option)
            if "\n" in opt:
                raise ConfigError(
                    "We have detected an error in your inifile. A parameter was read in with "
                    "the following value: {0}. Likely, you have an unexpected syntax, such as "
                    "a space before a parameter/option".format(opt)
                )
            try:
                dictionary[section][option] = _arithmetic_eval(opt)
            except (SyntaxError, ValueError, TypeError, ZeroDivisionError):
                try:
                    dictionary[section][option] = json.loads(opt)
                except ValueError:
                    dictionary[section][option] = opt.strip()
    return dictionary


def load_config(path, base=None):
    """Read a `ModelConfig` from an ini file or a JSON file

    JSON files hold either a flat mapping or the same sections as the ini
    format.
    """
    if path.endswith(".json"):
        if not os.path.isfile(path):
            raise ConfigError("config file {0} does not exist".format(path))
        with open(path, "r", encoding="utf-8") as f:
            try:
                values = json.load(f)
            except ValueError as exc:
                raise ConfigError("config file {0} is not valid JSON: {1}".format(path, exc))
        if not isinstance(values, dict):
            raise ConfigError("config file {0} must hold a JSON object".format(path))
        return config_from_dict(values, base=base)
    return config_from_dict(parse_inifile(path), base=base)


def error_check(config):
    """Checks that every value of ``config`` is viable

    Raises
    ------
    ConfigError
        naming the first offending key and its allowed range
    """
    if not isinstance(config, ModelConfig):
        raise ConfigError("configuration must be supplied as a ModelConfig")

    for flag in [
        "word_dim",
        "entity_dim",
        "num_heads",
        "head_dim",
        "query_dim",
        "recency_dim",
        "popularity_dim",
        "popularity_hidden",
        "gate_hidden",
        "batch_size",
        "epochs",
        "runs",
        "max_title_len",
        "max_history",
        "popularity_bins",
    ]:
        if getattr(config, flag) < 1:
            raise ConfigError(
                "{0} needs to be a positive integer (you set it to {1})".format(
                    flag, getattr(config, flag)
                )
            )

    for flag in ["max_entities", "min_word_freq", "max_recency_hours", "ctr_prior_clicks"]:
        if getattr(config, flag) < 0:
            raise ConfigError(
                "{0} needs to be non-negative (you set it to {1})".format(
                    flag, getattr(config, flag)
                )
            )

    for flag in [
        "learning_rate",
        "ctr_window_hours",
        "ctr_prior_impressions",
        "recentpop_hours",
        "embedding_init_std",
    ]:
        if not getattr(config, flag) > 0:
            raise ConfigError(
                "{0} needs to be positive (you set it to {1})".format(flag, getattr(config, flag))
            )

    if not 0.0 <= config.dropout < 1.0:
        raise ConfigError("dropout needs to be in [0, 1) (you set it to {0})".format(config.dropout))

    if config.ctr_prior_clicks > config.ctr_prior_impressions:
        raise ConfigError(
            "ctr_prior_clicks ({0}) cannot exceed ctr_prior_impressions ({1})".format(
                config.ctr_prior_clicks, config.ctr_prior_impressions
            )
        )

    flag = "history_popularity_time"
    if getattr(config, flag) not in ["click-time", "impression-time"]:
        raise ConfigError(
            "{0} needs to be 'click-time' or 'impression-time' (you set it to {1})".format(
                flag, getattr(config, flag)
            )
        )

    flag = "view_count"
    if getattr(config, flag) not in ["impressions", "clicks"]:
        raise ConfigError(
            "{0} needs to be 'impressions' or 'clicks' (you set it to {1})".format(
                flag, getattr(config, flag)
            )
        )

    if config.no_content and config.no_recency:
        raise ConfigError("no_content and no_recency cannot both be set")

    if config.no_popularity_score and config.no_matching_score:
        raise ConfigError("no_popularity_score and no_matching_score cannot both be set")

    if config.seed < 0:
        raise ConfigError("seed needs to be non-negative (you set it to {0})".format(config.seed))

    return config


def child_rng(seed, name):
    """Random generator for one component, derived from the root seed

    Parameters
    ----------
    seed : `int`
        root seed of the run

    name : `str`
        component name, e.g. ``"dropout"`` or ``"entities:N12"``

    Returns
    -------
    rng : `numpy.random.Generator`
    """
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed), key]))


def data_dir_default():
    """Corpus root from ``PPREC_DATA_DIR``, or the working directory"""
    return os.environ.get("PPREC_DATA_DIR", os.getcwd())
