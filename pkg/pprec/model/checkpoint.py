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

"""`checkpoint`

HDF5 checkpoints holding the configuration, the named parameters and the
dictionaries needed to featurize new data.
"""

import os

import h5py
import numpy as np

from ..config import ModelConfig
from ..data.vocab import EntityVocabulary, Vocabulary
from ..errors import ConfigError
from .ranker import PPRec

__all__ = ["FORMAT_VERSION", "save_checkpoint", "load_checkpoint", "snapshot_params",
           "restore_params"]

FORMAT_VERSION = 1

# run bookkeeping that may differ between training and later use
_IGNORED_KEYS = ["learning_rate", "batch_size", "epochs", "runs", "seed", "dropout"]


def snapshot_params(model):
    """Copy of every parameter value keyed by name"""
    return dict((param.name, param.values.copy()) for param in model.parameters())


def restore_params(model, values):
    """Load ``values`` (name to array) into ``model`` in place

    Raises
    ------
    ConfigError
        if a parameter is missing or has another shape
    """
    params = model.named_parameters()
    missing = sorted(set(params) - set(values))
    extra = sorted(set(values) - set(params))
    if missing or extra:
        raise ConfigError(
            "checkpoint parameters do not match the model (missing {0}, unexpected {1})".format(
                missing[:5], extra[:5]
            )
        )
    for name, param in params.items():
        if param.values.shape != values[name].shape:
            raise ConfigError(
                "parameter {0} has shape {1} in the checkpoint but {2} in the model".format(
                    name, values[name].shape, param.values.shape
                )
            )
        param.values[...] = values[name]


def save_checkpoint(path, model, vocab, entity_vocab, **attrs):
    """Write ``model`` to an HDF5 file

    Parameters
    ----------
    path : `str`

    model : `PPRec`

    vocab : `Vocabulary`

    entity_vocab : `EntityVocabulary`

    **attrs
        extra scalar attributes such as ``epoch`` or ``valid_auc``
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    string = h5py.string_dtype(encoding="utf-8")
    with h5py.File(path, "w") as f:
        f.attrs["format_version"] = FORMAT_VERSION
        f.attrs["config"] = model.config.to_json()
        for key, value in attrs.items():
            f.attrs[key] = value
        params = f.create_group("params")
        for param in model.parameters():
            params.create_dataset(param.name, data=param.values)
        vocab_group = f.create_group("vocab")
        vocab_group.create_dataset("words", data=np.array(vocab.id_to_word[1:], dtype=object),
                                   dtype=string)
        vocab_group.create_dataset("counts", data=np.asarray(vocab.counts[1:], dtype=np.int64))
        vocab_group.create_dataset(
            "entities", data=np.array(entity_vocab.id_to_entity[1:], dtype=object), dtype=string
        )


def _check_config(stored, config):
    if config is None:
        return
    stored_dict = stored.to_dict()
    wanted = config.to_dict()
    diffs = [key for key in stored_dict
             if key not in _IGNORED_KEYS and stored_dict[key] != wanted[key]]
    if diffs:
        raise ConfigError(
            "checkpoint was trained with a different configuration: {0}".format(
                ", ".join("{0}={1!r} (requested {2!r})".format(key, stored_dict[key], wanted[key])
                          for key in diffs)
            )
        )


def load_checkpoint(path, config=None):
    """Rebuild a `PPRec` from an HDF5 checkpoint

    Parameters
    ----------
    path : `str`

    config : `ModelConfig`, optional
        if given, every model, data and ablation key must equal the stored one

    Returns
    -------
    model : `PPRec`

    vocab : `Vocabulary`

    entity_vocab : `EntityVocabulary`

    attrs : `dict`
        the extra attributes saved with the checkpoint
    """
    if not os.path.isfile(path):
        raise ConfigError("checkpoint {0} does not exist".format(path))
    with h5py.File(path, "r") as f:
        version = int(f.attrs.get("format_version", -1))
        if version != FORMAT_VERSION:
            raise ConfigError(
                "checkpoint format {0} is not supported (expected {1})".format(
                    version, FORMAT_VERSION
                )
            )
        stored = ModelConfig.from_json(f.attrs["config"])
        attrs = dict((key, f.attrs[key]) for key in f.attrs
                     if key not in ("format_version", "config"))
        values = dict((name, f["params"][name][()]) for name in f["params"])
        words = [w.decode("utf-8") if isinstance(w, bytes) else w for w in f["vocab/words"][()]]
        counts = f["vocab/counts"][()].tolist()
        entities = [e.decode("utf-8") if isinstance(e, bytes) else e
                    for e in f["vocab/entities"][()]]
    _check_config(stored, config)

    word_table = values["news.word_embedding.table"]
    entity_table = values.get("news.entity_embedding.table")
    model = PPRec(stored, np.zeros_like(word_table),
                  None if entity_table is None else np.zeros_like(entity_table))
    restore_params(model, values)
    return model, Vocabulary(words, counts), EntityVocabulary(entities), attrs
