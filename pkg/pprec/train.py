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

"""`train`

Mini-batch training of `PPRec` with the BPR loss, per-epoch checkpoints
and model selection by validation AUC.
"""

import dataclasses
import json
import os
import warnings

import numpy as np
from tqdm import tqdm

from .config import child_rng
from .core import Adam, Tape, backward
from .data.embeddings import embedding_matrix
from .data.vocab import preprocess_corpus
from .errors import DataFormatError, NumericError
from .evaluate import ModelScorer, evaluate
from .model.batch import FeatureStore, build_batch, sample_training_pairs
from .model.checkpoint import restore_params, save_checkpoint, snapshot_params
from .model.ranker import PPRec

__all__ = ["TrainResult", "build_model", "train"]


@dataclasses.dataclass
class TrainResult(object):
    """Outcome of `train`; ``model`` holds the parameters of ``best_epoch``"""

    model: PPRec
    store: FeatureStore
    vocab: object
    entity_vocab: object
    epoch_losses: list
    valid_auc: list
    best_epoch: int
    skipped: int
    checkpoints: list


def build_model(config, vocab, entity_vocab, word_embeddings=None, entity_embeddings=None):
    """Initialize a `PPRec` with embedding tables for the given vocabularies

    Parameters
    ----------
    config : `ModelConfig`

    vocab : `Vocabulary`

    entity_vocab : `EntityVocabulary`

    word_embeddings : `EmbeddingFile`, optional
        pretrained word vectors

    entity_embeddings : `EmbeddingFile`, optional
        pretrained (e.g. TransE) entity vectors, ignored with ``no_knowledge``
    """
    rng = child_rng(config.seed, "embeddings")
    word_table = embedding_matrix(
        vocab.id_to_word, config.word_dim, rng, word_embeddings, config.embedding_init_std
    )
    entity_table = None
    if not config.no_knowledge:
        entity_table = embedding_matrix(
            entity_vocab.id_to_entity, config.entity_dim, rng, entity_embeddings,
            config.embedding_init_std
        )
    return PPRec(config, word_table, entity_table)


def _dump_nan_batch(output_dir, epoch, step, loss, impressions, pairs):
    path = os.path.join(output_dir or os.getcwd(), "nan_batch.json")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(
            {
                "epoch": epoch,
                "step": step,
                "loss": repr(loss),
                "impressions": [imp.to_json() for imp in impressions],
                "pairs": [[list(pair) for pair in row] for row in pairs],
            },
            f,
            indent=2,
        )
    return path


def _write(log_file, text):
    if log_file is not None:
        log_file.write(text)
        log_file.flush()


def train(corpus, config, output_dir=None, log_file=None, progress=False,
          word_embeddings=None, entity_embeddings=None, vocab=None, entity_vocab=None):
    """Train a `PPRec` on ``corpus.splits["train"]``

    Each epoch shuffles the training impressions with the run seed, draws
    one in-impression negative per click and takes an Adam step per batch
    of ``config.batch_size`` impressions. After each epoch the validation
    AUC is computed and a checkpoint written; the epoch with the highest
    validation AUC is kept.

    Parameters
    ----------
    corpus : `Corpus`

    config : `ModelConfig`

    output_dir : `str`, optional
        where ``epoch_<k>.h5``, ``best.h5`` and a possible
        ``nan_batch.json`` go; nothing is written when `None`

    log_file : `file`, optional
        run log receiving one line per epoch

    progress : `bool`, optional
        show a `tqdm` bar per epoch

    word_embeddings, entity_embeddings : `EmbeddingFile`, optional

    vocab, entity_vocab : optional
        dictionaries to reuse instead of building them from the news

    Returns
    -------
    result : `TrainResult`

    Raises
    ------
    DataFormatError
        if the training split is empty

    NumericError
        if a batch produces a non-finite loss; the batch is dumped to
        ``nan_batch.json`` first
    """
    train_split = corpus.splits.get("train", [])
    if not train_split:
        raise DataFormatError("the training split has no impressions")
    valid_split = corpus.splits.get("valid", [])
    if output_dir is not None:
        os.makedirs(output_dir, exist_ok=True)

    articles, vocab, entity_vocab = preprocess_corpus(corpus.news, config, vocab, entity_vocab,
                                                      corpus.training_news_ids())
    store = FeatureStore.from_corpus(corpus, articles, config)
    model = build_model(config, vocab, entity_vocab, word_embeddings, entity_embeddings)
    optimizer = Adam(model.parameters(), lr=config.learning_rate)

    shuffle_rng = child_rng(config.seed, "shuffle")
    pair_rng = child_rng(config.seed, "pairs")
    dropout_rng = child_rng(config.seed, "dropout")

    epoch_losses, valid_auc, checkpoints = [], [], []
    best_epoch, best_auc, best_params = 0, -np.inf, None
    skipped_total = 0
    n_train = len(train_split)
    _write(log_file, "training on {0} impressions for {1} epochs\n".format(n_train, config.epochs))

    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(n_train)
        losses = []
        skipped = 0
        starts = range(0, n_train, config.batch_size)
        for step, start in enumerate(tqdm(starts, disable=not progress,
                                          desc="epoch {0}".format(epoch))):
            impressions = [train_split[i] for i in order[start:start + config.batch_size]]
            pairs = [sample_training_pairs(imp, pair_rng) for imp in impressions]
            kept = [(imp, row) for imp, row in zip(impressions, pairs) if row]
            skipped += len(impressions) - len(kept)
            if not kept:
                continue
            impressions = [imp for imp, _ in kept]
            pairs = [row for _, row in kept]
            batch = build_batch(store, impressions, pairs=pairs)
            with Tape() as tape:
                loss, _ = model.loss(batch, training=True, rng=dropout_rng)
            value = loss.item()
            if not np.isfinite(value):
                path = _dump_nan_batch(output_dir, epoch, step, value, impressions, pairs)
                _write(log_file, "non-finite loss in epoch {0}, batch {1}; dumped to {2}\n".format(
                    epoch, step, path))
                raise NumericError(
                    "loss became {0} in epoch {1}, batch {2}; the batch was saved to {3}".format(
                        value, epoch, step, path
                    )
                )
            backward(tape, loss)
            optimizer.step()
            losses.append(value)

        if skipped:
            warnings.warn(
                "{0} training impressions without both clicked and non-clicked news "
                "were skipped in epoch {1}".format(skipped, epoch)
            )
        skipped_total += skipped
        epoch_losses.append(losses)

        if valid_split:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                auc = evaluate(ModelScorer(model, store), valid_split, method="valid").mean["auc"]
        else:
            auc = None
        valid_auc.append(auc)
        mean_loss = float(np.mean(losses)) if losses else float("nan")
        _write(log_file, "epoch {0}: mean loss {1:.6f}, validation AUC {2}\n".format(
            epoch, mean_loss, "n/a" if auc is None else "{0:.6f}".format(auc)))

        if output_dir is not None:
            path = os.path.join(output_dir, "epoch_{0}.h5".format(epoch))
            save_checkpoint(path, model, vocab, entity_vocab, epoch=epoch,
                            valid_auc=np.nan if auc is None else auc)
            checkpoints.append(path)

        # without a validation split the last epoch wins
        score = np.inf if auc is None else auc
        if score >= best_auc:
            best_epoch, best_auc, best_params = epoch, score, snapshot_params(model)

    if not valid_split:
        warnings.warn("no validation impressions; keeping the last epoch")
    restore_params(model, best_params)
    _write(log_file, "selected epoch {0}\n".format(best_epoch))
    if output_dir is not None:
        path = os.path.join(output_dir, "best.h5")
        save_checkpoint(path, model, vocab, entity_vocab, epoch=best_epoch,
                        valid_auc=np.nan if valid_auc[best_epoch - 1] is None
                        else valid_auc[best_epoch - 1])
        checkpoints.append(path)

    return TrainResult(
        model=model,
        store=store,
        vocab=vocab,
        entity_vocab=entity_vocab,
        epoch_losses=epoch_losses,
        valid_auc=valid_auc,
        best_epoch=best_epoch,
        skipped=skipped_total,
        checkpoints=checkpoints,
    )
