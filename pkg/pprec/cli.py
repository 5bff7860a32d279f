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

"""`cli`

The ``pprec`` command: ``gen-data``, ``preprocess``, ``train``,
``evaluate`` and ``predict-popularity``.
"""

import argparse
import dataclasses
import datetime
import hashlib
import json
import os
import sys
import warnings

import numpy as np
import pandas as pd

from . import __version__
from .baselines import available_baselines, get_baseline
from .config import ModelConfig, config_from_dict, data_dir_default, load_config
from .data.corpus import load_corpus, write_corpus
from .data.embeddings import load_embeddings
from .data.synthetic import GeneratorSettings, SyntheticCorpusGenerator
from .data.vocab import (
    preprocess_corpus,
    read_entity_vocabulary,
    read_vocabulary,
    write_entity_vocabulary,
    write_vocabulary,
)
from .errors import EXIT_CODES, ConfigError, DataFormatError, PPRecError
from .evaluate import (
    ModelScorer,
    aggregate_runs,
    cold_start_buckets,
    diversity_at_k,
    evaluate,
    write_cold_start,
    write_diversity,
    write_report,
)
from .model.batch import FeatureStore
from .model.checkpoint import load_checkpoint
from .train import train

__all__ = ["RunManifest", "build_parser", "main", "method_label"]

ABLATIONS = [
    "no_popularity_score",
    "no_matching_score",
    "no_ctr",
    "no_content",
    "no_recency",
    "no_user_popularity",
    "no_knowledge",
]


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _digests(paths):
    return dict((path, sha256(path)) for path in sorted(paths) if os.path.isfile(path))


@dataclasses.dataclass
class RunManifest(object):
    """Provenance of one command: what ran, on which inputs, producing what

    The manifest is written before any other output and rewritten with the
    output digests and end time by `finish`.
    """

    path: str
    command: list
    config: dict
    seed: int
    inputs: dict
    outputs: dict = dataclasses.field(default_factory=dict)
    started: str = dataclasses.field(default_factory=_now)
    finished: str = None

    @classmethod
    def start(cls, directory, command, config, seed, inputs=()):
        os.makedirs(directory, exist_ok=True)
        manifest = cls(
            path=os.path.join(directory, "manifest.json"),
            command=list(command),
            config=config,
            seed=int(seed),
            inputs=_digests(inputs),
        )
        manifest.write()
        return manifest

    def write(self):
        payload = dataclasses.asdict(self)
        payload.pop("path")
        payload["version"] = __version__
        with open(self.path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")

    def finish(self, outputs):
        self.outputs = _digests(outputs)
        self.finished = _now()
        self.write()


def method_label(config):
    """Report row name of a model configuration, e.g. ``pprec-no_ctr``"""
    switched = [name for name in ABLATIONS if getattr(config, name)]
    return "-".join(["pprec"] + switched)


def _config_from_args(args):
    base = load_config(args.config) if getattr(args, "config", None) else ModelConfig()
    overrides = dict(
        (key, getattr(args, key))
        for key in ["epochs", "batch_size", "learning_rate", "seed", "runs"] + ABLATIONS
        if getattr(args, key, None) is not None
    )
    return config_from_dict(overrides, base=base) if overrides else base


def _load_dictionaries(data_dir):
    vocab_path = os.path.join(data_dir, "vocab.tsv")
    entity_path = os.path.join(data_dir, "entities.tsv")
    if os.path.isfile(vocab_path) and os.path.isfile(entity_path):
        return read_vocabulary(vocab_path), read_entity_vocabulary(entity_path), [
            vocab_path, entity_path]
    return None, None, []


def _corpus_files(data_dir):
    return [os.path.join(data_dir, "news.jsonl"), os.path.join(data_dir, "clicks.tsv")] + [
        os.path.join(data_dir, name, "impressions.jsonl") for name in ("train", "valid", "test")
    ]


# -- commands -----------------------------------------------------------------


def cmd_gen_data(args):
    """Write a synthetic corpus"""
    output = args.output
    if os.path.isdir(output) and os.listdir(output) and not args.force:
        raise ConfigError(
            "{0} exists and is not empty; use --force to overwrite it".format(output)
        )
    settings = GeneratorSettings(
        users=args.users, news=args.news, impressions=args.impressions, pop_weight=args.pop_weight
    )
    settings.error_check()
    manifest = RunManifest.start(
        output, ["gen-data"] + list(args.argv), dataclasses.asdict(settings), args.seed
    )
    corpus, latent = SyntheticCorpusGenerator(settings, seed=args.seed).generate()
    paths = write_corpus(output, corpus)
    latent_path = os.path.join(output, "latent.tsv")
    latent.to_csv(latent_path, sep="\t", index=False, lineterminator="\n", float_format="%.9g")
    manifest.finish(paths + [latent_path])
    return 0


def cmd_preprocess(args):
    """Write the word and entity dictionaries of a corpus"""
    config = _config_from_args(args)
    data_dir = args.data_dir
    output = args.output or data_dir
    manifest = RunManifest.start(output, ["preprocess"] + list(args.argv), config.to_dict(),
                                 config.seed, _corpus_files(data_dir))
    corpus = load_corpus(data_dir)
    _, vocab, entity_vocab = preprocess_corpus(corpus.news, config,
                                               vocab_news=corpus.training_news_ids())
    paths = [os.path.join(output, "vocab.tsv"), os.path.join(output, "entities.tsv")]
    write_vocabulary(paths[0], vocab)
    write_entity_vocabulary(paths[1], entity_vocab)
    manifest.finish(paths)
    return 0


def cmd_train(args):
    """Train one model per run and evaluate each on the test split"""
    config = _config_from_args(args)
    data_dir = args.data_dir
    vocab, entity_vocab, vocab_files = _load_dictionaries(data_dir)
    inputs = _corpus_files(data_dir) + vocab_files + [
        path for path in (args.embeddings, args.entity_embeddings) if path]
    manifest = RunManifest.start(args.output, ["train"] + list(args.argv), config.to_dict(),
                                 config.seed, inputs)
    corpus = load_corpus(data_dir)
    word_embeddings = load_embeddings(args.embeddings, config.word_dim) if args.embeddings else None
    entity_embeddings = (load_embeddings(args.entity_embeddings, config.entity_dim)
                         if args.entity_embeddings else None)

    outputs, reports = [], []
    log_path = os.path.join(args.output, "run.log")
    with open(log_path, "w", encoding="utf-8", newline="\n") as log_file:
        for run in range(config.runs):
            run_config = config.replace(seed=config.seed + run)
            run_dir = os.path.join(args.output, "run_{0}".format(run))
            log_file.write("run {0} with seed {1}\n".format(run, run_config.seed))
            result = train(corpus, run_config, output_dir=run_dir, log_file=log_file,
                           progress=not args.quiet, word_embeddings=word_embeddings,
                           entity_embeddings=entity_embeddings, vocab=vocab,
                           entity_vocab=entity_vocab)
            outputs.extend(result.checkpoints)
            if corpus.splits.get("test"):
                reports.append(evaluate(ModelScorer(result.model, result.store),
                                        corpus.splits["test"], method=method_label(config)))
        if reports:
            paths = write_report([aggregate_runs(reports)], args.output)
            outputs.extend(paths)
            log_file.write("report written to {0}\n".format(paths[0]))
    manifest.finish(outputs + [log_path])
    return 0


def _scorers(args, corpus, base_config):
    """(method, run scorers, stores, news vectors) for the requested evaluation"""
    models = []
    for path in args.checkpoint or []:
        model, vocab, entity_vocab, _ = load_checkpoint(path, config=base_config)
        articles, _, _ = preprocess_corpus(corpus.news, model.config, vocab, entity_vocab)
        store = FeatureStore.from_corpus(corpus, articles, model.config)
        models.append(ModelScorer(model, store))

    if args.baseline:
        config = base_config if base_config is not None else ModelConfig()
        scorer_class = get_baseline(args.baseline)
        if models:
            store = models[0].store
        else:
            articles, _, _ = preprocess_corpus(corpus.news, config)
            store = FeatureStore.from_corpus(corpus, articles, config)
        scorers = [scorer_class(store.ctr_index, config)]
        vectors = [models[0].news_vectors] if models else [None]
        return args.baseline, scorers, [store], vectors

    if not models:
        raise ConfigError("evaluate needs --checkpoint or --baseline")
    return (method_label(models[0].model.config), models, [m.store for m in models],
            [m.news_vectors for m in models])


def cmd_evaluate(args):
    """Evaluate checkpoints (one per run) or a popularity baseline"""
    base_config = load_config(args.config) if args.config else None
    data_dir = args.data_dir
    seed = base_config.seed if base_config is not None else ModelConfig().seed
    manifest = RunManifest.start(
        args.output, ["evaluate"] + list(args.argv),
        base_config.to_dict() if base_config is not None else {}, seed,
        _corpus_files(data_dir) + list(args.checkpoint or []),
    )
    corpus = load_corpus(data_dir)
    impressions = corpus.splits.get(args.split, [])
    if not impressions:
        raise DataFormatError("split {0!r} of {1} has no impressions".format(args.split, data_dir))
    if args.diversity and args.baseline and not args.checkpoint:
        raise ConfigError("--diversity with --baseline needs a --checkpoint for news embeddings")

    method, scorers, stores, vectors = _scorers(args, corpus, base_config)
    reports, buckets, diversity = [], [], []
    for scorer, store, news_vectors in zip(scorers, stores, vectors):
        scores = scorer.score_impressions(impressions)
        reports.append(evaluate(scorer, impressions, method=method, nproc=args.parallel,
                                scores=scores))
        if args.cold_start:
            buckets.append(cold_start_buckets(scores, impressions, store, method=method,
                                              nproc=args.parallel))
        if args.diversity:
            diversity.append(diversity_at_k(scores, impressions, store, news_vectors))

    outputs = list(write_report([aggregate_runs(reports)], args.output))
    if buckets:
        combined = {}
        for k in buckets[0]:
            runs = [run[k] for run in buckets]
            combined[k] = None if any(r is None for r in runs) else aggregate_runs(runs)
        outputs.append(write_cold_start({method: combined},
                                        os.path.join(args.output, "cold_start.tsv")))
    if diversity:
        mean = pd.concat(diversity).groupby("k", sort=True).mean().reset_index()
        mean["excluded_pairs"] = mean["excluded_pairs"].round().astype(np.int64)
        outputs.append(write_diversity({method: mean}, os.path.join(args.output,
                                                                    "diversity.tsv")))
    manifest.finish(outputs)
    return 0


def cmd_predict_popularity(args):
    """Per-news popularity breakdown of a checkpoint at a reference time"""
    if args.ctr is not None and not 0.0 <= args.ctr <= 1.0:
        raise ConfigError("--ctr must be in [0, 1] (you set it to {0})".format(args.ctr))
    output_dir = os.path.dirname(os.path.abspath(args.output))
    manifest = RunManifest.start(
        output_dir, ["predict-popularity"] + list(args.argv), {}, 0,
        _corpus_files(args.data_dir) + [args.checkpoint],
    )
    model, vocab, entity_vocab, _ = load_checkpoint(args.checkpoint)
    no_ctr = bool(args.ablate_ctr or model.config.no_ctr)
    manifest.config = dict(model.config.to_dict(), ablate_ctr=no_ctr, ctr_override=args.ctr)
    manifest.seed = model.config.seed
    corpus = load_corpus(args.data_dir)
    articles, _, _ = preprocess_corpus(corpus.news, model.config, vocab, entity_vocab)
    store = FeatureStore.from_corpus(corpus, articles, model.config)

    if args.time is None:
        impressions = corpus.all_impressions
        if not impressions:
            raise DataFormatError("--time is required for a corpus without impressions")
        reference_time = max(imp.impression_time for imp in impressions)
    else:
        reference_time = args.time
    if articles and reference_time < min(a.publish_time for a in articles.values()):
        warnings.warn("reference time {0} precedes every publish time; recency is 0 for all "
                      "news".format(reference_time))

    table = model.popularity_table(store, reference_time, args.news or None, ctr=args.ctr,
                                   no_ctr=no_ctr)
    s_p = table["score"]
    spread = s_p.max() - s_p.min() if s_p.size else 0.0
    frame = pd.DataFrame(
        {
            "news": table["news"],
            "c_t": table["ctr"],
            "p_c": table["content"],
            "p_r": table["recency"],
            "theta": table["theta"],
            "s_p": s_p,
            "s_p_minmax": (s_p - s_p.min()) / spread if spread > 0 else np.zeros_like(s_p),
        }
    )
    frame.to_csv(args.output, sep="\t", index=False, lineterminator="\n", encoding="utf-8",
                 float_format="%.9g")
    manifest.finish([args.output])
    return 0


# -- parser -------------------------------------------------------------------


def _add_data_dir(parser):
    parser.add_argument("--data-dir", default=data_dir_default(),
                        help="corpus root, default: $PPREC_DATA_DIR or the working directory")


def _add_model_flags(parser):
    parser.add_argument("--config", help="ini or JSON configuration file")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int, dest="batch_size")
    parser.add_argument("--lr", type=float, dest="learning_rate")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--runs", type=int, help="train RUNS seeds (seed, seed+1, ...)")
    for name in ABLATIONS:
        parser.add_argument("--" + name.replace("_", "-"), dest=name, action="store_true",
                            default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pprec", description="Popularity-aware news recommendation"
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    gen = subparsers.add_parser("gen-data", help="generate a synthetic corpus")
    gen.add_argument("-o", "--output", default=data_dir_default())
    gen.add_argument("--users", type=int, default=GeneratorSettings.users)
    gen.add_argument("--news", type=int, default=GeneratorSettings.news)
    gen.add_argument("--impressions", type=int, default=GeneratorSettings.impressions)
    gen.add_argument("--pop-weight", type=float, default=GeneratorSettings.pop_weight,
                     dest="pop_weight", help="share of clicks driven by popularity")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--force", action="store_true", help="overwrite a non-empty output")
    gen.set_defaults(func=cmd_gen_data)

    pre = subparsers.add_parser("preprocess", help="build word and entity dictionaries")
    _add_data_dir(pre)
    pre.add_argument("--config", help="ini or JSON configuration file")
    pre.add_argument("-o", "--output", help="default: the data directory")
    pre.set_defaults(func=cmd_preprocess)

    tr = subparsers.add_parser("train", help="train and test the model")
    _add_data_dir(tr)
    _add_model_flags(tr)
    tr.add_argument("-o", "--output", default="pprec-run")
    tr.add_argument("--embeddings", help="pretrained word vectors, one 'token f1 .. fd' per line")
    tr.add_argument("--entity-embeddings", dest="entity_embeddings",
                    help="pretrained entity vectors in the same format")
    tr.add_argument("--quiet", action="store_true", help="no progress bars")
    tr.set_defaults(func=cmd_train)

    ev = subparsers.add_parser("evaluate", help="evaluate checkpoints or a baseline")
    _add_data_dir(ev)
    ev.add_argument("--checkpoint", action="append",
                    help="checkpoint file; repeat once per run")
    ev.add_argument("--baseline", choices=available_baselines())
    ev.add_argument("--config", help="configuration the checkpoints must match")
    ev.add_argument("--split", default="test", choices=["train", "valid", "test"])
    ev.add_argument("--cold-start", action="store_true", dest="cold_start")
    ev.add_argument("--diversity", action="store_true")
    ev.add_argument("--parallel", type=int, default=1, help="worker processes for metrics")
    ev.add_argument("-o", "--output", default="pprec-eval")
    ev.set_defaults(func=cmd_evaluate)

    pp = subparsers.add_parser("predict-popularity", help="per-news popularity breakdown")
    _add_data_dir(pp)
    pp.add_argument("--checkpoint", required=True)
    pp.add_argument("--time", type=int, help="reference time in epoch seconds, "
                    "default: the last impression")
    pp.add_argument("--news", nargs="+", help="restrict to these news ids")
    pp.add_argument("--ablate-ctr", action="store_true", dest="ablate_ctr",
                    help="drop the CTR term from s_p")
    pp.add_argument("--ctr", type=float, help="use this CTR for every news instead of the "
                    "windowed one")
    pp.add_argument("-o", "--output", default="popularity.tsv")
    pp.set_defaults(func=cmd_predict_popularity)
    return parser


def main(argv=None):
    """Run the ``pprec`` command; returns the exit code"""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv[1:]
    try:
        return args.func(args)
    except PPRecError as exc:
        sys.stderr.write("pprec {0}: error: {1}\n".format(args.command, exc))
        for error_class, code in EXIT_CODES:
            if isinstance(exc, error_class):
                return code
        return 1
