"""Small corpus and model geometry shared by the model tests
"""

import pandas as pd

from ..config import ModelConfig
from ..data.corpus import Corpus, ImpressionRecord, RawNews
from ..data.vocab import preprocess_corpus
from ..model.batch import FeatureStore
from ..train import build_model

T0 = 1600000000

TINY = dict(
    word_dim=6,
    entity_dim=4,
    num_heads=2,
    head_dim=3,
    query_dim=5,
    recency_dim=3,
    popularity_dim=3,
    popularity_hidden=4,
    gate_hidden=3,
    dropout=0.0,
    max_recency_hours=48,
    popularity_bins=10,
    min_word_freq=1,
    batch_size=4,
)

NEWS = [
    RawNews("N1", "Stocks rally again", ("Q1", "Q2"), T0, "finance"),
    RawNews("N2", "Team wins the cup", ("Q3",), T0 + 600, "sports"),
    RawNews("N3", "New phone released", (), T0 + 1200, "tech"),
    RawNews("N4", "Markets fall on rates", ("Q1",), T0 + 1800, "finance"),
]

EARLY_CLICKS = [("U1", "N1", T0 + 3600), ("U1", "N3", T0 + 5400)]

SPLITS = {
    "train": [
        ImpressionRecord("U1", T0 + 7200, (("N1", 0), ("N2", 1), ("N4", 0))),
        ImpressionRecord("U2", T0 + 7300, (("N2", 0), ("N4", 1), ("N3", 0))),
        ImpressionRecord("U1", T0 + 7400, (("N4", 1), ("N3", 0))),
    ],
    "valid": [
        ImpressionRecord("U2", T0 + 9000, (("N1", 1), ("N2", 0))),
    ],
    "test": [
        ImpressionRecord("U1", T0 + 10000, (("N1", 0), ("N2", 1), ("N3", 0), ("N4", 0))),
        ImpressionRecord("U2", T0 + 10100, (("N3", 1), ("N4", 0))),
    ],
}


def tiny_config(**overrides):
    return ModelConfig().replace(**TINY).replace(**overrides)


def tiny_corpus():
    clicks = list(EARLY_CLICKS)
    for name in ("train", "valid", "test"):
        for imp in SPLITS[name]:
            clicks.extend((imp.user_id, news_id, imp.impression_time) for news_id in imp.positives)
    return Corpus(
        news=dict((item.news_id, item) for item in NEWS),
        clicks=pd.DataFrame(clicks, columns=["user", "news", "ts"]),
        splits=dict((name, list(items)) for name, items in SPLITS.items()),
    )


def tiny_setup(config=None):
    """(corpus, store, model, vocab, entity_vocab) for ``config``"""
    config = config if config is not None else tiny_config()
    corpus = tiny_corpus()
    articles, vocab, entity_vocab = preprocess_corpus(corpus.news, config)
    store = FeatureStore.from_corpus(corpus, articles, config)
    model = build_model(config, vocab, entity_vocab)
    return corpus, store, model, vocab, entity_vocab
