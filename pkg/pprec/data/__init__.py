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

"""Corpus records, preprocessing, CTR statistics and synthetic corpora
"""

from .corpus import (  # noqa: F401
    RawNews,
    NewsArticle,
    ImpressionRecord,
    UserHistory,
    ClickLog,
    Corpus,
    SPLITS,
    build_user_history,
    split_by_time,
    load_corpus,
    write_corpus,
)
from .vocab import (  # noqa: F401
    tokenize,
    Vocabulary,
    EntityVocabulary,
    build_vocabulary,
    build_entity_vocabulary,
    preprocess_news,
    preprocess_corpus,
)
from .ctr import (  # noqa: F401
    CtrIndex,
    CtrSnapshot,
    compute_ctr,
    quantize_recency,
    quantize_popularity,
)
from .embeddings import EmbeddingFile, load_embeddings, embedding_matrix  # noqa: F401
from .synthetic import (  # noqa: F401
    GeneratorSettings,
    SyntheticCorpusGenerator,
    generate_synthetic_corpus,
)
