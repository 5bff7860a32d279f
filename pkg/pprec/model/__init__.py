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

"""The ranking model and its building blocks
"""

from .layers import Module, Dense, Embedding, TwoLayerNet, Gate  # noqa: F401
from .layers import MultiHeadAttention, AttentionPooling  # noqa: F401
from .news_encoder import NewsBatch, NewsEncoder, news_batch  # noqa: F401
from .popularity import PopularityBreakdown, PopularityPredictor  # noqa: F401
from .user_encoder import UserEncoder  # noqa: F401
from .batch import Batch, FeatureStore, build_batch, sample_training_pairs  # noqa: F401
from .ranker import PPRec, RankingBreakdown, bpr_loss, combine_scores, matching_score  # noqa: F401
from .checkpoint import load_checkpoint, save_checkpoint  # noqa: F401
