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

"""`embeddings`
"""

import dataclasses
import os
import warnings

import numpy as np

from ..errors import DataFormatError

__all__ = ["EmbeddingFile", "load_embeddings", "embedding_matrix"]


@dataclasses.dataclass
class EmbeddingFile(object):
    """Pretrained vectors read from a text file"""

    vectors: dict
    dim: int

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, token):
        return token in self.vectors


def load_embeddings(path, expected_dim):
    """Read ``token f_1 ... f_d`` lines into an `EmbeddingFile`

    Parameters
    ----------
    path : `str`
        UTF-8 text file, one token and ``expected_dim`` floats per line

    expected_dim : `int`

    Raises
    ------
    DataFormatError
        naming the line of the first malformed or wrongly sized vector
    """
    if not os.path.isfile(path):
        raise DataFormatError("embedding file {0} does not exist".format(path))
    vectors = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.rstrip("\n").split(" ")
            if not line.strip():
                continue
            if len(parts) != expected_dim + 1:
                raise DataFormatError(
                    "{0}:{1}: expected {2} values after the token, found {3}".format(
                        path, lineno, expected_dim, len(parts) - 1
                    )
                )
            try:
                vectors[parts[0]] = np.array(parts[1:], dtype=np.float64)
            except ValueError:
                raise DataFormatError("{0}:{1}: cannot parse vector".format(path, lineno))
    return EmbeddingFile(vectors=vectors, dim=expected_dim)


def embedding_matrix(tokens, dim, rng, pretrained=None, std=0.1):
    """Initial embedding table for ``tokens`` (row ``i`` is token ``i``)

    Row 0 is padding and starts at zero. Tokens found in ``pretrained``
    copy their vector; the rest are drawn from N(0, std**2) with ``rng``.

    Parameters
    ----------
    tokens : `list` of `str`
        id-ordered tokens, index 0 being the padding/unknown entry

    dim : `int`

    rng : `numpy.random.Generator`

    pretrained : `EmbeddingFile`, optional

    Returns
    -------
    table : `numpy.ndarray`
        shape ``(len(tokens), dim)``
    """
    table = rng.normal(0.0, std, size=(len(tokens), dim))
    table[0] = 0.0
    if pretrained is None:
        return table
    if pretrained.dim != dim:
        raise DataFormatError(
            "pretrained vectors have dimension {0}, the model needs {1}".format(
                pretrained.dim, dim
            )
        )
    missing = 0
    for idx, token in enumerate(tokens[1:], start=1):
        vector = pretrained.vectors.get(token)
        if vector is None:
            missing += 1
        else:
            table[idx] = vector
    if missing:
        warnings.warn(
            "{0} of {1} tokens have no pretrained vector and were randomly "
            "initialized".format(missing, len(tokens) - 1)
        )
    return table
