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

"""`layers`

Building blocks shared by the encoders: dense layers, embeddings,
multi-head attention, additive attention pooling and sigmoid gates.
All forward passes take batched tensors; masks are boolean arrays where
`True` marks a real (non-padding) position.
"""

import numpy as np

from ..core import tensor as T
from ..errors import ContractError

__all__ = [
    "Module",
    "glorot",
    "Dense",
    "Embedding",
    "TwoLayerNet",
    "Gate",
    "MultiHeadAttention",
    "AttentionPooling",
]


def glorot(rng, fan_in, fan_out):
    """Glorot-uniform initial weights of shape ``(fan_in, fan_out)``"""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Module(object):
    """Owner of named `Parameter` objects and child modules

    Parameters are named ``<prefix>.<name>``; `parameters` returns them in
    registration order, children after their parent's own parameters.
    """

    def __init__(self, prefix):
        self.prefix = prefix
        self._params = []
        self._children = []

    def param(self, name, values):
        param = T.Parameter(values, "{0}.{1}".format(self.prefix, name))
        self._params.append(param)
        return param

    def child(self, module):
        self._children.append(module)
        return module

    def parameters(self):
        params = list(self._params)
        for module in self._children:
            params.extend(module.parameters())
        return params

    def named_parameters(self):
        return dict((param.name, param) for param in self.parameters())


class Dense(Module):
    """``x W + b`` over the last axis, optionally followed by tanh"""

    def __init__(self, in_dim, out_dim, rng, prefix, bias=True, activation=None):
        super(Dense, self).__init__(prefix)
        self.weight = self.param("weight", glorot(rng, in_dim, out_dim))
        self.bias = self.param("bias", np.zeros(out_dim)) if bias else None
        if activation not in (None, "tanh"):
            raise ValueError("Unknown activation {0!r}".format(activation))
        self.activation = activation

    def __call__(self, x):
        if x.ndim == 1:
            out = T.reshape(T.matmul(T.reshape(x, (1, -1)), self.weight), (-1,))
        else:
            out = T.matmul(x, self.weight)
        if self.bias is not None:
            out = T.add(out, self.bias)
        if self.activation == "tanh":
            out = T.tanh(out)
        return out


class Embedding(Module):
    """Lookup table; rows are gathered with `tensor.take`"""

    def __init__(self, table, prefix):
        super(Embedding, self).__init__(prefix)
        self.table = self.param("table", table)

    @property
    def num_embeddings(self):
        return self.table.shape[0]

    def __call__(self, ids):
        return T.take(self.table, ids)


class TwoLayerNet(Module):
    """Dense network ``in -> hidden (tanh) -> out`` with a linear output"""

    def __init__(self, in_dim, hidden_dim, out_dim, rng, prefix):
        super(TwoLayerNet, self).__init__(prefix)
        self.hidden = self.child(Dense(in_dim, hidden_dim, rng, prefix + ".hidden",
                                       activation="tanh"))
        self.output = self.child(Dense(hidden_dim, out_dim, rng, prefix + ".output"))

    def __call__(self, x):
        return self.output(self.hidden(x))


class Gate(Module):
    """Sigmoid gate with a scalar output per row

    Two-layer (tanh hidden) by default; ``single_layer=True`` gives the
    plain affine gate ``sigmoid(x W + b)``.

    Returns a tensor shaped like ``x`` without its last axis.
    """

    def __init__(self, in_dim, hidden_dim, rng, prefix, single_layer=False):
        super(Gate, self).__init__(prefix)
        if single_layer:
            self.net = self.child(Dense(in_dim, 1, rng, prefix + ".output"))
        else:
            self.net = self.child(TwoLayerNet(in_dim, hidden_dim, 1, rng, prefix))
        self.single_layer = single_layer

    def __call__(self, x):
        logits = self.net(x)
        return T.sigmoid(T.reshape(logits, logits.shape[:-1]))


class MultiHeadAttention(Module):
    """Scaled dot-product attention with ``num_heads`` heads and no bias

    Queries are projected from the query sequence and keys/values from the
    context sequence; self-attention passes the same sequence twice.

    Parameters
    ----------
    query_dim : `int`
        width of the query sequence

    context_dim : `int`
        width of the context sequence

    num_heads : `int`

    head_dim : `int`

    rng : `numpy.random.Generator`

    prefix : `str`
    """

    def __init__(self, query_dim, context_dim, num_heads, head_dim, rng, prefix):
        super(MultiHeadAttention, self).__init__(prefix)
        out_dim = num_heads * head_dim
        self.num_heads = num_heads
        self.head_dim = head_dim
        self.w_query = self.param("w_query", glorot(rng, query_dim, out_dim))
        self.w_key = self.param("w_key", glorot(rng, context_dim, out_dim))
        self.w_value = self.param("w_value", glorot(rng, context_dim, out_dim))

    def _heads(self, x):
        batch, length = x.shape[0], x.shape[1]
        x = T.reshape(x, (batch, length, self.num_heads, self.head_dim))
        return T.transpose(x, (0, 2, 1, 3))

    def __call__(self, query, context, context_mask=None):
        """Attend from ``query`` (B, Lq, dq) over ``context`` (B, Lc, dc)

        Returns
        -------
        out : `Tensor`
            shape (B, Lq, num_heads * head_dim)

        weights : `Tensor`
            shape (B, num_heads, Lq, Lc); fully masked rows are zero
        """
        squeeze = query.ndim == 2
        if squeeze:
            query = T.reshape(query, (1,) + query.shape)
            context = T.reshape(context, (1,) + context.shape)
            if context_mask is not None:
                context_mask = np.asarray(context_mask)[None, :]
        if query.shape[1] == 0 or context.shape[1] == 0:
            raise ContractError(
                "attention over an empty sequence (query {0}, context {1})".format(
                    query.shape, context.shape
                )
            )
        batch, q_len = query.shape[0], query.shape[1]
        q = self._heads(T.matmul(query, self.w_query))
        k = self._heads(T.matmul(context, self.w_key))
        v = self._heads(T.matmul(context, self.w_value))
        scores = T.scale(T.matmul(q, T.transpose(k, (0, 1, 3, 2))), 1.0 / np.sqrt(self.head_dim))
        mask = None
        if context_mask is not None:
            mask = np.asarray(context_mask, dtype=bool)[:, None, None, :]
        weights = T.softmax_rows(scores, mask)
        out = T.transpose(T.matmul(weights, v), (0, 2, 1, 3))
        out = T.reshape(out, (batch, q_len, self.num_heads * self.head_dim))
        if squeeze:
            out = T.reshape(out, out.shape[1:])
        return out, weights


class AttentionPooling(Module):
    """Additive attention ``alpha_i ~ exp(q . tanh(W x_i))`` over a sequence"""

    def __init__(self, in_dim, query_dim, rng, prefix):
        super(AttentionPooling, self).__init__(prefix)
        self.weight = self.param("weight", glorot(rng, in_dim, query_dim))
        self.query = self.param("query", glorot(rng, query_dim, 1))

    def __call__(self, x, mask=None):
        """Pool ``x`` (B, L, d) into (B, d)

        Returns
        -------
        pooled : `Tensor`
            shape (B, d); zero for rows whose mask is all `False`

        alpha : `Tensor`
            shape (B, L)
        """
        squeeze = x.ndim == 2
        if squeeze:
            x = T.reshape(x, (1,) + x.shape)
            if mask is not None:
                mask = np.asarray(mask)[None, :]
        batch, length, dim = x.shape
        if length == 0:
            raise ContractError("attention pooling over an empty sequence")
        logits = T.matmul(T.tanh(T.matmul(x, self.weight)), self.query)
        alpha = T.softmax_rows(T.reshape(logits, (batch, length)), mask)
        pooled = T.reshape(T.matmul(T.reshape(alpha, (batch, 1, length)), x), (batch, dim))
        if squeeze:
            pooled = T.reshape(pooled, (dim,))
            alpha = T.reshape(alpha, (length,))
        return pooled, alpha
