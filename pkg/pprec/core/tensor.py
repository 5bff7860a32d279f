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

"""`tensor`

Dense float64 tensors with tape-based reverse-mode differentiation.

Operations are recorded on the `Tape` that is active in the calling thread
whenever at least one input requires a gradient. Without an active tape the
same functions are plain numpy computations, which is what inference uses.
"""

import threading

import numpy as np
import scipy.special as ss

from ..errors import ConfigError, ContractError, DimensionError, NumericError

__all__ = [
    "Tensor",
    "Parameter",
    "Tape",
    "backward",
    "add",
    "sub",
    "mul",
    "scale",
    "matmul",
    "transpose",
    "reshape",
    "tanh",
    "sigmoid",
    "log_sigmoid",
    "softmax_rows",
    "concat",
    "sum_",
    "take",
    "elementwise",
    "dropout_mask",
    "dropout",
    "check_finite",
]

_STATE = threading.local()


class Tensor(object):
    """A dense row-major array of 64-bit floats

    Parameters
    ----------
    values : `array_like`
        data of the tensor, converted to ``float64``

    requires_grad : `bool`, optional, default: `False`
        whether operations on this tensor are recorded for differentiation
    """

    def __init__(self, values, requires_grad=False):
        self.values = np.asarray(values, dtype=np.float64)
        self.requires_grad = requires_grad
        self.gradient = None

    def __repr__(self):
        return "<Tensor shape={0}, requires_grad={1}>".format(self.shape, self.requires_grad)

    @property
    def shape(self):
        return self.values.shape

    @property
    def ndim(self):
        return self.values.ndim

    @property
    def size(self):
        return self.values.size

    def item(self):
        return float(self.values.reshape(-1)[0])

    def numpy(self):
        return self.values

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)


class Parameter(Tensor):
    """A trainable tensor with its gradient and Adam moments

    Parameters
    ----------
    values : `array_like`
        initial values

    name : `str`
        unique name of the parameter inside its model, used by checkpoints
    """

    def __init__(self, values, name):
        super(Parameter, self).__init__(np.array(values, dtype=np.float64), requires_grad=True)
        self.name = name
        self.gradient = np.zeros_like(self.values)
        self.adam_m = np.zeros_like(self.values)
        self.adam_v = np.zeros_like(self.values)
        self.adam_t = 0

    def __repr__(self):
        return "<Parameter {0} shape={1}>".format(self.name, self.shape)

    def zero_grad(self):
        self.gradient[...] = 0.0


class _Record(object):
    __slots__ = ("output", "inputs", "backward")

    def __init__(self, output, inputs, backward):
        self.output = output
        self.inputs = inputs
        self.backward = backward


class Tape(object):
    """Ordered record of differentiable operations

    Use as a context manager; operations executed inside the ``with`` block
    in the same thread are appended in execution order, which is a
    topological order of the computation graph.

    >>> with Tape() as tape:
    ...     loss = sum_(mul(w, x))
    >>> backward(tape, loss)
    """

    def __init__(self):
        self.records = []

    def __len__(self):
        return len(self.records)

    def __enter__(self):
        stack = getattr(_STATE, "tapes", None)
        if stack is None:
            stack = _STATE.tapes = []
        stack.append(self)
        return self

    def __exit__(self, *exc):
        _STATE.tapes.pop()
        return False


def _active_tape():
    stack = getattr(_STATE, "tapes", None)
    if not stack:
        return None
    return stack[-1]


def _record(output, inputs, backward_fn):
    tape = _active_tape()
    if tape is None or not any(inp.requires_grad for inp in inputs):
        return output
    output.requires_grad = True
    tape.records.append(_Record(output, inputs, backward_fn))
    return output


def backward(tape, loss):
    """Propagate d(loss)/d(input) through every operation on ``tape``

    Gradients are accumulated into ``Parameter.gradient`` (callers clear
    them, `adam_step` does so after updating). Leaf tensors created with
    ``requires_grad=True`` receive their gradient in ``Tensor.gradient``.

    Parameters
    ----------
    tape : `Tape`
        tape on which ``loss`` was computed

    loss : `Tensor`
        scalar result of taped operations

    Returns
    -------
    params : `list` of `Parameter`
        the parameters reached from ``loss``
    """
    if loss.size != 1:
        raise ContractError("backward needs a scalar loss, got shape {0}".format(loss.shape))
    if not loss.requires_grad:
        return []

    produced = set(id(rec.output) for rec in tape.records)
    grads = {id(loss): np.ones_like(loss.values)}
    leaves = {}
    for rec in reversed(tape.records):
        grad = grads.pop(id(rec.output), None)
        if grad is None:
            continue
        for inp, inp_grad in zip(rec.inputs, rec.backward(grad)):
            if inp_grad is None or not inp.requires_grad:
                continue
            key = id(inp)
            if key in grads:
                grads[key] = grads[key] + inp_grad
            else:
                grads[key] = inp_grad
            if key not in produced:
                leaves[key] = inp

    reached = []
    for key, leaf in leaves.items():
        if isinstance(leaf, Parameter):
            leaf.gradient += grads[key]
            reached.append(leaf)
        elif leaf.gradient is None:
            leaf.gradient = grads[key]
        else:
            leaf.gradient = leaf.gradient + grads[key]
    return reached


# -- helpers ------------------------------------------------------------------


def _as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` after numpy broadcasting"""
    if grad.shape == shape:
        return grad
    ndim_extra = grad.ndim - len(shape)
    if ndim_extra > 0:
        grad = grad.sum(axis=tuple(range(ndim_extra)))
    axes = tuple(ii for ii, extent in enumerate(shape) if extent == 1 and grad.shape[ii] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _broadcast_shape(a, b, opname):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(
            "{0}: shapes {1} and {2} do not conform".format(opname, a.shape, b.shape)
        )


def check_finite(tensor, what="tensor"):
    """Raise `NumericError` if ``tensor`` holds NaN or inf"""
    values = tensor.values if isinstance(tensor, Tensor) else np.asarray(tensor)
    if not np.all(np.isfinite(values)):
        raise NumericError("{0} contains non-finite values".format(what))


# -- elementwise ----------------------------------------------------------------


def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a, b, "add")
    out = Tensor(a.values + b.values)
    return _record(out, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a, b, "sub")
    out = Tensor(a.values - b.values)
    return _record(out, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a, b, "mul")
    out = Tensor(a.values * b.values)

    def _backward(g):
        return (_unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape))

    return _record(out, (a, b), _backward)


def scale(a, factor):
    a = _as_tensor(a)
    factor = float(factor)
    out = Tensor(a.values * factor)
    return _record(out, (a,), lambda g: (g * factor,))


def tanh(a):
    a = _as_tensor(a)
    out = Tensor(np.tanh(a.values))
    return _record(out, (a,), lambda g: (g * (1.0 - out.values ** 2),))


def sigmoid(a):
    a = _as_tensor(a)
    out = Tensor(ss.expit(a.values))
    return _record(out, (a,), lambda g: (g * out.values * (1.0 - out.values),))


def log_sigmoid(a):
    """log(sigmoid(a)) without overflow for large negative ``a``"""
    a = _as_tensor(a)
    out = Tensor(ss.log_expit(a.values))
    return _record(out, (a,), lambda g: (g * ss.expit(-a.values),))


# -- structural -----------------------------------------------------------------


def matmul(a, b):
    """Matrix product over the last two axes, broadcasting leading axes

    Raises
    ------
    DimensionError
        if either operand has fewer than two axes or the inner extents differ
    """
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(
            "matmul: cannot multiply shapes {0} and {1}".format(a.shape, b.shape)
        )
    try:
        np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    except ValueError:
        raise DimensionError(
            "matmul: batch axes of {0} and {1} do not conform".format(a.shape, b.shape)
        )
    out = Tensor(np.matmul(a.values, b.values))

    def _backward(g):
        if b.ndim == 2:
            grad_a = np.matmul(g, b.values.T)
            grad_b = a.values.reshape(-1, a.shape[-1]).T @ _flat_rows(g, a, b)
        elif a.ndim == 2:
            grad_a = np.matmul(g, np.swapaxes(b.values, -1, -2))
            grad_b = np.matmul(a.values.T, g)
        else:
            grad_a = np.matmul(g, np.swapaxes(b.values, -1, -2))
            grad_b = np.matmul(np.swapaxes(a.values, -1, -2), g)
        return (_unbroadcast(grad_a, a.shape), _unbroadcast(grad_b, b.shape))

    return _record(out, (a, b), _backward)


def _flat_rows(g, a, b):
    # g has the batch axes of a whenever b is a plain matrix
    return np.broadcast_to(g, a.shape[:-1] + (b.shape[-1],)).reshape(-1, b.shape[-1])


def transpose(a, axes):
    a = _as_tensor(a)
    axes = tuple(axes)
    if sorted(axes) != list(range(a.ndim)):
        raise DimensionError("transpose: axes {0} invalid for shape {1}".format(axes, a.shape))
    inverse = tuple(np.argsort(axes))
    out = Tensor(np.transpose(a.values, axes))
    return _record(out, (a,), lambda g: (np.transpose(g, inverse),))


def reshape(a, shape):
    a = _as_tensor(a)
    try:
        values = a.values.reshape(shape)
    except ValueError:
        raise DimensionError("reshape: cannot view shape {0} as {1}".format(a.shape, shape))
    out = Tensor(values)
    return _record(out, (a,), lambda g: (g.reshape(a.shape),))


def concat(tensors, axis=0):
    tensors = [_as_tensor(t) for t in tensors]
    if not tensors:
        raise ContractError("concat needs at least one tensor")
    ndim = tensors[0].ndim
    axis = axis % ndim if ndim else 0
    for t in tensors[1:]:
        if t.ndim != ndim or any(
            t.shape[ii] != tensors[0].shape[ii] for ii in range(ndim) if ii != axis
        ):
            raise DimensionError(
                "concat: shapes {0} do not conform along axis {1}".format(
                    [x.shape for x in tensors], axis
                )
            )
    out = Tensor(np.concatenate([t.values for t in tensors], axis=axis))
    splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]
    return _record(out, tuple(tensors), lambda g: tuple(np.split(g, splits, axis=axis)))


def sum_(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    out = Tensor(np.sum(a.values, axis=axis, keepdims=keepdims))

    def _backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _record(out, (a,), _backward)


def take(a, indices):
    """Gather rows of ``a`` (along axis 0) for an integer array of ``indices``

    The output has shape ``indices.shape + a.shape[1:]``; the gradient is
    scattered back with repeated rows accumulated.
    """
    a = _as_tensor(a)
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= a.shape[0]):
        raise ContractError(
            "take: indices outside [0, {0}) for shape {1}".format(a.shape[0], a.shape)
        )
    out = Tensor(a.values[indices])

    def _backward(g):
        grad = np.zeros_like(a.values)
        np.add.at(grad, indices, g)
        return (grad,)

    return _record(out, (a,), _backward)


def softmax_rows(x, mask=None):
    """Softmax along the last axis with per-row max subtraction

    Parameters
    ----------
    x : `Tensor`
        logits, any number of leading axes

    mask : `numpy.ndarray` of `bool`, optional
        broadcastable to ``x.shape``; masked entries get weight exactly 0 and
        a row without any valid entry is all zeros

    Returns
    -------
    weights : `Tensor`
        non-negative rows summing to 1 (or 0 for fully masked rows)
    """
    x = _as_tensor(x)
    values = x.values
    if mask is None:
        shifted = values - values.max(axis=-1, keepdims=True)
        expd = np.exp(shifted)
        weights = expd / expd.sum(axis=-1, keepdims=True)
    else:
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), values.shape)
        masked = np.where(mask, values, -np.inf)
        row_max = masked.max(axis=-1, keepdims=True)
        row_max = np.where(np.isfinite(row_max), row_max, 0.0)
        expd = np.exp(masked - row_max)
        total = expd.sum(axis=-1, keepdims=True)
        weights = np.divide(expd, total, out=np.zeros_like(expd), where=total > 0)
    out = Tensor(weights)

    def _backward(g):
        y = out.values
        return (y * (g - np.sum(g * y, axis=-1, keepdims=True)),)

    return _record(out, (x,), _backward)


_ELEMENTWISE = {
    "tanh": tanh,
    "sigmoid": sigmoid,
    "add": add,
    "mul": mul,
    "scale": scale,
    "concat": lambda *args, **kwargs: concat(args, **kwargs),
}


def elementwise(op, *args, **kwargs):
    """Dispatch one of the elementwise operations by name

    Examples
    --------
    >>> elementwise("concat", Tensor([1, 2]), Tensor([3]), axis=0).values
    array([1., 2., 3.])
    """
    try:
        function = _ELEMENTWISE[op]
    except KeyError:
        raise ContractError(
            "Unknown elementwise operation {0!r}. Known operations are "
            "{1}".format(op, sorted(_ELEMENTWISE))
        )
    return function(*args, **kwargs)


# -- dropout --------------------------------------------------------------------


def dropout_mask(shape, rate, rng, training=True):
    """Inverted-dropout mask

    Entries are 0 with probability ``rate`` and ``1 / (1 - rate)`` otherwise
    in training mode; all ones in evaluation mode.

    Raises
    ------
    ConfigError
        if ``rate`` is outside [0, 1)
    """
    if not 0.0 <= rate < 1.0:
        raise ConfigError("dropout rate must be in [0, 1), got {0}".format(rate))
    if not training or rate == 0.0:
        return Tensor(np.ones(shape))
    keep = rng.random(shape) >= rate
    return Tensor(keep / (1.0 - rate))


def dropout(x, rate, rng, training=True):
    if not training or rate == 0.0:
        if not 0.0 <= rate < 1.0:
            raise ConfigError("dropout rate must be in [0, 1), got {0}".format(rate))
        return x
    return mul(x, dropout_mask(x.shape, rate, rng, training=True))
