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

"""`optim`
"""

import numpy as np

from ..errors import ConfigError, NumericError

__all__ = ["adam_step", "Adam"]


def adam_step(params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """Apply one bias-corrected Adam update to every parameter

    Each parameter carries its own first and second moment and step
    counter. Every call advances the counter of every parameter, including
    those whose gradient is zero, so a parameter that first receives a
    gradient late in training is bias-corrected with the global step count.
    Gradients are cleared after the update.

    Parameters
    ----------
    params : `list` of `Parameter`
        parameters to update in place

    lr : `float`
        learning rate, must be positive

    beta1 : `float`, optional, default: 0.9

    beta2 : `float`, optional, default: 0.999

    eps : `float`, optional, default: 1e-8
    """
    if lr <= 0:
        raise ConfigError("learning rate must be positive, got {0}".format(lr))
    for param in params:
        grad = param.gradient
        if not np.all(np.isfinite(grad)):
            raise NumericError("gradient of {0} contains non-finite values".format(param.name))
        param.adam_t += 1
        param.adam_m *= beta1
        param.adam_m += (1.0 - beta1) * grad
        param.adam_v *= beta2
        param.adam_v += (1.0 - beta2) * grad ** 2
        m_hat = param.adam_m / (1.0 - beta1 ** param.adam_t)
        v_hat = param.adam_v / (1.0 - beta2 ** param.adam_t)
        param.values -= lr * m_hat / (np.sqrt(v_hat) + eps)
        param.zero_grad()


class Adam(object):
    """Adam optimizer bound to a fixed list of parameters

    Parameters
    ----------
    params : `list` of `Parameter`

    lr : `float`, optional, default: 1e-4
    """

    def __init__(self, params, lr=1e-4, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def zero_grad(self):
        for param in self.params:
            param.zero_grad()

    def step(self):
        adam_step(self.params, self.lr, self.beta1, self.beta2, self.eps)
