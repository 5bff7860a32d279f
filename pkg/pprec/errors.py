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

"""`errors`
"""

__all__ = [
    "PPRecError",
    "ConfigError",
    "DataFormatError",
    "DimensionError",
    "ContractError",
    "NumericError",
    "EXIT_CODES",
]


class PPRecError(Exception):
    """Base class of every error raised by pprec"""


class ConfigError(PPRecError, ValueError):
    """Invalid configuration or configuration/checkpoint mismatch"""


class DataFormatError(PPRecError, ValueError):
    """Malformed or empty input data"""


class DimensionError(PPRecError, ValueError):
    """Tensor shapes do not conform"""


class ContractError(PPRecError, ValueError):
    """A precondition of an operation was violated"""


class NumericError(PPRecError, FloatingPointError):
    """Non-finite values appeared where finite ones are required"""


# exit codes of the command line interface, checked in order
EXIT_CODES = [
    (ConfigError, 2),
    (DataFormatError, 3),
    (DimensionError, 4),
    (ContractError, 4),
    (NumericError, 5),
]
