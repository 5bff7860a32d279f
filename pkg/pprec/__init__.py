#!/usr/bin/env python
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

"""pprec: popularity-aware news recommendation
"""

from ._version import __version__

__version__ = __version__
__author__ = "the pprec developers"
