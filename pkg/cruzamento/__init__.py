#!/usr/bin/env python
#
# Copyright 2026 the Cruzamento developers
#
# This file is part of Cruzamento.
#
# Cruzamento is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# Cruzamento is distributed in the hope that it will be useful, but WITHOUT ANY
# WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
# A PARTICULAR PURPOSE. See the GNU Lesser General Public License for more
# details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with Cruzamento.  If not, see <http://www.gnu.org/licenses/>.
"""
Cruzamento generates traffic scenarios: road networks, the vehicles on them and
ten seconds of trajectories for each vehicle, plus the corner cases that make a
given driving policy fail.
"""
from pkgutil import extend_path
__path__ = extend_path(__path__, __name__)
