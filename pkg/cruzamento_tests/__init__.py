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
import unittest

import inelegant.finder

import cruzamento.prompts

import cruzamento_tests.assets
import cruzamento_tests.cli
import cruzamento_tests.config
import cruzamento_tests.cornercase
import cruzamento_tests.errors
import cruzamento_tests.gateway
import cruzamento_tests.interfaces
import cruzamento_tests.mapsynth
import cruzamento_tests.metrics
import cruzamento_tests.planner
import cruzamento_tests.raster
import cruzamento_tests.roadnet
import cruzamento_tests.rollout
import cruzamento_tests.runner
import cruzamento_tests.scenario

load_tests = inelegant.finder.TestFinder(
    '../readme.rst',
    cruzamento.prompts,
    cruzamento_tests.errors,
    cruzamento_tests.config,
    cruzamento_tests.interfaces,
    cruzamento_tests.scenario,
    cruzamento_tests.roadnet,
    cruzamento_tests.raster,
    cruzamento_tests.mapsynth,
    cruzamento_tests.assets,
    cruzamento_tests.gateway,
    cruzamento_tests.planner,
    cruzamento_tests.rollout,
    cruzamento_tests.metrics,
    cruzamento_tests.cornercase,
    cruzamento_tests.runner,
    cruzamento_tests.cli
).load_tests

if __name__ == "__main__":
    unittest.main()
