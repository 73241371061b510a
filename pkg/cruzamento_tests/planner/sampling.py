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
import numpy as np

from cruzamento.planner import sampling
from cruzamento.planner.sampling import seeded_generator
from cruzamento.scenario import VehicleState

from cruzamento_tests.reference import (
    PlannerReference, straight_goal, straight_road, tiny_planner)


class TestDiffusionPlanner(PlannerReference):

    def get_planner(self):
        return tiny_planner()

    def test_seeds_differ(self):
        """
        Different noise seeds give different plans.
        """
        planner = tiny_planner()
        state = VehicleState(20, 0, 0, 10)
        goal = straight_goal(state, 100)

        first = planner.plan(straight_road(), state, goal, 1)
        second = planner.plan(straight_road(), state, goal, 2)

        self.assertFalse(np.allclose(first.array, second.array))

    def test_first_state_exact(self):
        """
        The plan starts exactly at the initial state, heading included.
        """
        state = VehicleState(20, 1, 0.3, 10)

        trajectory = tiny_planner().plan(
            straight_road(), state, straight_goal(state, 100), 5)

        np.testing.assert_array_equal(
            np.array(state), trajectory.array[0])

    def test_without_map(self):
        """
        A planner whose model ignores the map still plans.
        """
        state = VehicleState(20, 0, 0, 10)

        trajectory = tiny_planner(use_map=False).plan(
            straight_road(), state, straight_goal(state, 100), 3)

        self.assertTrue(np.all(np.isfinite(trajectory.array)))


class TestSeededGenerator(unittest.TestCase):

    def test_large_and_negative_seeds(self):
        """
        Any integer seeds a generator, and seeds equal modulo 2**63 give the
        same stream.
        """
        first = seeded_generator(-1).initial_seed()
        second = seeded_generator(2 ** 63 - 1).initial_seed()

        self.assertEqual(first, second)
        self.assertEqual(5, seeded_generator(2 ** 63 + 5).initial_seed())


load_tests = inelegant.finder.TestFinder(
    __name__,
    sampling,
    skip=PlannerReference
).load_tests

if __name__ == "__main__":
    unittest.main()
