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
import math
import unittest

import inelegant.finder
import numpy as np

from cruzamento.planner import kinematic
from cruzamento.planner.kinematic import KinematicPlanner, arc_lengths
from cruzamento.rollout.candidates import GoalCandidate
from cruzamento.scenario import DT, T_S, VehicleState

from cruzamento_tests.reference import (
    PlannerReference, crossroad, straight_goal, straight_road)


class TestKinematicPlanner(PlannerReference):

    def get_planner(self):
        return KinematicPlanner()

    def test_reaches_goal(self):
        """
        The last state is at the goal distance along the route.
        """
        state = VehicleState(20, 0, 0, 10)

        trajectory = KinematicPlanner().plan(
            straight_road(), state, straight_goal(state, 80))

        np.testing.assert_allclose(
            (100, 0), trajectory.positions[-1], atol=1e-6)

    def test_joins_centerline(self):
        """
        A vehicle off the centerline ends up on it.
        """
        state = VehicleState(20, 0.8, 0, 10)

        trajectory = KinematicPlanner().plan(
            straight_road(), state, straight_goal(state, 80))

        self.assertAlmostEqual(0.8, trajectory.positions[0][1])
        self.assertAlmostEqual(0.0, trajectory.positions[-1][1], places=6)

    def test_follows_route(self):
        """
        Goals on another lane are reached along the route.
        """
        network = crossroad()
        state = VehicleState(10, 0, 0, 10)
        goal = GoalCandidate(
            1, (150, 0), 0, ('east_in', 'east_out'), 140)

        trajectory = KinematicPlanner().plan(network, state, goal)

        np.testing.assert_allclose(
            (150, 0), trajectory.positions[-1], atol=1e-6)
        self.assertTrue(np.allclose(trajectory.positions[:, 1], 0))

    def test_without_route(self):
        """
        A goal without a route is driven to straight ahead.
        """
        state = VehicleState(0, 0, math.pi / 2, 5)
        goal = GoalCandidate(1, (0, 40), math.pi / 2, (), 40)

        trajectory = KinematicPlanner().plan(straight_road(), state, goal)

        np.testing.assert_allclose(
            (0, 40), trajectory.positions[-1], atol=1e-6)


class TestArcLengths(unittest.TestCase):

    def test_constant_speed(self):
        """
        Covering exactly ``speed * duration`` keeps the speed.
        """
        s = arc_lengths(10.0, 10.0 * T_S * DT)

        np.testing.assert_allclose(np.arange(T_S + 1) * DT * 10.0, s)

    def test_monotonic_when_braking(self):
        """
        A vehicle braking to a short goal never drives backwards nor past
        the goal.
        """
        s = arc_lengths(14.0, 15.0)

        self.assertTrue(np.all(np.diff(s) >= 0))
        self.assertAlmostEqual(15.0, s[-1])
        self.assertLessEqual(s.max(), 15.0)

    def test_standing_still(self):
        """
        A stopped vehicle with no distance to cover stays put.
        """
        np.testing.assert_array_equal(
            np.zeros(T_S + 1), arc_lengths(0.0, 0.0))


load_tests = inelegant.finder.TestFinder(
    __name__,
    kinematic,
    skip=PlannerReference
).load_tests

if __name__ == "__main__":
    unittest.main()
