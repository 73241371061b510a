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

from cruzamento.roadnet.network import Connection, Lane, RoadNetwork
from cruzamento.rollout import candidates
from cruzamento.rollout.candidates import (
    GoalCandidate, GoalCandidateSet, band_distances, distance_band,
    sample_goal_candidates, stop_goal)
from cruzamento.scenario import VehicleState

from cruzamento_tests.reference import crossroad, straight_road


def fork():
    """
    Lane ``a`` splits into ``b``, straight on, and ``c``, turning left.
    """
    return RoadNetwork(
        lanes=[
            Lane('a', [(0, 0), (100, 0)], 3.5, 14),
            Lane('b', [(100, 0), (300, 0)], 3.5, 14),
            Lane('c', [(100, 0), (250, 150)], 3.5, 14)],
        connections=[Connection('a', 'b'), Connection('a', 'c')])


class TestDistanceBand(unittest.TestCase):

    def test_short_route(self):
        """
        The band never goes past the end of the route.
        """
        self.assertEqual((50.0, 80.0), distance_band(10.0, 80.0))

    def test_empty_band(self):
        """
        A route shorter than the lower end gives no distance.
        """
        low, high = distance_band(10.0, 20.0)

        self.assertGreater(low, high)
        self.assertEqual([], band_distances(low, high))

    def test_narrow_band(self):
        """
        A narrow band only gets its middle.
        """
        self.assertEqual([60.0], band_distances(50.0, 70.0))
        self.assertEqual([60.0, 40.0, 80.0], band_distances(40.0, 80.0))


class TestSampleGoalCandidates(unittest.TestCase):

    def test_follows_route(self):
        """
        Candidates lie on the route, across its junction.
        """
        candidates = sample_goal_candidates(
            crossroad(), VehicleState(10, 0, 0, 10))

        self.assertEqual(
            [('east_in', 'east_out')] * 3,
            [c.route for c in candidates])
        self.assertEqual(
            [120.0, 50.0, 190.0],
            [round(c.arc_distance, 6) for c in candidates])
        for candidate in candidates:
            self.assertAlmostEqual(0.0, candidate.position[1])

    def test_every_route_first(self):
        """
        Every route gets a candidate before any route gets a second one, and
        candidates in the same place are offered once.
        """
        candidates = sample_goal_candidates(
            fork(), VehicleState(0, 0, 0, 10), max_candidates=4)

        self.assertEqual(
            {('a', 'b'), ('a', 'c')}, {c.route for c in candidates[:2]})
        self.assertEqual([1, 2, 3], candidates.numbers)
        positions = np.array([c.position for c in candidates])
        for i in range(len(positions)):
            for j in range(i):
                self.assertGreater(
                    np.linalg.norm(positions[i] - positions[j]), 0.5)

    def test_max_candidates(self):
        """
        No more than ``max_candidates`` are offered.
        """
        candidates = sample_goal_candidates(
            fork(), VehicleState(0, 0, 0, 10), max_candidates=1)

        self.assertEqual(1, len(candidates))

    def test_routes_kept(self):
        """
        The set knows the route of each candidate.
        """
        candidates = sample_goal_candidates(
            fork(), VehicleState(0, 0, 0, 10))

        for candidate in candidates:
            self.assertEqual(
                candidate.route,
                tuple(candidates.route_of(candidate).lane_ids))

    def test_headings(self):
        """
        Candidates on the left turn head along the turn.
        """
        candidates = sample_goal_candidates(
            fork(), VehicleState(0, 0, 0, 10))
        turning = [c for c in candidates if c.route == ('a', 'c')
                   and c.arc_distance > 150]

        self.assertTrue(turning)
        for candidate in turning:
            self.assertAlmostEqual(np.pi / 4, candidate.heading, places=3)


class TestGoalCandidateSet(unittest.TestCase):

    def test_by_number(self):
        """
        Candidates are found by number.
        """
        candidate = GoalCandidate(4, (1, 2), 0, ('a',), 10)
        candidates = GoalCandidateSet([candidate])

        self.assertEqual(candidate, candidates.by_number(4))
        with self.assertRaises(KeyError):
            candidates.by_number(1)

    def test_renumbered(self):
        """
        Renumbering changes the number only.
        """
        candidate = GoalCandidate(4, (1, 2), 0, ('a',), 10)

        self.assertEqual(
            GoalCandidate(1, (1, 2), 0, ('a',), 10), candidate.renumbered(1))


class TestStopGoal(unittest.TestCase):

    def test_on_lane(self):
        """
        A vehicle on a lane stops along it after half the distance its speed
        would cover.
        """
        goal = stop_goal(straight_road(), VehicleState(10, 0, 0, 10))

        self.assertEqual(('east',), goal.route)
        self.assertAlmostEqual(60.0, goal.position[0])
        self.assertAlmostEqual(50.0, goal.arc_distance)

    def test_off_road(self):
        """
        A vehicle off the lanes stops straight ahead.
        """
        goal = stop_goal(straight_road(), VehicleState(10, 50, 0, 4))

        self.assertEqual((), goal.route)
        np.testing.assert_allclose((30.0, 50.0), goal.position)

    def test_short_lane(self):
        """
        The stop is never past the end of the route.
        """
        goal = stop_goal(straight_road(), VehicleState(290, 0, 0, 10))

        self.assertAlmostEqual(10.0, goal.arc_distance)


load_tests = inelegant.finder.TestFinder(
    __name__,
    candidates
).load_tests

if __name__ == "__main__":
    unittest.main()
