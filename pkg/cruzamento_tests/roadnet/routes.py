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

from cruzamento.errors import OffRoadError
from cruzamento.roadnet import routes
from cruzamento.roadnet.geometry import Polyline
from cruzamento.roadnet.network import Connection, Lane, RoadNetwork
from cruzamento.roadnet.routes import (
    enumerate_routes, lane_paths, match_start_lane, positions_along)
from cruzamento.scenario import VehicleState

from cruzamento_tests.reference import crossroad, straight_road


def chain(count):
    lanes = [
        Lane('l{0}'.format(i), [(50 * i, 0), (50 * (i + 1), 0)], 3.5, 13.9)
        for i in range(count)]
    connections = [
        Connection('l{0}'.format(i), 'l{0}'.format(i + 1))
        for i in range(count - 1)]
    return RoadNetwork(lanes, connections=connections)


class TestMatchStartLane(unittest.TestCase):

    def test_offset_along_lane(self):
        """
        The match should tell how far along the lane the vehicle is.
        """
        match = match_start_lane(straight_road(), VehicleState(42, 0.5, 0, 5))

        self.assertEqual('east', match.lane_id)
        self.assertAlmostEqual(42.0, match.offset)
        self.assertAlmostEqual(0.5, match.distance)

    def test_opposite_lanes_skipped(self):
        """
        A nearer lane going against the vehicle should not be matched.
        """
        network = RoadNetwork([
            Lane('b', [(0, 2), (100, 2)], 3.5, 13.9),
            Lane('a', [(100, -1), (0, -1)], 3.5, 13.9)])

        match = match_start_lane(network, VehicleState(50, 0, 0, 5))

        self.assertEqual('b', match.lane_id)

    def test_too_far(self):
        """
        Vehicles more than five meters from every lane are off road.
        """
        with self.assertRaises(OffRoadError):
            match_start_lane(straight_road(), VehicleState(50, -6, 0, 5))


class TestEnumerateRoutes(unittest.TestCase):

    def test_single_lane(self):
        """
        A lane without successors is a route by itself.
        """
        found = enumerate_routes(straight_road(), VehicleState(10, 0, 0, 5))

        self.assertEqual([('east',)], [r.lane_ids for r in found])
        self.assertAlmostEqual(290.0, found[0].length)

    def test_max_depth(self):
        """
        Routes should follow at most ``max_depth`` connections.
        """
        found = enumerate_routes(
            chain(6), VehicleState(10, 0, 0, 5), max_depth=2)

        self.assertEqual([('l0', 'l1', 'l2')], [r.lane_ids for r in found])

    def test_no_cycles(self):
        """
        Lanes should not be visited twice, even on a loop.
        """
        network = RoadNetwork(
            [Lane('a', [(0, 0), (50, 0)], 3.5, 13.9),
             Lane('b', [(50, 0), (50, 50)], 3.5, 13.9),
             Lane('c', [(50, 50), (0, 0)], 3.5, 13.9)],
            connections=[
                Connection('a', 'b'), Connection('b', 'c'),
                Connection('c', 'a')])

        self.assertEqual([('a', 'b', 'c')], lane_paths(network, 'a', 10))

    def test_routes_are_sorted(self):
        """
        Routes should come in lexicographic order of lane ids.
        """
        network = RoadNetwork(
            [Lane('a', [(0, 0), (50, 0)], 3.5, 13.9),
             Lane('z', [(50, 0), (100, 0)], 3.5, 13.9),
             Lane('m', [(50, 0), (50, 50)], 3.5, 13.9)],
            connections=[Connection('a', 'z'), Connection('a', 'm')])

        found = enumerate_routes(network, VehicleState(10, 0, 0, 5))

        self.assertEqual(
            [('a', 'm'), ('a', 'z')], [r.lane_ids for r in found])

    def test_route_path_is_drivable(self):
        """
        The path of a route should have its points at most a meter apart.
        """
        found = enumerate_routes(crossroad(), VehicleState(10, 0, 0, 5))
        steps = np.diff(found[0].polyline.cumulative)

        self.assertLessEqual(steps.max(), 1.0 + 1e-9)


class TestPositionsAlong(unittest.TestCase):

    def test_gap_closes(self):
        """
        A vehicle off the path should join it after the blending steps.
        """
        path = Polyline([(0, 0), (100, 0)])
        state = VehicleState(0, 1, 0, 10)

        positions = positions_along(path, np.arange(12.0), state, 10)

        self.assertEqual([0.0, 1.0], positions[0].tolist())
        self.assertAlmostEqual(0.5, positions[5][1])
        self.assertEqual([11.0, 0.0], positions[11].tolist())


load_tests = inelegant.finder.TestFinder(
    __name__,
    routes
).load_tests

if __name__ == "__main__":
    unittest.main()
