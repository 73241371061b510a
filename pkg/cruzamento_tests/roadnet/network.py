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

from cruzamento.errors import DanglingReference, GeometryViolation
from cruzamento.roadnet import network
from cruzamento.roadnet.network import (
    Connection, Junction, Lane, RoadNetwork, network_from_dict,
    network_to_dict)

from cruzamento_tests.reference import crossroad, straight_road


class TestRoadNetwork(unittest.TestCase):

    def test_element_order_does_not_matter(self):
        """
        Networks with the same elements should be equal whatever the order
        the elements were given in.
        """
        a = Lane('a', [(0, 0), (50, 0)], 3.5, 13.9)
        b = Lane('b', [(50, 0), (100, 0)], 3.5, 13.9)
        c1, c2 = Connection('a', 'b'), Connection('b', 'a')

        self.assertEqual(
            RoadNetwork([a, b], connections=[c1, c2]),
            RoadNetwork([b, a], connections=[c2, c1]))

    def test_duplicate_connections_are_merged(self):
        """
        A connection given twice should be kept once.
        """
        network = RoadNetwork(
            [Lane('a', [(0, 0), (50, 0)], 3.5, 13.9),
             Lane('b', [(50, 0), (100, 0)], 3.5, 13.9)],
            connections=[Connection('a', 'b'), Connection('a', 'b')])

        self.assertEqual(1, len(network.connections))

    def test_predecessors(self):
        """
        The predecessors of a lane are the lanes connected into it.
        """
        network = crossroad()

        self.assertEqual(['east_in'], network.predecessors('east_out'))
        self.assertEqual([], network.predecessors('east_in'))

    def test_check_references(self):
        """
        ``check_references()`` should raise on the first dangling reference.
        """
        network = RoadNetwork(
            [Lane('a', [(0, 0), (50, 0)], 3.5, 13.9)],
            [Junction('J', incoming=['a', 'ghost'])])

        with self.assertRaises(DanglingReference) as context:
            network.check_references()
        self.assertEqual('ghost', context.exception.missing_id)

    def test_invalid_speed_limit(self):
        """
        Lanes need a positive speed limit.
        """
        with self.assertRaises(GeometryViolation):
            Lane('a', [(0, 0), (5, 0)], 3.5, 0)


class TestValidate(unittest.TestCase):

    def test_valid_templates(self):
        """
        The fixtures are valid networks.
        """
        self.assertTrue(straight_road().validate().is_empty)
        self.assertTrue(crossroad().validate().is_empty)

    def test_degenerate_lane(self):
        """
        Lanes shorter than a meter should be reported.
        """
        network = RoadNetwork([
            Lane('a', [(0, 0), (50, 0)], 3.5, 13.9),
            Lane('tiny', [(50, 0), (50.5, 0)], 3.5, 13.9)])

        report = network.validate()

        self.assertEqual(['tiny'], [
            v.element_ids[0] for v in report.of_kind('degenerate')])

    def test_disconnected_groups(self):
        """
        Lanes that neither connect nor touch should form separate groups.
        """
        network = RoadNetwork([
            Lane('a', [(0, 0), (50, 0)], 3.5, 13.9),
            Lane('b', [(0, 100), (50, 100)], 3.5, 13.9)])

        report = network.validate()

        self.assertEqual(1, len(report.of_kind('disconnected')))
        self.assertEqual(
            [['a'], ['b']], report.of_kind('disconnected')[0].value)

    def test_adjacent_lanes_are_one_group(self):
        """
        Parallel lanes side by side are one road, even without connections.
        """
        self.assertEqual(
            [['east', 'west']], straight_road().road_groups())

    def test_dangling_reported_not_raised(self):
        """
        ``validate()`` reports dangling references instead of raising.
        """
        network = RoadNetwork(
            [Lane('a', [(0, 0), (50, 0)], 3.5, 13.9)],
            connections=[Connection('a', 'nowhere')])

        report = network.validate()

        self.assertEqual(1, len(report.of_kind('dangling')))
        self.assertEqual('nowhere', report.of_kind('dangling')[0].value)


class TestNetworkDict(unittest.TestCase):

    def test_dict_keeps_network(self):
        """
        A network should come back equal from its dictionary form.
        """
        original = crossroad()

        self.assertEqual(
            original, network_from_dict(network_to_dict(original)))


load_tests = inelegant.finder.TestFinder(
    __name__,
    network
).load_tests

if __name__ == "__main__":
    unittest.main()
