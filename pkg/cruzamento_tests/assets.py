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
import os
import tempfile
import unittest

import inelegant.finder
import numpy as np

from cruzamento import assets
from cruzamento.assets import (
    VehiclePlacer, default_database, ingest_database, parse_database,
    place_vehicles, read_assets, write_assets)
from cruzamento.errors import DatabaseError, ParameterError, ValidationError
from cruzamento.mapsynth import KINDS, generate_template_map
from cruzamento.roadnet.geometry import box_polygon
from cruzamento.roadnet.network import Lane, RoadNetwork

HEADER = 'kind,length,width,height,speed_min,speed_max\n'


class TestParseDatabase(unittest.TestCase):

    def test_blank_lines_skipped(self):
        """
        Blank lines should be ignored.
        """
        database = parse_database(
            HEADER + 'car,4.5,1.8,1.5,5,15\n\n  \nbus,12,2.5,3.2,3,11\n')

        self.assertEqual(2, len(database))

    def test_wrong_header(self):
        """
        The header must name the six columns in order.
        """
        with self.assertRaises(DatabaseError) as context:
            parse_database('kind,length\ncar,4.5\n')
        self.assertEqual(1, context.exception.line)

    def test_unknown_kind(self):
        """
        Unknown kinds should be refused with their line.
        """
        with self.assertRaises(DatabaseError) as context:
            parse_database(
                HEADER + 'car,4.5,1.8,1.5,5,15\ntank,7,3,2.4,0,10\n')
        self.assertEqual(3, context.exception.line)

    def test_not_a_number(self):
        """
        Sizes must be numbers.
        """
        with self.assertRaises(DatabaseError):
            parse_database(HEADER + 'car,long,1.8,1.5,5,15\n')

    def test_speed_order(self):
        """
        The minimum speed cannot exceed the maximum.
        """
        with self.assertRaises(DatabaseError):
            parse_database(HEADER + 'car,4.5,1.8,1.5,15,5\n')

    def test_missing_fields(self):
        """
        Every row needs six fields.
        """
        with self.assertRaises(DatabaseError):
            parse_database(HEADER + 'car,4.5,1.8\n')

    def test_default_database(self):
        """
        The bundled database has every kind.
        """
        self.assertEqual(
            {'car', 'truck', 'bus', 'motorcycle'}, default_database().kinds)

    def test_ingest_missing_file(self):
        """
        A missing file is a database error.
        """
        with self.assertRaises(DatabaseError):
            ingest_database('/nonexistent/vehicles.csv')


class TestPlaceVehicles(unittest.TestCase):

    def setUp(self):
        self.network = generate_template_map('highway', {'lanes': 3})
        self.database = default_database()

    def test_reproducible(self):
        """
        The same seed should give the same vehicles.
        """
        self.assertEqual(
            place_vehicles(self.network, self.database, 8, seed=5),
            place_vehicles(self.network, self.database, 8, seed=5))

    def test_seeds_differ(self):
        """
        Different seeds should give different placements.
        """
        self.assertNotEqual(
            place_vehicles(self.network, self.database, 8, seed=5),
            place_vehicles(self.network, self.database, 8, seed=6))

    def test_no_overlap(self):
        """
        Footprints lengthened by the bumper gap should not overlap.
        """
        vehicles = place_vehicles(self.network, self.database, 12, seed=2)
        footprints = [
            box_polygon(
                v.initial_state.x, v.initial_state.y,
                v.initial_state.heading, v.length + 2.0, v.width)
            for v in vehicles]

        for i in range(len(footprints)):
            for j in range(i + 1, len(footprints)):
                self.assertFalse(footprints[i].intersects(footprints[j]))

    def test_within_radius(self):
        """
        Social vehicles should start within the radius around the target.
        """
        vehicles = place_vehicles(
            self.network, self.database, 8, seed=4, radius=30.0)
        target = vehicles[0].initial_state

        for v in vehicles[1:]:
            distance = np.hypot(
                v.initial_state.x - target.x, v.initial_state.y - target.y)
            self.assertLessEqual(distance, 30.0 + 1e-6)

    def test_crowded_map_drops_vehicles(self):
        """
        Vehicles that find no free spot should be dropped and counted.
        """
        placer = VehiclePlacer(
            self.network, self.database, seed=1, radius=5.0, tries=5)

        vehicles = placer.place(16)

        self.assertEqual(16, len(vehicles) + placer.dropped)
        self.assertGreater(placer.dropped, 0)
        self.assertEqual(list(range(len(vehicles))), [v.id for v in vehicles])

    def test_everyone_can_stop(self):
        """
        Every vehicle placed on a template map can brake to a stop before
        the road ahead of it ends.
        """
        for kind in KINDS:
            placer = VehiclePlacer(
                generate_template_map(kind), self.database, seed=1)
            for v in placer.place(12):
                self.assertTrue(placer.can_stop(v.initial_state), kind)

    def test_target_slowed_near_dead_end(self):
        """
        A target with less road ahead than it needs to stop is slowed down
        until it can.
        """
        network = RoadNetwork([Lane('a', [(0, 0), (10, 0)], 3.5, 30)])
        placer = VehiclePlacer(network, self.database, seed=2)

        target = placer.place(1)[0].initial_state

        room = placer.stopping_room(target)
        self.assertLessEqual(room, 10 + 1e-9)
        self.assertLessEqual(target.speed, (2 * 7.5 * room) ** 0.5 + 1e-9)
        self.assertTrue(placer.can_stop(target))

    def test_vehicle_count_range(self):
        """
        Between one and sixteen vehicles may be placed.
        """
        with self.assertRaises(ParameterError):
            place_vehicles(self.network, self.database, 17)
        with self.assertRaises(ParameterError):
            place_vehicles(self.network, self.database, 0)

    def test_empty_network(self):
        """
        Nothing can be placed without lanes.
        """
        with self.assertRaises(ValidationError):
            place_vehicles(RoadNetwork(), self.database, 3)


class TestAssetFiles(unittest.TestCase):

    def test_files(self):
        """
        Vehicles should go through asset files unchanged.
        """
        network = generate_template_map('intersection')
        vehicles = place_vehicles(network, default_database(), 6, seed=9)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'assets.json')
            write_assets(vehicles, path, {'seed': 9})

            self.assertEqual(vehicles, read_assets(path))


load_tests = inelegant.finder.TestFinder(
    __name__,
    assets
).load_tests

if __name__ == "__main__":
    unittest.main()
