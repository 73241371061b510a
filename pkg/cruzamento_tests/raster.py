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

from cruzamento import raster
from cruzamento.raster import EgoFrame, lane_outlines, rasterize_map
from cruzamento.roadnet.network import Lane, RoadNetwork
from cruzamento.scenario import VehicleState

from cruzamento_tests.reference import straight_road


class TestEgoFrame(unittest.TestCase):

    def test_vehicle_at_center(self):
        """
        The vehicle itself should be at the center of the raster.
        """
        frame = EgoFrame(VehicleState(12, -3, 0.7, 5))

        pixels = frame.to_pixels([(12, -3)])

        self.assertEqual([[128.0, 128.0]], pixels.tolist())

    def test_right_is_right(self):
        """
        Points to the right of the vehicle should be right of the center.
        """
        frame = EgoFrame(VehicleState(0, 0, 0, 5), resolution=1.0)

        np.testing.assert_allclose([[138.0, 128.0]],
                                   frame.to_pixels([(0, -10)]))

    def test_contains(self):
        """
        Only pixels inside the raster are contained.
        """
        frame = EgoFrame(VehicleState(0, 0, 0, 5))

        self.assertTrue(frame.contains((0, 255)))
        self.assertFalse(frame.contains((256, 0)))
        self.assertFalse(frame.contains((-1, 3)))

    def test_half_extent(self):
        """
        The default raster covers a hundred meters on each side.
        """
        self.assertEqual(100.0, EgoFrame(VehicleState(0, 0, 0, 0)).half_extent)


class TestRasterizeMap(unittest.TestCase):

    def test_turns_with_vehicle(self):
        """
        The road ahead of a vehicle should run up the raster whatever the
        heading.
        """
        network = RoadNetwork([
            Lane('a', [(0, -100), (0, 100)], 3.5, 14)])
        image = rasterize_map(network, VehicleState(0, 0, math.pi / 2, 5))

        self.assertEqual(1.0, image[20, 128])
        self.assertEqual(1.0, image[236, 128])
        self.assertEqual(0.0, image[128, 20])

    def test_values(self):
        """
        Rasters hold only empty space, lane borders and lane surfaces.
        """
        image = rasterize_map(straight_road(), VehicleState(100, 0, 0, 5))

        self.assertEqual({0.0, 0.5, 1.0}, set(np.unique(image).tolist()))
        self.assertEqual(np.float32, image.dtype)

    def test_size(self):
        """
        Smaller rasters may be asked for.
        """
        image = rasterize_map(
            straight_road(), VehicleState(100, 0, 0, 5), size=32,
            resolution=2.0)

        self.assertEqual((32, 32), image.shape)

    def test_far_away_is_empty(self):
        """
        A vehicle far from every lane sees an empty raster.
        """
        image = rasterize_map(straight_road(), VehicleState(0, 1000, 0, 5))

        self.assertEqual(0.0, float(image.max()))

    def test_outlines_cached(self):
        """
        Lane outlines should be computed once per network.
        """
        network = straight_road()

        self.assertIs(lane_outlines(network), lane_outlines(network))


load_tests = inelegant.finder.TestFinder(
    __name__,
    raster
).load_tests

if __name__ == "__main__":
    unittest.main()
