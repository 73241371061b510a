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

from cruzamento.roadnet import geometry
from cruzamento.roadnet.geometry import (
    Polyline, box_corners, box_polygon, boxes_overlap, densify, fillet)


class TestPolyline(unittest.TestCase):

    def test_point_at_clamps_to_ends(self):
        """
        Arc lengths outside the polyline should give its end points.
        """
        line = Polyline([(0, 0), (10, 0)])

        self.assertEqual([0.0, 0.0], line.point_at(-5).tolist())
        self.assertEqual([10.0, 0.0], line.point_at(50).tolist())

    def test_project_inverts_point_at(self):
        """
        Projecting the point at some arc length should give that arc length
        back.
        """
        line = Polyline([(0, 0), (10, 0), (10, 10), (0, 10)])

        for s in (0.0, 3.5, 10.0, 17.25, 30.0):
            self.assertAlmostEqual(s, line.project(line.point_at(s)))

    def test_projections_agree_with_project(self):
        """
        The vectorized projection should agree with the shapely one.
        """
        line = Polyline([(0, 0), (10, 0), (10, 10)])
        points = [(3, 1), (12, 4), (9, 9), (-2, -2)]

        np.testing.assert_allclose(
            [line.project(p) for p in points], line.projections(points))

    def test_slice_keeps_inner_points(self):
        """
        A slice should keep the corners between its ends.
        """
        line = Polyline([(0, 0), (10, 0), (10, 10)])

        self.assertEqual(
            [[5.0, 0.0], [10.0, 0.0], [10.0, 5.0]],
            line.slice(5, 15).points.tolist())

    def test_curvatures_of_circle(self):
        """
        The curvature inside a densely sampled circle should be close to the
        inverse of its radius.
        """
        angles = np.linspace(0, math.pi, 181)
        circle = Polyline(np.column_stack(
            [20 * np.cos(angles), 20 * np.sin(angles)]))

        np.testing.assert_allclose(
            circle.curvatures()[1:-1], 1 / 20, rtol=1e-3)


class TestDensifyAndFillet(unittest.TestCase):

    def test_densify_spacing(self):
        """
        No two consecutive points should be farther apart than the spacing.
        """
        points = densify([(0, 0), (7.3, 0), (7.3, 4.1)], spacing=0.5)
        steps = np.linalg.norm(np.diff(points, axis=0), axis=1)

        self.assertLessEqual(steps.max(), 0.5 + 1e-12)

    def test_fillet_is_smooth(self):
        """
        A rounded right angle should turn by small steps only.
        """
        points = fillet([(0, 0), (30, 0), (30, 30)], radius=10)
        headings = Polyline(points).segment_headings

        self.assertLess(np.max(np.abs(np.diff(headings))), 0.2)

    def test_fillet_of_straight_line(self):
        """
        A straight line has no corner to round.
        """
        points = fillet([(0, 0), (3, 0)], radius=10)

        self.assertEqual(
            [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]], points.tolist())


class TestBoxes(unittest.TestCase):

    def test_boxes_overlap_agrees_with_shapely(self):
        """
        The separating-axis test should agree with the intersection of the
        shapely polygons on random boxes.
        """
        rng = np.random.default_rng(3)
        for _ in range(300):
            a = rng.uniform([-5, -5, -3, 1, 1], [5, 5, 3, 6, 3])
            b = rng.uniform([-5, -5, -3, 1, 1], [5, 5, 3, 6, 3])
            expected = box_polygon(*a).intersection(box_polygon(*b)).area
            self.assertEqual(
                expected > 1e-9,
                bool(boxes_overlap(box_corners(*a), box_corners(*b))))

    def test_boxes_overlap_broadcasts(self):
        """
        Stacks of boxes should be compared element by element.
        """
        a = box_corners(np.zeros(3), np.zeros(3), np.zeros(3), 4.0, 2.0)
        b = box_corners(
            np.array([1.0, 10.0, 3.9]), np.zeros(3), np.zeros(3), 4.0, 2.0)

        self.assertEqual(
            [True, False, True], boxes_overlap(a, b).tolist())


load_tests = inelegant.finder.TestFinder(
    __name__,
    geometry
).load_tests

if __name__ == "__main__":
    unittest.main()
