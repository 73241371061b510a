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

from cruzamento.rollout import bev
from cruzamento.rollout.bev import (
    EGO, MARKER, MARKER_RADIUS, OTHER, TARGET, render_bev)
from cruzamento.rollout.candidates import GoalCandidate
from cruzamento.scenario import VehicleState

from cruzamento_tests.reference import straight_road, vehicle


def scene(target=1):
    return [
        vehicle(1, 100, 0, is_target=target == 1),
        vehicle(2, 120, 3.5, heading=3.14159, is_target=target == 2)]


class TestRenderBev(unittest.TestCase):

    def test_ego_at_center(self):
        """
        The ego vehicle is the green box in the middle.
        """
        image = render_bev(straight_road(), scene(), 1).decode()

        self.assertEqual(EGO, tuple(image[128, 128]))

    def test_other_vehicles(self):
        """
        Other vehicles are blue. A vehicle 20 m ahead and 3.5 m to the left
        is 26 pixels up and 4 to the left.
        """
        image = render_bev(straight_road(), scene(), 1).decode()

        self.assertEqual(OTHER, tuple(image[102, 123]))

    def test_highlight_target(self):
        """
        When asked, the target is drawn in orange.
        """
        network = straight_road()
        plain = render_bev(network, scene(target=2), 1).decode()
        highlighted = render_bev(
            network, scene(target=2), 1, highlight_target=True).decode()

        self.assertEqual(OTHER, tuple(plain[102, 123]))
        self.assertEqual(TARGET, tuple(highlighted[102, 123]))

    def test_markers(self):
        """
        Candidates are red discs at the pixel the legend tells.
        """
        image = render_bev(
            straight_road(), scene(), 1,
            [GoalCandidate(1, (150, 0), 0, ('east',), 50)])

        self.assertEqual({1: (128, 64)}, image.legend)
        self.assertEqual((), image.clamped)
        self.assertEqual(
            MARKER, tuple(image.decode()[64 - MARKER_RADIUS + 1, 128]))

    def test_clamped_markers(self):
        """
        Candidates outside the window are marked at its edge.
        """
        image = render_bev(
            straight_road(), scene(), 1,
            [GoalCandidate(1, (150, 0), 0, ('east',), 50),
             GoalCandidate(2, (400, 0), 0, ('east',), 300)])

        self.assertEqual((2,), image.clamped)
        self.assertEqual((128, MARKER_RADIUS), image.legend[2])

    def test_states(self):
        """
        Vehicles may be drawn somewhere else than their initial state.
        """
        image = render_bev(
            straight_road(), scene(), 1,
            [GoalCandidate(1, (150, 0), 0, ('east',), 50)],
            states={1: VehicleState(150, 0, 0, 10)})

        self.assertEqual({1: (128, 128)}, image.legend)

    def test_deterministic(self):
        """
        The same scene always gives the same bytes.
        """
        network = straight_road()

        self.assertEqual(
            render_bev(network, scene(), 2).png,
            render_bev(network, scene(), 2).png)


load_tests = inelegant.finder.TestFinder(
    __name__,
    bev
).load_tests

if __name__ == "__main__":
    unittest.main()
