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

from cruzamento.planner import encoding
from cruzamento.planner.encoding import (
    TrajectoryEncoder, derive_states, from_frame, moving_average, to_frame)
from cruzamento.scenario import VehicleState

from cruzamento_tests.reference import constant_speed


def turning():
    """
    A quarter circle of 40 m radius driven at 6 m/s.
    """
    angles = np.linspace(0, math.pi / 2, 101)
    positions = np.column_stack([
        10 + 40 * np.sin(angles), 20 + 40 - 40 * np.cos(angles)])
    return derive_states(positions, VehicleState(10, 20, 0, 6))


class TestTrajectoryEncoder(unittest.TestCase):

    def test_decode_encoded(self):
        """
        Decoding the encoding of a curved trajectory gives its positions
        back.
        """
        trajectory = turning()
        encoder = TrajectoryEncoder(sigma=0.7)

        decoded = encoder.decode(encoder.encode(trajectory), trajectory[0])

        np.testing.assert_allclose(
            trajectory.positions, decoded.positions, atol=1e-9)

    def test_frame_invariance(self):
        """
        The encoding does not depend on where the vehicle is or where it
        heads.
        """
        encoder = TrajectoryEncoder()
        a = constant_speed(VehicleState(0, 0, 0, 10))
        b = constant_speed(VehicleState(-50, 7, 2.0, 10))

        np.testing.assert_allclose(
            encoder.encode(a), encoder.encode(b), atol=1e-9)

    def test_starts_at_initial_state(self):
        """
        Decoded trajectories start exactly at the initial state, smoothed or
        not.
        """
        state = VehicleState(3, 4, 1.0, 7)
        offsets = np.random.default_rng(0).normal(size=(100, 2))

        for smooth in (False, True):
            decoded = TrajectoryEncoder().decode(offsets, state, smooth)
            np.testing.assert_array_equal(np.array(state), decoded.array[0])
            self.assertEqual(101, len(decoded))

    def test_smoothing_keeps_straight_lines(self):
        """
        Smoothing does not change a constant speed trajectory.
        """
        trajectory = constant_speed(VehicleState(0, 0, 0.3, 10))
        encoder = TrajectoryEncoder(sigma=2.0)

        decoded = encoder.decode(
            encoder.encode(trajectory), trajectory[0], smooth=True)

        np.testing.assert_allclose(
            trajectory.positions, decoded.positions, atol=1e-9)

    def test_fit(self):
        """
        The scale fitted is the standard deviation of the offsets, or one if
        they do not vary.
        """
        offsets = np.array([[1.0, 0.0], [3.0, 0.0]])

        self.assertAlmostEqual(
            float(np.std(offsets)), TrajectoryEncoder.fit(offsets).sigma)
        self.assertEqual(1.0, TrajectoryEncoder.fit(np.zeros((3, 2))).sigma)

    def test_bad_sigma(self):
        """
        The scale must be positive.
        """
        with self.assertRaises(ValueError):
            TrajectoryEncoder(sigma=0)


class TestHelpers(unittest.TestCase):

    def test_frames(self):
        """
        ``from_frame()`` undoes ``to_frame()``.
        """
        state = VehicleState(5, -2, 2.5, 0)
        points = np.random.default_rng(3).uniform(-50, 50, size=(20, 2))

        np.testing.assert_allclose(
            points, from_frame(to_frame(points, state), state), atol=1e-9)

    def test_frame_axes(self):
        """
        In the frame of a vehicle heading north, east is to the right.
        """
        state = VehicleState(0, 0, math.pi / 2, 0)

        np.testing.assert_allclose(
            [[0.0, -1.0]], to_frame([(1.0, 0.0)], state), atol=1e-12)

    def test_moving_average_length(self):
        """
        Smoothing keeps the number of rows, with even windows as well.
        """
        values = np.arange(20.0).reshape(10, 2)

        for window in (1, 2, 5, 12):
            self.assertEqual((10, 2), moving_average(values, window).shape)

    def test_stopped_vehicle_keeps_heading(self):
        """
        A vehicle that does not move keeps its heading.
        """
        state = VehicleState(0, 0, 1.2, 0)

        trajectory = derive_states(np.zeros((5, 2)), state)

        np.testing.assert_allclose(1.2, trajectory.headings)
        np.testing.assert_allclose(0.0, trajectory.speeds)


load_tests = inelegant.finder.TestFinder(
    __name__,
    encoding
).load_tests

if __name__ == "__main__":
    unittest.main()
