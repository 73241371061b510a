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
"""
How trajectories look to the diffusion model.

A trajectory of ``T_S + 1`` states becomes ``T_S`` position offsets, one per
step, expressed in the frame of its first state (origin at the vehicle, x
axis along its heading) and divided by a scale ``sigma``. Headings and speeds
are not diffused: they are derived again from the positions::

    >>> from cruzamento.scenario import Trajectory, VehicleState
    >>> states = [VehicleState(5, 5 + i, math.pi / 2, 10) for i in range(3)]
    >>> encoder = TrajectoryEncoder(sigma=2.0)
    >>> offsets = encoder.encode(Trajectory.from_states(states))
    >>> np.round(offsets, 9).tolist()
    [[0.5, 0.0], [0.5, 0.0]]
    >>> decoded = encoder.decode(offsets, states[0])
    >>> np.round(decoded.positions, 9).tolist()
    [[5.0, 5.0], [5.0, 6.0], [5.0, 7.0]]
"""
import math

import numpy as np

from cruzamento.scenario import DT, Trajectory

SPEED_SCALE = 10.0
POSITION_SCALE = 100.0
SMOOTHING_WINDOW = 5
MIN_HEADING_STEP = 0.1


def to_frame(points, state):
    """
    Expresses scenario points in the frame of ``state``.
    """
    points = np.asarray(points, dtype=np.float64)
    cos, sin = math.cos(state.heading), math.sin(state.heading)
    dx = points[..., 0] - state.x
    dy = points[..., 1] - state.y
    return np.stack([dx * cos + dy * sin, -dx * sin + dy * cos], axis=-1)


def from_frame(points, state):
    points = np.asarray(points, dtype=np.float64)
    cos, sin = math.cos(state.heading), math.sin(state.heading)
    x, y = points[..., 0], points[..., 1]
    return np.stack(
        [state.x + x * cos - y * sin, state.y + x * sin + y * cos], axis=-1)


def moving_average(values, window=SMOOTHING_WINDOW):
    """
    Centered moving average along the first axis, repeating the edge values
    so that the length is kept::

        >>> moving_average(np.array([[0.0], [0.0], [3.0], [0.0], [0.0]]), 3)
        array([[0.],
               [1.],
               [1.],
               [1.],
               [0.]])
    """
    if window <= 1 or len(values) < 2:
        return np.array(values, dtype=np.float64)
    half = window // 2
    padded = np.concatenate(
        [np.repeat(values[:1], half, axis=0), values,
         np.repeat(values[-1:], window - 1 - half, axis=0)])
    kernel = np.ones(window) / window
    return np.stack([
        np.convolve(padded[:, k], kernel, mode='valid')
        for k in range(values.shape[1])], axis=1)


def derive_states(positions, initial_state, dt=DT):
    """
    Builds a trajectory from positions. The first state is ``initial_state``;
    later speeds are step lengths over ``dt`` and headings are step
    directions. Steps shorter than ten centimeters keep the previous heading,
    so stopped vehicles do not spin.
    """
    positions = np.array(positions, dtype=np.float64)
    positions[0] = (initial_state.x, initial_state.y)
    steps = np.diff(positions, axis=0)
    lengths = np.linalg.norm(steps, axis=1)

    headings = np.empty(len(positions))
    headings[0] = initial_state.heading
    for i, (step, length) in enumerate(zip(steps, lengths)):
        if length < MIN_HEADING_STEP:
            headings[i + 1] = headings[i]
        else:
            headings[i + 1] = math.atan2(step[1], step[0])

    speeds = np.concatenate([[initial_state.speed], lengths / dt])
    return Trajectory.from_arrays(positions, headings, speeds, dt)


def condition_features(initial_state, goal_position, goal_heading):
    """
    The features of the two condition tokens: the initial speed, and the goal
    pose in the frame of the initial state::

        >>> from cruzamento.scenario import VehicleState
        >>> start, goal = condition_features(
        ...     VehicleState(0, 0, math.pi / 2, 10), (0, 50), math.pi / 2)
        >>> start.tolist(), np.round(goal, 9).tolist()
        ([1.0], [0.5, 0.0, 1.0, 0.0])
    """
    x, y = to_frame(goal_position, initial_state)
    relative = goal_heading - initial_state.heading
    start = np.array([initial_state.speed / SPEED_SCALE])
    goal = np.array([
        x / POSITION_SCALE, y / POSITION_SCALE,
        math.cos(relative), math.sin(relative)])
    return start, goal


class TrajectoryEncoder(object):
    """
    Turns trajectories into normalized offsets and back. ``sigma`` is the
    standard deviation of the offsets of the training data. Decoded offsets
    may be smoothed by a moving average of ``smoothing_window`` steps first.
    """

    def __init__(self, sigma=1.0, smoothing_window=SMOOTHING_WINDOW, dt=DT):
        if not sigma > 0:
            raise ValueError('sigma must be positive, got {0}'.format(sigma))
        self.sigma = float(sigma)
        self.smoothing_window = smoothing_window
        self.dt = dt

    @staticmethod
    def fit(offsets, smoothing_window=SMOOTHING_WINDOW):
        """
        An encoder whose scale is the standard deviation of raw ``offsets``.
        """
        sigma = float(np.std(offsets))
        return TrajectoryEncoder(
            sigma if sigma > 0 else 1.0, smoothing_window)

    def raw_offsets(self, positions, initial_state):
        local = to_frame(positions, initial_state)
        return np.diff(local, axis=0)

    def encode_positions(self, positions, initial_state):
        return self.raw_offsets(positions, initial_state) / self.sigma

    def encode(self, trajectory):
        return self.encode_positions(trajectory.positions, trajectory[0])

    def decode(self, offsets, initial_state, smooth=False):
        """
        The trajectory whose normalized offsets are ``offsets``, starting
        exactly at ``initial_state``.
        """
        offsets = np.asarray(offsets, dtype=np.float64) * self.sigma
        if smooth:
            offsets = moving_average(offsets, self.smoothing_window)
        local = np.concatenate([np.zeros((1, 2)), np.cumsum(offsets, axis=0)])
        positions = from_frame(local, initial_state)
        return derive_states(positions, initial_state, self.dt)

    def to_dict(self):
        return {
            'sigma': self.sigma,
            'smoothing_window': self.smoothing_window,
        }
