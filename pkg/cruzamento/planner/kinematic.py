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
A planner that learns nothing: it drives along the goal route with constant
acceleration and reaches the goal distance at the horizon::

    >>> from cruzamento.roadnet.network import Lane, RoadNetwork
    >>> from cruzamento.rollout.candidates import GoalCandidate
    >>> from cruzamento.scenario import VehicleState
    >>> network = RoadNetwork([Lane('a', [(0, 0), (300, 0)], 3.5, 14)])
    >>> goal = GoalCandidate(1, (150, 0), 0, ('a',), 150)
    >>> trajectory = KinematicPlanner().plan(
    ...     network, VehicleState(0, 0, 0, 10), goal, noise_seed=0)
    >>> len(trajectory), round(float(trajectory.positions[-1][0]), 6)
    (101, 150.0)
"""
import math

import numpy as np

from cruzamento.planner.encoding import derive_states
from cruzamento.roadnet.geometry import Polyline
from cruzamento.roadnet.routes import (
    FILLET_RADIUS, positions_along, route_polyline)
from cruzamento.scenario import DT, T_S


def arc_lengths(speed, distance, horizon=T_S, dt=DT):
    """
    Distances covered at every step by a vehicle that starts at ``speed`` and
    covers ``distance`` meters in ``horizon`` steps with constant
    acceleration. When that would need a negative speed the vehicle brakes to
    a stop exactly at ``distance`` instead::

        >>> arc_lengths(10.0, 50.0, horizon=4, dt=2.5).tolist()
        [0.0, 21.875, 37.5, 46.875, 50.0]
        >>> arc_lengths(10.0, 20.0, horizon=4, dt=2.5).tolist()
        [0.0, 17.1875, 20.0, 20.0, 20.0]
    """
    duration = horizon * dt
    times = np.arange(horizon + 1) * dt
    accel = 2 * (distance - speed * duration) / duration ** 2
    if speed + accel * duration >= 0:
        return speed * times + 0.5 * accel * times ** 2
    if distance <= 0:
        return np.zeros(horizon + 1)
    accel = -speed ** 2 / (2 * distance)
    stop = speed / -accel
    times = np.minimum(times, stop)
    return np.minimum(speed * times + 0.5 * accel * times ** 2, distance)


class KinematicPlanner(object):
    """
    Follows the centerline of the goal route. A vehicle slightly off the
    centerline joins it over the first second.
    """
    name = 'kinematic'

    def __init__(self, horizon=T_S, dt=DT, radius=FILLET_RADIUS):
        self.horizon = horizon
        self.dt = dt
        self.radius = radius

    def path(self, network, state, goal):
        if goal.route:
            first = network.lane(goal.route[0]).polyline
            offset = first.project((state.x, state.y))
            return route_polyline(network, goal.route, offset, self.radius)
        length = max(goal.arc_distance, 1.0)
        return Polyline([
            (state.x, state.y),
            (state.x + length * math.cos(state.heading),
             state.y + length * math.sin(state.heading))])

    def plan(self, network, state, goal, noise_seed=0):
        path = self.path(network, state, goal)
        distance = min(goal.arc_distance, path.length)
        s = arc_lengths(state.speed, distance, self.horizon, self.dt)
        positions = positions_along(path, s, state)
        return derive_states(positions, state, self.dt)
