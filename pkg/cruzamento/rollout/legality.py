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
The legality checker decides whether a trajectory may enter a scenario. It
looks at three families of rules:

on road
    every state lies on some lane: its distance to the lane centerline is at
    most half the lane width plus a margin;
collision
    the vehicle box never overlaps the box of another vehicle at the same
    timestep;
dynamics
    longitudinal and lateral accelerations stay within what a vehicle can do.

Violations are data: ``check_legality()`` returns a report and never raises
because a trajectory is illegal.
"""
import collections
import logging

import numpy as np

from cruzamento.errors import ValidationError
from cruzamento.roadnet.geometry import box_corners, boxes_overlap
from cruzamento.scenario import normalize_angle

logger = logging.getLogger(__name__)


class LegalityLimits(collections.namedtuple(
        'LegalityLimits',
        ('max_accel', 'max_lateral_accel', 'on_road_margin'))):
    """
    The thresholds of the checker, in m/s² and meters::

        >>> LegalityLimits()
        LegalityLimits(max_accel=8.0, max_lateral_accel=6.0, \
on_road_margin=0.5)
    """
    __slots__ = ()

    def __new__(cls, max_accel=8.0, max_lateral_accel=6.0,
                on_road_margin=0.5):
        return super(LegalityLimits, cls).__new__(
            cls, float(max_accel), float(max_lateral_accel),
            float(on_road_margin))

    @staticmethod
    def from_config(configuration):
        return LegalityLimits(**configuration.get('legality'))


class LegalityReport(collections.namedtuple(
        'LegalityReport',
        ('max_deviation', 'on_road', 'collision', 'max_accel',
         'max_lateral_accel', 'dynamics'))):
    """
    The verdicts of the three rule families:

    ``max_deviation``, ``on_road``
        the largest distance from a state to its nearest lane centerline and
        whether every state was on its lane;
    ``collision``
        ``None`` or a pair ``(other_id, timestep)`` for the first overlap;
    ``max_accel``, ``max_lateral_accel``, ``dynamics``
        the largest accelerations found and whether they are acceptable.
    """
    __slots__ = ()

    @property
    def passed(self):
        return self.on_road and self.collision is None and self.dynamics

    def failures(self):
        failures = []
        if not self.on_road:
            failures.append('off road by {0:.2f} m'.format(self.max_deviation))
        if self.collision is not None:
            failures.append('collides with vehicle {0} at step {1}'.format(
                *self.collision))
        if not self.dynamics:
            failures.append(
                'accelerations {0:.2f}/{1:.2f} m/s2'.format(
                    self.max_accel, self.max_lateral_accel))
        return failures


def lane_excess(network, positions):
    """
    For every position, the distance to the nearest lane surface border,
    negative inside the lane, and the distance to that lane's centerline.
    The nearest lane is searched over the whole network, not only over the
    route the vehicle follows, so a point on any lane surface is on the road.
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    best_excess = np.full(len(positions), np.inf)
    best_distance = np.full(len(positions), np.inf)
    for lane in network.lanes.values():
        distances = lane.polyline.distances(positions)
        excess = distances - lane.width / 2
        better = excess < best_excess
        best_excess[better] = excess[better]
        best_distance[better] = distances[better]
    return best_excess, best_distance


def accelerations(trajectory):
    """
    Longitudinal accelerations from speeds derived from positions, the first
    one against the stored initial speed, and lateral accelerations from
    heading changes::

        >>> from cruzamento.scenario import Trajectory, VehicleState
        >>> t = Trajectory.from_states(
        ...     [VehicleState(i, 0, 0, 10) for i in range(3)])
        >>> longitudinal, lateral = accelerations(t)
        >>> longitudinal.tolist(), lateral.tolist()
        ([0.0, 0.0], [0.0, 0.0])
    """
    dt = trajectory.dt
    steps = np.linalg.norm(np.diff(trajectory.positions, axis=0), axis=1)
    speeds = np.concatenate([trajectory.speeds[:1], steps / dt])
    longitudinal = np.diff(speeds) / dt
    turns = np.abs(normalize_angle(np.diff(trajectory.headings)))
    lateral = trajectory.speeds[1:] * turns / dt
    return longitudinal, lateral


def first_collision(trajectory, attributes, other_trajectory, other):
    """
    The first timestep at which the two vehicle boxes overlap, or ``None``.
    """
    if len(trajectory) != len(other_trajectory):
        raise ValidationError(
            'trajectories of vehicles {0} and {1} differ in length'.format(
                attributes.id, other.id),
            field_path='trajectories')
    a = box_corners(
        trajectory.positions[:, 0], trajectory.positions[:, 1],
        trajectory.headings, np.full(len(trajectory), attributes.length),
        np.full(len(trajectory), attributes.width))
    b = box_corners(
        other_trajectory.positions[:, 0], other_trajectory.positions[:, 1],
        other_trajectory.headings,
        np.full(len(other_trajectory), other.length),
        np.full(len(other_trajectory), other.width))
    overlapping = np.flatnonzero(boxes_overlap(a, b))
    return int(overlapping[0]) if len(overlapping) else None


def check_legality(
        network, trajectory, others, attributes, limits=None,
        exempt_ids=()):
    """
    Checks ``trajectory``, driven by the vehicle described by ``attributes``,
    against the network and against ``others``, a sequence of
    ``(attributes, trajectory)`` pairs already in the scenario. Vehicles in
    ``exempt_ids`` may be touched.

    A vehicle driving along its lane at constant speed is legal::

        >>> from cruzamento.roadnet.network import Lane, RoadNetwork
        >>> from cruzamento.scenario import (
        ...     Trajectory, VehicleAttributes, VehicleState)
        >>> network = RoadNetwork([Lane('a', [(0, 0), (200, 0)], 3.5, 14)])
        >>> states = [VehicleState(i, 0, 0, 10) for i in range(101)]
        >>> vehicle = VehicleAttributes(0, 'car', 4.5, 1.8, 1.5, states[0])
        >>> report = check_legality(
        ...     network, Trajectory.from_states(states), [], vehicle)
        >>> report.passed
        True

    A vehicle jumping twenty meters in one step is not::

        >>> jump = states[:50] + [
        ...     VehicleState(s.x + 20, 0, 0, 10) for s in states[50:]]
        >>> report = check_legality(
        ...     network, Trajectory.from_states(jump), [], vehicle)
        >>> report.dynamics, report.failures()[0].startswith('accelerations')
        (False, True)
    """
    limits = limits if limits is not None else LegalityLimits()

    excess, distance = lane_excess(network, trajectory.positions)
    on_road = bool(np.all(excess <= limits.on_road_margin))

    longitudinal, lateral = accelerations(trajectory)
    max_accel = float(np.max(np.abs(longitudinal), initial=0.0))
    max_lateral = float(np.max(lateral, initial=0.0))
    dynamics = (
        max_accel <= limits.max_accel and
        max_lateral <= limits.max_lateral_accel)

    collision = None
    for other, other_trajectory in others:
        if other.id in exempt_ids or other.id == attributes.id:
            continue
        step = first_collision(
            trajectory, attributes, other_trajectory, other)
        if step is not None and (collision is None or step < collision[1]):
            collision = (other.id, step)

    report = LegalityReport(
        float(np.max(distance)), on_road, collision, max_accel, max_lateral,
        dynamics)
    if not report.passed:
        logger.debug(
            'vehicle %s rejected: %s', attributes.id,
            '; '.join(report.failures()))
    return report
