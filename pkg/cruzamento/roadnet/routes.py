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
Finding where a vehicle is on the map and where it can go from there.

``match_start_lane()`` finds the lane a vehicle is driving on and
``enumerate_routes()`` lists every sequence of connected lanes it may follow.
"""
import collections
import logging
import math

import numpy as np

from cruzamento.errors import OffRoadError
from cruzamento.roadnet.geometry import Polyline, densify, fillet
from cruzamento.scenario import normalize_angle

logger = logging.getLogger(__name__)

MAX_START_DISTANCE = 5.0
MAX_START_HEADING = math.pi / 2
DEFAULT_MAX_DEPTH = 4
ROUTE_SPACING = 1.0
FILLET_RADIUS = 15.0

LaneMatch = collections.namedtuple(
    'LaneMatch', ('lane_id', 'offset', 'distance', 'heading_difference'))


class Route(collections.namedtuple(
        'Route', ('lane_ids', 'start_offset', 'polyline'))):
    """
    A sequence of connected lanes plus the path a vehicle starting at
    ``start_offset`` meters along the first lane would drive.
    """
    __slots__ = ()

    @property
    def length(self):
        return self.polyline.length


def match_start_lane(network, state):
    """
    Finds the lane a vehicle in ``state`` is driving on: the nearest lane
    centerline within 5 m whose direction differs from the vehicle heading by
    at most a right angle. Ties go to the smallest heading difference and then
    to the smallest lane id::

        >>> from cruzamento.roadnet.network import Lane, RoadNetwork
        >>> from cruzamento.scenario import VehicleState
        >>> network = RoadNetwork([
        ...     Lane('east', [(0, 0), (100, 0)], 3.5, 13.9),
        ...     Lane('west', [(100, 3.5), (0, 3.5)], 3.5, 13.9)])
        >>> match_start_lane(network, VehicleState(10, 1, 0, 10)).lane_id
        'east'
        >>> match_start_lane(network, VehicleState(10, 3, math.pi, 10)).lane_id
        'west'

    Vehicles going against every nearby lane are off road::

        >>> match_start_lane(network, VehicleState(10, 30, 0, 10))
        Traceback (most recent call last):
          ...
        cruzamento.errors.OffRoadError: state: no lane within 5.0 m and \
1.571 rad of (10.0, 30.0, 0.000)
    """
    point = (state.x, state.y)
    matches = []
    for lane in network.lanes.values():
        polyline = lane.polyline
        distance = polyline.distance(point)
        if distance > MAX_START_DISTANCE:
            continue
        offset = polyline.project(point)
        difference = abs(normalize_angle(
            polyline.heading_at(offset) - state.heading))
        if difference > MAX_START_HEADING:
            continue
        matches.append(LaneMatch(lane.id, offset, distance, difference))

    if not matches:
        raise OffRoadError(
            'no lane within {0} m and {1:.3f} rad of ({2}, {3}, {4:.3f})'
            .format(
                MAX_START_DISTANCE, MAX_START_HEADING, state.x, state.y,
                state.heading))

    return min(
        matches,
        key=lambda m: (round(m.distance, 9), m.heading_difference, m.lane_id))


def lane_paths(network, lane_id, max_depth=DEFAULT_MAX_DEPTH):
    """
    Depth-first enumeration of the maximal lane sequences starting at
    ``lane_id`` that follow at most ``max_depth`` connections and visit no lane
    twice.
    """
    paths = []
    stack = [(lane_id,)]
    while stack:
        path = stack.pop()
        successors = [
            s for s in network.successors(path[-1]) if s not in path]
        if len(path) - 1 >= max_depth or not successors:
            paths.append(path)
            continue
        for successor in reversed(successors):
            stack.append(path + (successor,))
    return sorted(set(paths))


def route_polyline(
        network, lane_ids, start_offset=0.0, radius=FILLET_RADIUS,
        spacing=ROUTE_SPACING):
    """
    The path along a lane sequence, starting ``start_offset`` meters into the
    first lane. Corners are rounded so that the path can be driven and points
    are never more than ``spacing`` meters apart.
    """
    first = network.lane(lane_ids[0]).polyline
    start_offset = min(start_offset, first.length - 0.01)
    points = [first.slice(start_offset).points]
    for lane_id in lane_ids[1:]:
        points.append(network.lane(lane_id).polyline.points)
    points = np.concatenate(points)
    if radius > 0:
        points = fillet(points, radius, spacing)
    else:
        points = densify(points, spacing)
    return Polyline(points)


def positions_along(path, arcs, state, blend_steps=10):
    """
    The points ``arcs`` meters along ``path`` for a vehicle that starts at
    ``state``, which may be slightly off the path: the gap closes linearly
    over the first ``blend_steps`` points.
    """
    positions = path.point_at(np.asarray(arcs, dtype=np.float64))
    gap = np.array([state.x, state.y]) - path.point_at(arcs[0])
    blend = np.clip(1 - np.arange(len(positions)) / blend_steps, 0, 1)
    return positions + blend[:, None] * gap


def enumerate_routes(
        network, start, max_depth=DEFAULT_MAX_DEPTH, radius=FILLET_RADIUS):
    """
    Lists the routes a vehicle in state ``start`` can follow, in lexicographic
    order of lane ids::

        >>> from cruzamento.roadnet.network import (
        ...     Connection, Lane, RoadNetwork)
        >>> from cruzamento.scenario import VehicleState
        >>> network = RoadNetwork(
        ...     [Lane('a', [(0, 0), (50, 0)], 3.5, 13.9),
        ...      Lane('b', [(50, 0), (100, 0)], 3.5, 13.9),
        ...      Lane('c', [(50, 0), (50, 50)], 3.5, 13.9)],
        ...     connections=[Connection('a', 'b'), Connection('a', 'c')])
        >>> routes = enumerate_routes(network, VehicleState(10, 0, 0, 10))
        >>> [r.lane_ids for r in routes]
        [('a', 'b'), ('a', 'c')]
        >>> routes[0].polyline.length
        90.0
    """
    match = match_start_lane(network, start)
    routes = []
    for lane_ids in lane_paths(network, match.lane_id, max_depth):
        routes.append(Route(
            lane_ids, match.offset,
            route_polyline(network, lane_ids, match.offset, radius)))
    logger.debug(
        'found %d routes from lane %s', len(routes), match.lane_id)
    return routes
