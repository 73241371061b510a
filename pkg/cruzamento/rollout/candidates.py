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
Goal candidates: the places a vehicle could reasonably reach in ten seconds.

For every route the vehicle may follow, the distance it can cover lies in a
band. The lower end assumes it halves its speed, the upper end that it
accelerates moderately the whole time. Candidates are put in the middle of
the band and, when the band is wide, at both ends::

    >>> from cruzamento.roadnet.network import Lane, RoadNetwork
    >>> from cruzamento.scenario import VehicleState
    >>> network = RoadNetwork([Lane('a', [(0, 0), (300, 0)], 3.5, 14)])
    >>> candidates = sample_goal_candidates(
    ...     network, VehicleState(0, 0, 0, 10))
    >>> [c.arc_distance for c in candidates]
    [150.0, 50.0, 250.0]
    >>> [c.number for c in candidates]
    [1, 2, 3]
"""
import collections
import logging
import math

import numpy as np

from cruzamento.errors import NoCandidateError, OffRoadError
from cruzamento.roadnet.routes import (
    DEFAULT_MAX_DEPTH, FILLET_RADIUS, enumerate_routes)
from cruzamento.scenario import DT, T_S

logger = logging.getLogger(__name__)

HORIZON = T_S * DT
MAX_ACCEL = 3.0
MIN_DISTANCE = 5.0
BAND_SPLIT = 30.0
MAX_CANDIDATES = 8
DUPLICATE_DISTANCE = 0.5


class GoalCandidate(collections.namedtuple(
        'GoalCandidate',
        ('number', 'position', 'heading', 'route', 'arc_distance'))):
    """
    A numbered goal. ``route`` is the sequence of lane ids leading to it and
    ``arc_distance`` the distance, in meters, along that route.
    """
    __slots__ = ()

    def renumbered(self, number):
        return self._replace(number=number)


class GoalCandidateSet(object):
    """
    The candidates offered to a vehicle, numbered from 1, and the routes they
    lie on.
    """

    def __init__(self, candidates, routes=()):
        self.candidates = tuple(candidates)
        self.routes = {tuple(r.lane_ids): r for r in routes}

    @property
    def numbers(self):
        return [c.number for c in self.candidates]

    def by_number(self, number):
        for candidate in self.candidates:
            if candidate.number == number:
                return candidate
        raise KeyError(number)

    def route_of(self, candidate):
        return self.routes.get(tuple(candidate.route))

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __getitem__(self, index):
        return self.candidates[index]


def distance_band(speed, route_length, horizon=HORIZON, max_accel=MAX_ACCEL):
    """
    The admissible arc distances for a vehicle at ``speed`` on a route of
    ``route_length`` meters. A stationary vehicle may still creep five
    meters::

        >>> distance_band(0.0, 300.0)
        (5.0, 150.0)
        >>> distance_band(10.0, 300.0)
        (50.0, 250.0)

    The band may be empty, in which case the lower end exceeds the upper one.
    """
    low = max(MIN_DISTANCE, 0.5 * speed * horizon)
    high = min(route_length, (speed + 0.5 * max_accel * horizon) * horizon)
    return float(low), float(high)


def band_distances(low, high, band_split=BAND_SPLIT):
    if low > high:
        return []
    distances = [(low + high) / 2]
    if high - low > band_split:
        distances.extend([low, high])
    return distances


def sample_goal_candidates(
        network, state, max_candidates=MAX_CANDIDATES, horizon=HORIZON,
        max_accel=MAX_ACCEL, band_split=BAND_SPLIT,
        max_depth=DEFAULT_MAX_DEPTH, radius=FILLET_RADIUS):
    """
    Samples numbered goal candidates for a vehicle in ``state``. At most
    ``ceil(max_candidates / routes)`` candidates come from each route, the
    band middles first, so every route is offered before any route gets a
    second candidate.

    When no route has room for a candidate ``NoCandidateError`` is raised::

        >>> from cruzamento.roadnet.network import Lane, RoadNetwork
        >>> from cruzamento.scenario import VehicleState
        >>> network = RoadNetwork([Lane('a', [(0, 0), (3, 0)], 3.5, 14)])
        >>> sample_goal_candidates(network, VehicleState(0, 0, 0, 10))
        Traceback (most recent call last):
          ...
        cruzamento.errors.NoCandidateError: candidates: no route admits a \
goal candidate
    """
    routes = enumerate_routes(network, state, max_depth, radius)
    per_route = []
    for route in routes:
        low, high = distance_band(
            state.speed, route.length, horizon, max_accel)
        per_route.append(band_distances(low, high, band_split))

    useful = sum(1 for distances in per_route if distances)
    if not useful:
        raise NoCandidateError()
    cap = int(math.ceil(max_candidates / useful))

    chosen = []
    for rank in range(min(cap, 3)):
        for route, distances in zip(routes, per_route):
            if rank >= len(distances):
                continue
            distance = distances[rank]
            position = route.polyline.point_at(distance)
            if any(
                    np.linalg.norm(position - c[1]) < DUPLICATE_DISTANCE
                    for c in chosen):
                continue
            chosen.append((route, position, distance))
    chosen = chosen[:max_candidates]

    candidates = [
        GoalCandidate(
            i + 1, (float(position[0]), float(position[1])),
            route.polyline.heading_at(distance), tuple(route.lane_ids),
            float(distance))
        for i, (route, position, distance) in enumerate(chosen)
    ]
    logger.debug(
        'sampled %d candidates over %d routes', len(candidates), len(routes))
    return GoalCandidateSet(candidates, routes)


def stop_goal(network, state, horizon=HORIZON, radius=FILLET_RADIUS):
    """
    The goal of a vehicle that stops in its lane: half the distance its
    current speed covers in ``horizon`` seconds along its first route, or
    straight ahead when it is not on any lane.
    """
    distance = 0.5 * state.speed * horizon
    try:
        routes = enumerate_routes(network, state, radius=radius)
    except OffRoadError:
        routes = []
    if routes:
        route = routes[0]
        distance = min(distance, route.length)
        x, y = route.polyline.point_at(distance)
        heading = route.polyline.heading_at(distance)
        lane_ids = tuple(route.lane_ids)
    else:
        x = state.x + distance * math.cos(state.heading)
        y = state.y + distance * math.sin(state.heading)
        heading, lane_ids = state.heading, ()
    return GoalCandidate(1, (float(x), float(y)), heading, lane_ids, distance)
