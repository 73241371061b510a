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
The intelligent driver model, and vehicles driven by it along a route.

The model gives the acceleration of a vehicle from its speed, its desired
speed and, when there is a leader, the gap to it and the speed difference. On
a free road a vehicle at its desired speed keeps it::

    >>> policy = IdmPolicy(desired_speed=15.0)
    >>> policy.acceleration(15.0)
    0.0
    >>> policy.acceleration(0.0)
    2.0

The same model drives the target vehicle when a driving policy is evaluated
(``run_policy()``) and vehicles for which the planner found nothing legal
during rollout (``idm_trajectory()``).
"""
import collections
import logging
import math

import numpy as np

from cruzamento.errors import OffRoadError, ParameterError
from cruzamento.planner.encoding import derive_states
from cruzamento.roadnet.geometry import Polyline, box_corners, boxes_overlap
from cruzamento.roadnet.routes import (
    enumerate_routes, positions_along, route_polyline)
from cruzamento.scenario import DT, T_S

logger = logging.getLogger(__name__)

LOOKAHEAD = 100.0
LATERAL_TOLERANCE = 2.0
CURVE_LATERAL_ACCEL = 3.0
FALLBACK_MAX_DECEL = 7.5
MIN_GAP = 1e-3


class IdmPolicy(collections.namedtuple(
        'IdmPolicy',
        ('desired_speed', 'time_headway', 'max_accel', 'comfortable_decel',
         'min_gap', 'delta'))):
    """
    The parameters of the model, in meters and seconds. Without a
    ``desired_speed`` vehicles want to drive at the speed limit of their
    lane.
    """
    __slots__ = ()
    name = 'idm'

    def __new__(
            cls, desired_speed=None, time_headway=1.5, max_accel=2.0,
            comfortable_decel=2.0, min_gap=2.0, delta=4.0):
        values = {
            'time_headway': time_headway, 'max_accel': max_accel,
            'comfortable_decel': comfortable_decel, 'min_gap': min_gap,
            'delta': delta,
        }
        if desired_speed is not None:
            values['desired_speed'] = desired_speed
        for name, value in sorted(values.items()):
            if not value > 0:
                raise ParameterError(
                    name, value,
                    message='{0} must be positive, got {1!r}'.format(
                        name, value))
        return super(IdmPolicy, cls).__new__(
            cls, None if desired_speed is None else float(desired_speed),
            float(time_headway), float(max_accel), float(comfortable_decel),
            float(min_gap), float(delta))

    @staticmethod
    def from_config(configuration, desired_speed=None):
        idm = configuration.get('idm')
        return IdmPolicy(
            desired_speed, idm['time_headway'], idm['max_accel'],
            idm['comfortable_decel'], idm['min_gap'], idm['delta'])

    def acceleration(
            self, speed, gap=None, approach=0.0, desired_speed=None):
        """
        The acceleration at ``speed``. ``gap`` is the bumper-to-bumper
        distance to the leader, if any, and ``approach`` the speed of this
        vehicle minus the speed of the leader.
        """
        desired = desired_speed or self.desired_speed
        if desired is None:
            raise ParameterError(
                'desired_speed', None, message='no desired speed is known')
        free = 1.0 - (speed / desired) ** self.delta
        if gap is None:
            return self.max_accel * free
        wanted = (
            self.min_gap + speed * self.time_headway +
            speed * approach /
            (2 * math.sqrt(self.max_accel * self.comfortable_decel)))
        return self.max_accel * (free - (wanted / max(gap, MIN_GAP)) ** 2)


def ballistic_step(speed, accel, dt=DT):
    """
    Distance covered and final speed after ``dt`` seconds at constant
    ``accel``. A vehicle braking to a stop inside the step stays stopped::

        >>> ballistic_step(10.0, -2.0, 1.0)
        (9.0, 8.0)
        >>> ballistic_step(1.0, -4.0, 1.0)
        (0.125, 0.0)
    """
    new_speed = speed + accel * dt
    if new_speed < 0:
        distance = -speed * speed / (2 * accel) if accel < 0 else 0.0
        return distance, 0.0
    return (speed + new_speed) / 2 * dt, new_speed


class TrafficView(object):
    """
    Other vehicles as seen from a path: for every timestep, how far along the
    path they are and how far from it. Vehicles within
    ``lateral_tolerance`` meters of the path are in the way.
    """

    def __init__(self, path, others, lateral_tolerance=LATERAL_TOLERANCE):
        self.path = path
        self.lateral_tolerance = lateral_tolerance
        self.entries = []
        for attributes, trajectory in others:
            self.entries.append((
                attributes, trajectory,
                path.projections(trajectory.positions),
                path.distances(trajectory.positions)))

    def leader(self, step, arc, length, lookahead=LOOKAHEAD):
        """
        The nearest vehicle ahead at ``step`` as a pair ``(gap, speed)``, or
        ``None``.
        """
        nearest = None
        for attributes, trajectory, arcs, lateral in self.entries:
            i = min(step, len(trajectory) - 1)
            if lateral[i] > self.lateral_tolerance:
                continue
            ahead = arcs[i] - arc
            if not 0 < ahead <= lookahead:
                continue
            gap = ahead - (length + attributes.length) / 2
            if nearest is None or gap < nearest[0]:
                nearest = (gap, float(trajectory.speeds[i]))
        return nearest


class PathFollower(object):
    """
    Drives a vehicle of ``length`` meters along ``path`` with an IDM
    ``policy``. Optionally brakes no harder than ``max_decel``, slows down
    before curves so that lateral acceleration stays under
    ``lateral_limit``, and stops before the end of the path.
    """

    def __init__(
            self, path, policy, desired_speed, traffic=None, length=4.5,
            max_decel=None, lateral_limit=None, stop_at_end=False,
            lookahead=LOOKAHEAD, dt=DT):
        self.path = path
        self.policy = policy
        self.desired_speed = desired_speed
        self.traffic = traffic
        self.length = length
        self.max_decel = max_decel
        self.lateral_limit = lateral_limit
        self.stop_at_end = stop_at_end
        self.lookahead = lookahead
        self.dt = dt
        self.curvatures = path.curvatures() if lateral_limit else None

    def accel(self, step, arc, speed):
        leader = None
        if self.traffic is not None:
            leader = self.traffic.leader(
                step, arc, self.length, self.lookahead)
        if self.stop_at_end:
            end = (self.path.length - arc - self.length / 2, 0.0)
            if leader is None or end[0] < leader[0]:
                leader = end

        if leader is None:
            accel = self.policy.acceleration(
                speed, desired_speed=self.desired_speed)
        else:
            gap, leader_speed = leader
            accel = self.policy.acceleration(
                speed, gap, speed - leader_speed, self.desired_speed)

        if self.lateral_limit:
            window = (self.path.cumulative >= arc) & \
                (self.path.cumulative <= arc + max(10.0, 2 * speed))
            curvature = float(np.max(self.curvatures[window], initial=0.0))
            cap = math.sqrt(self.lateral_limit / max(curvature, 1e-6))
            if speed > cap:
                accel = min(accel, (cap - speed) / self.dt)
        if self.max_decel is not None:
            accel = max(accel, -self.max_decel)
        return accel

    def run(self, speed, steps=T_S, start_arc=0.0, stop_when=None):
        """
        The arc lengths and speeds of ``steps + 1`` states. When
        ``stop_when(step, arc)`` is true the vehicle freezes where it is.
        """
        arcs, speeds = [start_arc], [speed]
        arc = start_arc
        for step in range(steps):
            accel = self.accel(step, arc, speed)
            distance, speed = ballistic_step(speed, accel, self.dt)
            arc += distance
            arcs.append(arc)
            speeds.append(speed)
            if stop_when is not None and stop_when(step + 1, arc):
                remaining = steps - step - 1
                arcs.extend([arc] * remaining)
                speeds.extend([0.0] * remaining)
                break
        return np.array(arcs), np.array(speeds)


def straight_path(state, length):
    return Polyline([
        (state.x, state.y),
        (state.x + length * math.cos(state.heading),
         state.y + length * math.sin(state.heading))])


def route_path(network, state, lane_ids):
    """
    The rounded path along ``lane_ids`` starting at the projection of
    ``state`` on the first lane.
    """
    first = network.lane(lane_ids[0]).polyline
    return route_polyline(
        network, lane_ids, first.project((state.x, state.y)))


def match_route(network, trajectory):
    """
    The lane sequence a trajectory follows best: the route from its first
    state whose path stays closest to its positions on average. ``None`` when
    the trajectory does not start on a lane.
    """
    try:
        routes = enumerate_routes(network, trajectory[0])
    except OffRoadError:
        return None
    if not routes:
        return None
    errors = [
        float(np.mean(route.polyline.distances(trajectory.positions)))
        for route in routes]
    return routes[int(np.argmin(errors))].lane_ids


def idm_trajectory(
        network, vehicle, lane_ids, others=(), policy=None,
        max_decel=FALLBACK_MAX_DECEL, lateral_limit=CURVE_LATERAL_ACCEL,
        steps=T_S, dt=DT):
    """
    A lane-following trajectory for ``vehicle`` along ``lane_ids``, keeping
    its distance to the ``others``, pairs of attributes and trajectories, that
    drive on the same path. It stops before the path ends.
    """
    policy = policy or IdmPolicy()
    state = vehicle.initial_state
    path = route_path(network, state, lane_ids)
    desired = policy.desired_speed or max(
        network.lane(lane_ids[0]).speed_limit, state.speed)
    follower = PathFollower(
        path, policy, desired, TrafficView(path, others), vehicle.length,
        max_decel, lateral_limit, stop_at_end=True, dt=dt)
    arcs, _ = follower.run(state.speed, steps)
    return derive_states(positions_along(path, arcs, state), state, dt)


def extend_path(path, extra):
    """
    ``path`` continued straight on for ``extra`` meters past its end::

        >>> extend_path(Polyline([(0, 0), (10, 0)]), 5).length
        15.0
    """
    heading = float(path.segment_headings[-1])
    x, y = path.points[-1]
    end = (x + extra * math.cos(heading), y + extra * math.sin(heading))
    return Polyline(np.concatenate([path.points, [end]]))


def braking_trajectory(
        network, vehicle, lane_ids=None, max_decel=FALLBACK_MAX_DECEL,
        decel_limit=None, steps=T_S, dt=DT):
    """
    Brakes at ``max_decel`` and stays stopped, along ``lane_ids`` or
    straight ahead. A vehicle that cannot stop before the path ends brakes
    harder, up to ``decel_limit``, and whatever is left of its stopping
    distance runs straight on past the end.
    """
    state = vehicle.initial_state
    speed = state.speed
    decel = max_decel
    if lane_ids:
        path = route_path(network, state, lane_ids)
        if speed > 0:
            decel = max(decel, speed * speed / (2 * path.length))
            if decel_limit is not None:
                decel = min(decel, max(decel_limit, max_decel))
    stop = speed * speed / (2 * decel)
    if not lane_ids:
        path = straight_path(state, max(stop, 1.0))
    elif stop > path.length:
        path = extend_path(path, stop - path.length + 1.0)
    times = np.minimum(np.arange(steps + 1) * dt, speed / decel)
    arcs = speed * times - 0.5 * decel * times ** 2
    return derive_states(positions_along(path, arcs, state), state, dt)


def run_policy(scenario, policy=None, lookahead=LOOKAHEAD):
    """
    Replaces the trajectory of the target vehicle with one driven by
    ``policy`` along its original route. The other vehicles replay their
    trajectories. At the first collision the target stops where it is.

    A target that does not start on a lane drives straight ahead.
    """
    policy = policy or IdmPolicy()
    network = scenario.network
    target = scenario.target
    original = scenario.trajectories[target.id]
    state = original[0]
    others = [
        (vehicle, scenario.trajectories[vehicle.id])
        for vehicle in scenario.vehicles if vehicle.id != target.id]

    lane_ids = match_route(network, original)
    if lane_ids is not None:
        path = route_path(network, state, lane_ids)
        desired = policy.desired_speed or \
            network.lane(lane_ids[0]).speed_limit
    else:
        logger.warning(
            'target %s is not on a lane; it drives straight ahead', target.id)
        desired = policy.desired_speed or max(state.speed, 1.0)
        path = straight_path(state, desired * T_S * DT + 10.0)

    other_boxes = [
        box_corners(
            t.positions[:, 0], t.positions[:, 1], t.headings,
            np.full(len(t), v.length), np.full(len(t), v.width))
        for v, t in others]

    def collides(step, arc):
        x, y = path.point_at(arc)
        box = box_corners(
            x, y, path.heading_at(arc), target.length, target.width)
        return any(
            bool(boxes_overlap(box, boxes[min(step, len(boxes) - 1)]))
            for boxes in other_boxes)

    follower = PathFollower(
        path, policy, desired, TrafficView(path, others), target.length,
        lookahead=lookahead, dt=original.dt)
    arcs, _ = follower.run(
        state.speed, len(original) - 1, stop_when=collides)
    trajectory = derive_states(
        positions_along(path, arcs, state), state, original.dt)

    trajectories = dict(scenario.trajectories)
    trajectories[target.id] = trajectory
    metadata = dict(scenario.metadata, policy=policy.name)
    return scenario.replace(trajectories=trajectories, metadata=metadata)
