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
Collisions of a driving policy and what they have in common.

Every scenario is driven again with the policy controlling the target
vehicle (``run_policy()``). The first collision of the target, if any,
becomes a ``CollisionRecord`` with the speed and heading of the other vehicle
relative to the target and how the other vehicle was moving. Records are
counted in a ``FailureFeatureStats`` histogram whose cells are relative speed
bins of 2 m/s, relative heading bins of π/8 and behavior classes::

    >>> stats = FailureFeatureStats.from_records([
    ...     CollisionRecord('a', 30, 5.2, 1.6, 'crossing'),
    ...     CollisionRecord('b', 41, 4.8, 1.7, 'crossing'),
    ...     CollisionRecord('c', 12, -1.0, 0.0, 'following')])
    >>> stats.total, stats.argmax()
    (3, (2, 12, 'crossing'))
    >>> stats.speed_bounds(2), stats.behavior_share('crossing')
    ((4.0, 6.0), 0.6666666666666666)
"""
import collections
import functools
import json
import logging
import math

import numpy as np

from cruzamento.cornercase.idm import IdmPolicy, match_route, run_policy
from cruzamento.errors import ValidationError
from cruzamento.rollout.bev import render_bev
from cruzamento.rollout.legality import first_collision
from cruzamento.scenario import T_S, normalize_angle

logger = logging.getLogger(__name__)

BEHAVIORS = ('following', 'oncoming', 'crossing', 'lane_change', 'merging')
SPEED_BIN = 2.0
HEADING_BIN = math.pi / 8
HEADING_BINS = 16
SAME_DIRECTION = math.pi / 6
OPPOSITE_DIRECTION = 5 * math.pi / 6
LANE_CHANGE_WINDOW = 10
LANE_CHANGE_SHIFT = 1.0


class CollisionRecord(collections.namedtuple(
        'CollisionRecord',
        ('scenario_id', 'timestep', 'relative_speed', 'relative_heading',
         'behavior', 'collider_id', 'snapshot'))):
    """
    The first collision of the target in one scenario: when it happened,
    the target speed minus the speed of the other vehicle along the target
    heading, the heading of the other vehicle relative to the target, the
    behavior class of the other vehicle and a PNG image of the moment.
    """
    __slots__ = ()

    def __new__(
            cls, scenario_id, timestep, relative_speed, relative_heading,
            behavior, collider_id=None, snapshot=b''):
        if not 0 <= timestep <= T_S:
            raise ValidationError(
                'timestep {0} is outside [0, {1}]'.format(timestep, T_S),
                field_path='timestep')
        if behavior not in BEHAVIORS:
            raise ValidationError(
                'unknown behavior {0!r}'.format(behavior),
                field_path='behavior')
        return super(CollisionRecord, cls).__new__(
            cls, str(scenario_id), int(timestep), float(relative_speed),
            float(normalize_angle(relative_heading)), behavior, collider_id,
            snapshot)

    @property
    def cell(self):
        return (
            speed_bin(self.relative_speed),
            heading_bin(self.relative_heading), self.behavior)

    def to_dict(self):
        document = self._asdict()
        del document['snapshot']
        return document


def speed_bin(relative_speed):
    return int(math.floor(relative_speed / SPEED_BIN))


def heading_bin(relative_heading):
    """
    The π/8 wide bin of a relative heading, counted from -π::

        >>> heading_bin(-math.pi), heading_bin(0.0), heading_bin(math.pi)
        (0, 8, 15)
    """
    index = int(math.floor((relative_heading + math.pi) / HEADING_BIN))
    return min(max(index, 0), HEADING_BINS - 1)


def joins_route(route, other_route):
    """
    Whether ``route`` enters a lane of ``other_route`` from a lane that is
    not on it::

        >>> joins_route(('ramp', 'main_2'), ('main_1', 'main_2'))
        True
        >>> joins_route(('main_2', 'main_3'), ('main_1', 'main_2'))
        False
    """
    lanes = set(other_route)
    return any(
        current in lanes and previous not in lanes
        for previous, current in zip(route, route[1:]))


def classify_behavior(
        target, collider, step, target_route=None, collider_route=None):
    """
    How the vehicle driving ``collider`` was moving relative to the one
    driving ``target`` at ``step``. Vehicles whose route enters a lane of the
    target route from a lane off it are merging; otherwise the class follows
    from the heading difference, and vehicles going the same way that moved
    sideways in the last second were changing lanes. A vehicle already on the
    target route is never merging.
    """
    if target_route and collider_route and \
            joins_route(collider_route, target_route):
        return 'merging'

    difference = abs(normalize_angle(
        collider.headings[step] - target.headings[step]))
    if difference > OPPOSITE_DIRECTION:
        return 'oncoming'
    if difference >= SAME_DIRECTION:
        return 'crossing'

    heading = target.headings[step]
    normal = np.array([-math.sin(heading), math.cos(heading)])
    start = max(step - LANE_CHANGE_WINDOW, 0)
    shift = float(np.dot(
        collider.positions[step] - collider.positions[start], normal))
    return 'lane_change' if abs(shift) > LANE_CHANGE_SHIFT else 'following'


def relative_features(target, collider, step):
    """
    The relative speed along the target heading and the relative heading::

        >>> from cruzamento.scenario import Trajectory, VehicleState
        >>> a = Trajectory.from_states([VehicleState(0, 0, 0, 10)])
        >>> b = Trajectory.from_states([VehicleState(5, 0, math.pi, 5)])
        >>> relative_features(a, b, 0)
        (15.0, 3.141592653589793)
    """
    difference = float(normalize_angle(
        collider.headings[step] - target.headings[step]))
    speed = float(
        target.speeds[step] - collider.speeds[step] * math.cos(difference))
    return speed, difference


class FailureFeatureStats(object):
    """
    A histogram of collision records by feature cell. Stats merge with ``+``,
    and merging is associative and does not depend on the order of the
    records.
    """

    def __init__(self, histogram=None):
        self.histogram = collections.Counter(histogram or {})

    @staticmethod
    def from_records(records):
        return FailureFeatureStats(
            collections.Counter(r.cell for r in records))

    @property
    def total(self):
        return sum(self.histogram.values())

    def __bool__(self):
        return self.total > 0

    def __add__(self, other):
        return FailureFeatureStats(self.histogram + other.histogram)

    def __eq__(self, other):
        return (
            isinstance(other, FailureFeatureStats) and
            +self.histogram == +other.histogram)

    def __ne__(self, other):
        return not self == other

    def argmax(self):
        """
        The most frequent cell; ties go to the smallest cell. ``None`` when
        there are no records.
        """
        if not self:
            return None
        return min(
            self.histogram, key=lambda c: (-self.histogram[c], c))

    def share(self, cell):
        return self.histogram[cell] / self.total if self else 0.0

    def behavior_counts(self):
        counts = collections.Counter()
        for (_, _, behavior), count in self.histogram.items():
            counts[behavior] += count
        return counts

    def behavior_share(self, behavior):
        return self.behavior_counts()[behavior] / self.total if self else 0.0

    @staticmethod
    def speed_bounds(index):
        return (index * SPEED_BIN, (index + 1) * SPEED_BIN)

    @staticmethod
    def heading_bounds(index):
        low = -math.pi + index * HEADING_BIN
        return (low, low + HEADING_BIN)

    def to_dict(self):
        cells = [
            {'speed_bin': s, 'heading_bin': h, 'behavior': b,
             'count': self.histogram[(s, h, b)]}
            for s, h, b in sorted(self.histogram)]
        return {'total': self.total, 'argmax': self.argmax(), 'cells': cells}

    @staticmethod
    def from_dict(document):
        return FailureFeatureStats({
            (c['speed_bin'], c['heading_bin'], c['behavior']): c['count']
            for c in document['cells']})

    def __repr__(self):
        return 'FailureFeatureStats(<{0} records>)'.format(self.total)


class FailureCollection(collections.namedtuple(
        'FailureCollection', ('records', 'stats', 'evaluated'))):
    """
    The collision records, their statistics and the scenarios as driven by
    the policy, in input order.
    """
    __slots__ = ()


def find_failure(scenario, scenario_id='', snapshot=True):
    """
    The first collision of the target of an already evaluated scenario as a
    ``CollisionRecord``, or ``None``. Simultaneous collisions go to the
    vehicle listed first.
    """
    target = scenario.target
    trajectory = scenario.trajectories[target.id]
    first = None
    for vehicle in scenario.vehicles:
        if vehicle.id == target.id:
            continue
        other = scenario.trajectories[vehicle.id]
        step = first_collision(trajectory, target, other, vehicle)
        if step is not None and (first is None or step < first[0]):
            first = (step, vehicle)
    if first is None:
        return None

    step, collider = first
    other = scenario.trajectories[collider.id]
    speed, heading = relative_features(trajectory, other, step)
    network = scenario.network
    behavior = classify_behavior(
        trajectory, other, step, match_route(network, trajectory),
        match_route(network, other))

    image = b''
    if snapshot:
        states = {
            v.id: scenario.trajectories[v.id][step]
            for v in scenario.vehicles}
        image = render_bev(
            network, scenario.vehicles, target.id, (), True, states).png
    return CollisionRecord(
        scenario_id, step, speed, heading, behavior, collider.id, image)


def evaluate_scenario(policy, snapshot, job):
    """
    Runs the policy on one ``(scenario_id, scenario)`` job; the unit of work
    of ``collect_failures()``.
    """
    scenario_id, scenario = job
    evaluated = run_policy(scenario, policy)
    return evaluated, find_failure(evaluated, scenario_id, snapshot)


def collect_failures(scenarios, policy=None, snapshot=True, pool=None):
    """
    Evaluates ``policy`` (the intelligent driver model by default) on every
    scenario and collects its collisions. Scenarios are named by the ``id``
    in their metadata, or by their position. ``pool`` is anything with an
    order-preserving ``map()``.
    """
    policy = policy or IdmPolicy()
    jobs = [
        (s.metadata.get('id', str(i)), s) for i, s in enumerate(scenarios)]
    work = functools.partial(evaluate_scenario, policy, snapshot)
    results = list((pool.map if pool is not None else map)(work, jobs))

    evaluated = [scenario for scenario, _ in results]
    records = [record for _, record in results if record is not None]
    stats = FailureFeatureStats.from_records(records)
    logger.info(
        '%d collisions in %d scenarios', len(records), len(evaluated))
    return FailureCollection(records, stats, evaluated)


def write_records(records, path):
    """
    Writes one JSON document per line, without the snapshots.
    """
    with open(path, 'w', encoding='utf-8') as f:
        for record in records:
            f.write(json.dumps(record.to_dict(), sort_keys=True) + '\n')
