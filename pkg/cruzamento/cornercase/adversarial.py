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
Corner cases: scenarios rolled out so that the target vehicle, driven by the
policy under test, is likely to fail.

The rollout is the usual one with three differences. The target vehicle is
drawn in orange in the images. The goal-selection prompt carries the
knowledge gathered from the failures of the policy. Social vehicles may come
close to the target, since that is the point, but not to each other.

Offline, goals are ranked by ``adversarial_ranking()``, which prefers the
goals that bring the vehicle closest to where the target is expected to be,
and among them the ones that recreate the kind of collision the policy is
known for.
"""
import collections
import logging
import math

import numpy as np

from cruzamento.cornercase.failures import (
    LANE_CHANGE_SHIFT, OPPOSITE_DIRECTION, SAME_DIRECTION, joins_route)
from cruzamento.cornercase.idm import (
    IdmPolicy, PathFollower, match_route, route_path, straight_path)
from cruzamento.errors import OffRoadError
from cruzamento.gateway.goals import GoalSelectionResponse, rank_by_scores
from cruzamento.metrics import MetricsReport, driving_metrics
from cruzamento.roadnet.routes import enumerate_routes, positions_along
from cruzamento.rollout.rollout import ScenarioRollout
from cruzamento.scenario import DT, T_S, normalize_angle

logger = logging.getLogger(__name__)

BEHAVIOR_BONUS = 5.0
MIN_TRAVEL = 0.1


def target_projection(network, target, trajectory=None, policy=None,
                      steps=T_S, dt=DT):
    """
    Where the target vehicle would drive on a free road under ``policy``:
    along the route its ``trajectory`` follows, or its first route when no
    trajectory is known yet, or straight ahead off the lanes. Returns the
    positions and headings of ``steps + 1`` states.
    """
    policy = policy or IdmPolicy()
    state = target.initial_state
    lane_ids = None
    if network is not None:
        if trajectory is not None:
            lane_ids = match_route(network, trajectory)
        else:
            try:
                routes = enumerate_routes(network, state)
            except OffRoadError:
                routes = []
            lane_ids = routes[0].lane_ids if routes else None

    if lane_ids:
        path = route_path(network, state, lane_ids)
        desired = network.lane(lane_ids[0]).speed_limit
    else:
        desired = max(state.speed, 1.0)
        path = straight_path(state, desired * steps * dt + 10.0)
    follower = PathFollower(path, policy, desired, length=target.length,
                            dt=dt)
    arcs, _ = follower.run(state.speed, steps)
    positions = positions_along(path, arcs, state)
    headings = np.array([path.heading_at(a) for a in arcs])
    return positions, headings, lane_ids


def straight_projection(state, position, steps=T_S):
    """
    Positions of a vehicle going from ``state`` to ``position`` in a
    straight line at constant speed, arriving at the last step::

        >>> from cruzamento.scenario import VehicleState
        >>> straight_projection(VehicleState(0, 0, 0, 5), (10, 0), 2).tolist()
        [[0.0, 0.0], [5.0, 0.0], [10.0, 0.0]]
    """
    start = np.array([state.x, state.y])
    fractions = np.arange(steps + 1)[:, None] / steps
    return start + (np.asarray(position, dtype=np.float64) - start) * \
        fractions


def predicted_behavior(state, candidate, target_heading, target_route=None):
    """
    The behavior class a social vehicle heading for ``candidate`` would have
    relative to a target heading ``target_heading``. Only a candidate route
    entering the target route from a lane off it is merging.
    """
    route = tuple(getattr(candidate, 'route', ()) or ())
    if target_route and route and joins_route(route, target_route):
        return 'merging'

    travel = np.asarray(candidate.position, dtype=np.float64) - \
        (state.x, state.y)
    if np.linalg.norm(travel) < MIN_TRAVEL:
        heading = state.heading
    else:
        heading = math.atan2(travel[1], travel[0])
    difference = abs(normalize_angle(heading - target_heading))
    if difference > OPPOSITE_DIRECTION:
        return 'oncoming'
    if difference >= SAME_DIRECTION:
        return 'crossing'
    normal = (-math.sin(target_heading), math.cos(target_heading))
    shift = abs(float(np.dot(travel, normal)))
    return 'lane_change' if shift > LANE_CHANGE_SHIFT else 'following'


def adversarial_ranking(state, candidates, context, seed=0):
    """
    Ranks ``candidates`` for a social vehicle in ``state`` by predicted
    conflict with the target vehicle: the smaller the closest distance
    between the straight constant-speed drive to the candidate and the
    free-road drive of the target, the better. Candidates whose predicted
    behavior class is the one in ``context['behavior']`` get a bonus.

    ``context`` holds the ``network``, the ``target`` attributes and,
    when known, the ``target_trajectory``. Without a target the ranking only
    follows the behavior class.
    """
    candidates = list(candidates)
    target = context.get('target')
    behavior = context.get('behavior')
    if target is None:
        scores = [
            BEHAVIOR_BONUS * (predicted_behavior(state, c, state.heading) ==
                              behavior)
            for c in candidates]
        return GoalSelectionResponse(
            rank_by_scores(candidates, scores, seed),
            'behavior class only')

    positions, headings, route = target_projection(
        context.get('network'), target, context.get('target_trajectory'))
    steps = len(positions) - 1
    scores = []
    for candidate in candidates:
        projection = straight_projection(state, candidate.position, steps)
        distances = np.linalg.norm(projection - positions, axis=1)
        closest = int(np.argmin(distances))
        score = -float(distances[closest])
        if predicted_behavior(
                state, candidate, headings[closest], route) == behavior:
            score += BEHAVIOR_BONUS
        scores.append(score)
    return GoalSelectionResponse(
        rank_by_scores(candidates, scores, seed),
        'predicted conflict with the orange vehicle ({0})'.format(
            behavior or 'any behavior'))


def corner_case_rollout(
        network, vehicles, planner, selector, knowledge,
        configuration=None, transcript=None):
    """
    The ``ScenarioRollout`` that generates corner cases for ``vehicles``.
    With empty ``knowledge`` it is a plain rollout.
    """
    if not knowledge:
        logger.info('no failure knowledge; rolling out a plain scenario')
        return ScenarioRollout(
            network, planner, selector, configuration, transcript)
    target = next(v for v in vehicles if v.is_target)
    return ScenarioRollout(
        network, planner, selector, configuration, transcript,
        highlight_target=True, knowledge=knowledge, exempt_ids={target.id})


def knowledge_metadata(knowledge):
    return {
        key: value for key, value in sorted(knowledge.context.items())
        if isinstance(value, (str, int, float, list))}


def generate_corner_case(
        network, vehicles, planner, selector, knowledge, seed=0,
        configuration=None, transcript=None, metadata=None):
    """
    Rolls a corner case out. With empty ``knowledge`` the trajectories are
    those of a plain rollout; only the provenance differs.
    """
    vehicles = tuple(vehicles)
    metadata = dict(metadata or {})
    if knowledge:
        metadata['knowledge'] = knowledge_metadata(knowledge)
    rollout = corner_case_rollout(
        network, vehicles, planner, selector, knowledge, configuration,
        transcript)
    return rollout.run(vehicles, seed, 'corner_case', metadata)


def ratio(value, base):
    """
    ``value / base``, with 1 when both are zero::

        >>> ratio(0.5, 0.1), ratio(0.0, 0.0), ratio(1.0, 0.0)
        (5.0, 1.0, inf)
    """
    if base > 0:
        return value / base
    return 1.0 if value == base else math.inf


class CornerCaseReport(collections.namedtuple(
        'CornerCaseReport',
        ('base', 'corner_cases', 'cr_ratio', 'checkpoint_before',
         'checkpoint_after'))):
    """
    Driving metrics of a policy on base scenarios and on corner cases, the
    ratio of their collision rates and the planner checkpoint hashes taken
    before and after the corner cases were generated.
    """
    __slots__ = ()

    @property
    def planner_unchanged(self):
        return self.checkpoint_before == self.checkpoint_after

    def to_dict(self):
        return {
            'base': self.base._asdict(),
            'corner_cases': self.corner_cases._asdict(),
            'cr_ratio': self.cr_ratio,
            'checkpoint_before': self.checkpoint_before,
            'checkpoint_after': self.checkpoint_after,
            'planner_unchanged': self.planner_unchanged,
        }

    def table(self):
        base = MetricsReport(driving=self.base, name='base')
        corner = MetricsReport(driving=self.corner_cases, name='corner_case')
        return '{0}\nCR ratio: {1:.3f}'.format(
            base.table([corner]), self.cr_ratio)


def corner_case_report(
        base, corner_cases, checkpoint_before=None, checkpoint_after=None):
    """
    Compares policy-driven base scenarios with policy-driven corner cases.
    """
    base_metrics = driving_metrics(base)
    corner_metrics = driving_metrics(corner_cases)
    return CornerCaseReport(
        base_metrics, corner_metrics,
        ratio(corner_metrics.cr, base_metrics.cr), checkpoint_before,
        checkpoint_after)
