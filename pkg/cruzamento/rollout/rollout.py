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
Scenario rollout: from placed vehicles to a complete scenario.

Vehicles are handled one at a time, in the order of the vehicle list. For
each of them:

1. goal candidates are sampled on the routes it can follow;
2. the scene is rendered with the candidates marked;
3. a selector ranks the candidates;
4. the planner draws a trajectory towards the best goal;
5. the legality checker compares it with the trajectories already accepted.

A rejected trajectory is drawn again with another noise seed, up to
``retries`` times, before the next goal is tried. When every goal fails the
vehicle follows its lane with the intelligent driver model; if even that is
illegal it brakes to a stop, and a social vehicle that cannot stop legally is
left out of the scenario. Every decision is logged in the transcript and
counted in the scenario metadata.
"""
import functools
import logging

import numpy as np

from cruzamento.config import Configuration
from cruzamento.cornercase.idm import (
    IdmPolicy, braking_trajectory, idm_trajectory)
from cruzamento.errors import NoCandidateError, OffRoadError
from cruzamento.gateway.transcript import TranscriptStore
from cruzamento.interfaces import has_plan_method, has_select_method
from cruzamento.rollout.bev import render_bev
from cruzamento.rollout.candidates import (
    GoalCandidateSet, sample_goal_candidates, stop_goal)
from cruzamento.rollout.legality import LegalityLimits, check_legality
from cruzamento.rollout.selectors import PARSE_FAILURE, GoalSelectionRequest
from cruzamento.roadnet.routes import enumerate_routes
from cruzamento.scenario import Scenario

logger = logging.getLogger(__name__)

COUNTERS = (
    'retries', 'fallbacks', 'holds', 'dropped', 'parse_failures',
    'stop_goals', 'clamped_markers')

SELECTION = 0
NOISE = 1

# share of the legal deceleration a hold may use to stop before a dead end
HOLD_DECEL_SHARE = 0.95


def derive_seed(*parts):
    """
    A 63-bit seed that depends on every part, all non-negative integers::

        >>> derive_seed(1, 2) == derive_seed(1, 2) != derive_seed(2, 1)
        True
    """
    state = np.random.SeedSequence([int(p) for p in parts]).generate_state(
        1, dtype=np.uint64)
    return int(state[0]) >> 1


class ScenarioRollout(object):
    """
    Rolls scenarios out on one map with one planner and one selector.

    ``highlight_target`` draws the target vehicle in orange in every image;
    ``knowledge`` is passed on to the selector; vehicles in ``exempt_ids``
    may be touched by others without the trajectory being rejected. After
    ``run()``, ``images`` holds the image rendered for every vehicle.
    """

    def __init__(
            self, network, planner, selector, configuration=None,
            transcript=None, highlight_target=False, knowledge=None,
            exempt_ids=()):
        if not has_plan_method(planner):
            raise TypeError('{0!r} has no plan() method'.format(planner))
        if not has_select_method(selector):
            raise TypeError('{0!r} has no select() method'.format(selector))
        configuration = configuration or Configuration()
        self.network = network
        self.planner = planner
        self.selector = selector
        self.transcript = (
            transcript if transcript is not None else TranscriptStore())
        self.highlight_target = highlight_target
        self.knowledge = knowledge
        self.exempt_ids = frozenset(exempt_ids)

        self.settings = configuration.get('rollout')
        self.limits = LegalityLimits.from_config(configuration)
        self.policy = IdmPolicy.from_config(configuration)
        self.max_decel = configuration.get('idm.fallback_max_decel')
        self.configuration = configuration
        self.images = {}
        self.counts = {}

    def run(self, vehicles, seed=0, provenance='generated', metadata=None):
        vehicles = tuple(vehicles)
        self.images = {}
        self.counts = dict.fromkeys(COUNTERS, 0)
        accepted, goals = [], {}

        for vehicle in vehicles:
            outcome = self.roll_vehicle(vehicle, vehicles, accepted, seed)
            if outcome is None:
                self.counts['dropped'] += 1
                self.transcript.log('dropped', seed=seed, vehicle=vehicle.id)
                logger.warning(
                    'vehicle %s has no legal trajectory and is dropped',
                    vehicle.id)
                continue
            trajectory, goal, source = outcome
            accepted.append((vehicle, trajectory))
            goals[str(vehicle.id)] = {
                'number': goal.number if goal is not None else None,
                'position': list(goal.position) if goal is not None else None,
                'error': (
                    float(np.linalg.norm(
                        trajectory.positions[-1] - goal.position))
                    if goal is not None else None),
                'source': source,
            }

        metadata = dict(metadata or {})
        metadata.update({
            'rollout': dict(self.counts),
            'goals': goals,
            'planner': getattr(self.planner, 'name', type(self.planner)
                               .__name__),
            'selector': type(self.selector).__name__,
        })
        kept = [vehicle for vehicle, _ in accepted]
        return Scenario(
            self.network, kept,
            {vehicle.id: trajectory for vehicle, trajectory in accepted},
            seed, provenance, metadata)

    def candidates_for(self, vehicle):
        state = vehicle.initial_state
        horizon = self.settings['horizon']
        try:
            return sample_goal_candidates(
                self.network, state, self.settings['max_candidates'],
                horizon, self.settings['max_accel'],
                self.settings['band_split'], self.settings['max_depth'])
        except (NoCandidateError, OffRoadError) as e:
            logger.info(
                'vehicle %s: %s; it will stop in its lane', vehicle.id, e)
            self.counts['stop_goals'] += 1
            return GoalCandidateSet(
                [stop_goal(self.network, state, horizon)])

    def roll_vehicle(self, vehicle, vehicles, accepted, seed):
        """
        The accepted trajectory of ``vehicle`` with its goal and where it
        came from (``'planner'``, ``'idm'`` or ``'hold'``), or ``None``.
        """
        candidates = self.candidates_for(vehicle)
        image = render_bev(
            self.network, vehicles, vehicle.id, candidates,
            self.highlight_target)
        self.images[vehicle.id] = image
        self.counts['clamped_markers'] += len(image.clamped)

        request = GoalSelectionRequest(
            self.network, vehicle, vehicles, candidates, image,
            derive_seed(seed, vehicle.id, SELECTION), self.knowledge,
            accepted)
        response = self.selector.select(request)
        if PARSE_FAILURE in response.warnings:
            self.counts['parse_failures'] += 1
        self.transcript.log(
            'goals_offered', seed=seed, vehicle=vehicle.id,
            candidates={
                c.number: [round(c.position[0], 3), round(c.position[1], 3)]
                for c in candidates},
            ranking=list(response.ranked_goal_ids),
            warnings=list(response.warnings), clamped=list(image.clamped))

        exempt = self.exempt_ids - {vehicle.id}
        for rank, number in enumerate(response.ranked_goal_ids):
            goal = candidates.by_number(number)
            for attempt in range(self.settings['retries']):
                noise_seed = derive_seed(
                    seed, vehicle.id, NOISE, rank, attempt)
                trajectory = self.planner.plan(
                    self.network, vehicle.initial_state, goal, noise_seed)
                report = check_legality(
                    self.network, trajectory, accepted, vehicle,
                    self.limits, exempt)
                if report.passed:
                    self.transcript.log(
                        'accepted', seed=seed, vehicle=vehicle.id,
                        goal=number, attempt=attempt, source='planner')
                    return trajectory, goal, 'planner'
                self.counts['retries'] += 1
                self.transcript.log(
                    'rejected', seed=seed, vehicle=vehicle.id, goal=number,
                    attempt=attempt, failures=report.failures())

        return self.fall_back(vehicle, candidates, response, accepted, seed)

    def fall_back(self, vehicle, candidates, response, accepted, seed):
        lane_ids = self._fallback_route(vehicle, candidates, response)
        exempt = self.exempt_ids - {vehicle.id}

        attempts = []
        if lane_ids:
            attempts.append(('idm', lambda: idm_trajectory(
                self.network, vehicle, lane_ids, accepted, self.policy,
                self.max_decel)))
        for hold_ids in self._hold_routes(vehicle, lane_ids):
            attempts.append(('hold', functools.partial(
                braking_trajectory, self.network, vehicle, hold_ids,
                self.max_decel, HOLD_DECEL_SHARE * self.limits.max_accel)))

        trajectory = None
        for source, make in attempts:
            trajectory = make()
            report = check_legality(
                self.network, trajectory, accepted, vehicle, self.limits,
                exempt)
            self.transcript.log(
                'fallback', seed=seed, vehicle=vehicle.id, kind=source,
                passed=report.passed, failures=report.failures())
            if report.passed:
                self.counts['fallbacks' if source == 'idm' else 'holds'] += 1
                return trajectory, None, source

        if vehicle.is_target:
            logger.error(
                'target vehicle %s has no legal trajectory; keeping it '
                'braking', vehicle.id)
            self.counts['holds'] += 1
            return trajectory, None, 'hold'
        return None

    def _hold_routes(self, vehicle, lane_ids):
        """
        The lanes to brake along, in order of preference: ``lane_ids`` when
        the vehicle can stop on them, then every route ahead of it from the
        longest down.
        """
        state = vehicle.initial_state
        needed = state.speed * state.speed / (2 * self.max_decel)
        try:
            routes = enumerate_routes(
                self.network, state, self.settings['max_depth'])
        except OffRoadError:
            routes = []
        if not routes:
            return [lane_ids]
        routes = sorted(routes, key=lambda r: -r.polyline.length)
        preferred = [
            tuple(r.lane_ids) for r in routes
            if tuple(r.lane_ids) == tuple(lane_ids or ()) and
            r.polyline.length >= needed]
        return preferred + [
            tuple(r.lane_ids) for r in routes
            if tuple(r.lane_ids) not in preferred]

    def _fallback_route(self, vehicle, candidates, response):
        for number in response.ranked_goal_ids:
            route = candidates.by_number(number).route
            if route:
                return tuple(route)
        try:
            routes = enumerate_routes(self.network, vehicle.initial_state)
        except OffRoadError:
            return None
        return tuple(routes[0].lane_ids) if routes else None


def rollout_scenario(
        network, vehicles, planner, selector, configuration=None, seed=0,
        transcript=None, highlight_target=False, knowledge=None,
        exempt_ids=(), provenance='generated', metadata=None):
    """
    Rolls one scenario out; see ``ScenarioRollout``. The same inputs and seed
    give the same scenario.
    """
    rollout = ScenarioRollout(
        network, planner, selector, configuration, transcript,
        highlight_target, knowledge, exempt_ids)
    return rollout.run(vehicles, seed, provenance, metadata)
