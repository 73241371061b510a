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
Goal selectors rank the goal candidates of a vehicle. Any object with a
``select(request)`` method returning a ``GoalSelectionResponse`` is a
selector; this module has the two rollout uses:

``GatewayGoalSelector``
    asks a vision model through the gateway, with the bird's-eye image;
``RandomGoalSelector``
    shuffles the candidates, for rollouts without goal selection.
"""
import collections
import logging

import numpy as np

from cruzamento.errors import GoalParseError
from cruzamento.gateway.goals import (
    GoalSelectionResponse, goal_selection_query, mock_goal_selector,
    parse_goal_selection)

logger = logging.getLogger(__name__)

PARSE_FAILURE = 'unparseable answer, heuristic ranking used'


class GoalSelectionRequest(collections.namedtuple(
        'GoalSelectionRequest',
        ('network', 'vehicle', 'vehicles', 'candidates', 'image',
         'request_seed', 'knowledge', 'accepted'))):
    """
    What a selector knows: the map, the vehicle to choose for, all vehicles
    of the scenario, the candidates, the rendered ``BevImage``, a seed and
    optional failure knowledge (an object with ``text``, ``images`` and
    ``context``) and the ``(attributes, trajectory)`` pairs accepted so far.
    """
    __slots__ = ()

    def __new__(
            cls, network, vehicle, vehicles, candidates, image,
            request_seed=0, knowledge=None, accepted=()):
        return super(GoalSelectionRequest, cls).__new__(
            cls, network, vehicle, tuple(vehicles), candidates, image,
            request_seed, knowledge, tuple(accepted))


class GatewayGoalSelector(object):
    """
    Builds the goal-selection query and sends it to the vision backend of
    ``gateway``. An answer without a usable ranking does not stop the
    rollout: the candidates are then ranked by the offline heuristic and the
    response carries ``PARSE_FAILURE`` among its warnings.

    With failure knowledge the prompt gets the knowledge text and exemplar
    images, and, except for the target vehicle itself, the query context
    gets what offline backends need to rank candidates adversarially.
    """

    def __init__(self, gateway, temperature=0.0, max_tokens=512, scene=''):
        self.gateway = gateway
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.scene = scene

    @staticmethod
    def from_config(gateway, configuration):
        vision = configuration.get('gateway.vision')
        return GatewayGoalSelector(
            gateway, vision['temperature'], vision['max_tokens'])

    def select(self, request):
        knowledge = request.knowledge
        context = {}
        text, images = '', ()
        if knowledge is not None:
            text, images = knowledge.text, knowledge.images
            if knowledge.context and not request.vehicle.is_target:
                target = next(
                    (v for v in request.vehicles if v.is_target), None)
                trajectory = next(
                    (t for v, t in request.accepted if v.is_target), None)
                context['adversarial'] = dict(
                    knowledge.context, network=request.network,
                    target=target, target_trajectory=trajectory)
        query = goal_selection_query(
            request.vehicle, request.candidates, request.image.png,
            request.request_seed, self.scene, text, context,
            self.temperature, self.max_tokens, images)
        answer = self.gateway.complete_vision(query)
        try:
            return parse_goal_selection(answer, request.candidates.numbers)
        except GoalParseError as e:
            logger.warning(
                'vehicle %s: %s; using the heuristic ranking',
                request.vehicle.id, e)
            fallback = mock_goal_selector(
                request.vehicle.initial_state, request.candidates,
                request.request_seed)
            return GoalSelectionResponse(
                fallback.ranked_goal_ids, fallback.rationale,
                (PARSE_FAILURE,))


class RandomGoalSelector(object):
    """
    Ranks candidates in a random order that depends on ``seed`` and the
    request seed only::

        >>> from cruzamento.rollout.candidates import (
        ...     GoalCandidate, GoalCandidateSet)
        >>> candidates = GoalCandidateSet(
        ...     [GoalCandidate(n, (n, 0), 0, ('a',), n) for n in (1, 2, 3)])
        >>> request = GoalSelectionRequest(None, None, (), candidates, None)
        >>> ranking = RandomGoalSelector(7).select(request).ranked_goal_ids
        >>> sorted(ranking)
        [1, 2, 3]
        >>> RandomGoalSelector(7).select(request).ranked_goal_ids == ranking
        True
    """

    def __init__(self, seed=0):
        self.seed = seed

    def select(self, request):
        rng = np.random.default_rng([self.seed, request.request_seed])
        numbers = request.candidates.numbers
        order = rng.permutation(len(numbers))
        return GoalSelectionResponse(
            [numbers[i] for i in order], 'random order')
