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
Goal selection through a vision model: the prompt sent, the grammar of the
answer and the offline heuristic that stands in for the model.

Models are asked to answer with a line like ``RANKING: 3, 1, 4``::

    >>> parse_goal_selection('RANKING: 2, 5, 1', range(1, 7)).ranked_goal_ids
    [2, 5, 1]
"""
import collections
import logging
import math
import re

import numpy as np

from cruzamento.errors import GoalParseError
from cruzamento.gateway.query import VisionQuery
from cruzamento.prompts import load_prompt
from cruzamento.scenario import DT, T_S, normalize_angle

logger = logging.getLogger(__name__)

ALIGNMENT_WEIGHT = 1.0
DISTANCE_WEIGHT = 0.5

RANKING_LINE = re.compile(r'^\s*\**\s*RANKING\s*\**\s*:(?P<ids>.*)$',
                          re.IGNORECASE | re.MULTILINE)
RATIONALE_LINE = re.compile(r'^\s*RATIONALE\s*:(?P<text>.*)$',
                            re.IGNORECASE | re.MULTILINE)


class GoalSelectionResponse(collections.namedtuple(
        'GoalSelectionResponse',
        ('ranked_goal_ids', 'rationale', 'warnings'))):
    """
    A ranking of goal candidates, most likely first.
    """

    def __new__(cls, ranked_goal_ids, rationale='', warnings=()):
        return super(GoalSelectionResponse, cls).__new__(
            cls, list(ranked_goal_ids), rationale, tuple(warnings))

    def to_text(self):
        return 'RANKING: {0}\nRATIONALE: {1}\n'.format(
            ', '.join(str(i) for i in self.ranked_goal_ids), self.rationale)


def parse_goal_selection(text, offered_ids):
    """
    Reads the ranking from a model answer. Ids that were not offered, or that
    repeat, are dropped with a warning::

        >>> r = parse_goal_selection('RANKING: 9, 2', range(1, 7))
        >>> r.ranked_goal_ids
        [2]
        >>> r.warnings
        ('dropped unknown id 9',)

    An answer with no ranking line, or with nothing usable in it, is an error::

        >>> parse_goal_selection('I would go straight.', [1, 2])
        Traceback (most recent call last):
          ...
        cruzamento.errors.GoalParseError: ranking: no RANKING line in answer
    """
    offered = set(offered_ids)
    if not offered:
        raise GoalParseError('no candidates were offered')

    match = RANKING_LINE.search(text)
    if match is None:
        raise GoalParseError('no RANKING line in answer')

    ranked, warnings = [], []
    for token in re.split(r'[\s,;>]+', match.group('ids')):
        token = token.strip().strip('.#*[]()')
        if not token:
            continue
        try:
            goal_id = int(token)
        except ValueError:
            warnings.append('dropped token {0!r}'.format(token))
            continue
        if goal_id not in offered:
            warnings.append('dropped unknown id {0}'.format(goal_id))
        elif goal_id in ranked:
            warnings.append('dropped repeated id {0}'.format(goal_id))
        else:
            ranked.append(goal_id)

    for warning in warnings:
        logger.warning('goal selection: %s', warning)
    if not ranked:
        raise GoalParseError(
            'RANKING line has no offered id: {0!r}'.format(
                match.group('ids').strip()))

    rationale = RATIONALE_LINE.search(text)
    return GoalSelectionResponse(
        ranked, rationale.group('text').strip() if rationale else '',
        warnings)


def candidate_scores(state, candidates, horizon=T_S * DT):
    """
    The heuristic score of each candidate: how well the direction to the
    candidate agrees with the vehicle heading, minus how far its distance is
    from what the current speed would cover in ``horizon`` seconds::

        >>> from cruzamento.scenario import VehicleState
        >>> Candidate = collections.namedtuple('Candidate', 'number position')
        >>> state = VehicleState(0, 0, 0, 10)
        >>> candidate_scores(state, [Candidate(1, (100, 0))]).tolist()
        [1.0]
    """
    reach = state.speed * horizon
    scores = []
    for candidate in candidates:
        dx = candidate.position[0] - state.x
        dy = candidate.position[1] - state.y
        bearing = math.atan2(dy, dx)
        distance = math.hypot(dx, dy)
        scores.append(
            ALIGNMENT_WEIGHT * math.cos(normalize_angle(
                bearing - state.heading)) -
            DISTANCE_WEIGHT * abs(distance - reach) / (reach + 1))
    return np.array(scores)


def rank_by_scores(candidates, scores, seed):
    """
    Orders candidate numbers by decreasing score. Ties are broken by random
    draws made in an order that depends only on candidate geometry, so
    renumbering the candidates renumbers the answer and nothing else.
    """
    geometric = sorted(
        range(len(candidates)),
        key=lambda i: (
            round(float(candidates[i].position[0]), 9),
            round(float(candidates[i].position[1]), 9),
            candidates[i].number))
    draws = np.random.default_rng(seed).random(len(candidates))
    tiebreak = np.empty(len(candidates))
    tiebreak[geometric] = draws
    order = sorted(
        range(len(candidates)),
        key=lambda i: (-round(float(scores[i]), 12), tiebreak[i]))
    return [candidates[i].number for i in order]


def mock_goal_selector(state, candidates, seed, horizon=T_S * DT):
    """
    Ranks candidates the way a sensible driver might, without any model. A
    straight-ahead goal at the distance the current speed covers in ten seconds
    beats a goal behind the vehicle::

        >>> from cruzamento.scenario import VehicleState
        >>> Candidate = collections.namedtuple('Candidate', 'number position')
        >>> state = VehicleState(0, 0, 0, 10)
        >>> mock_goal_selector(
        ...     state, [Candidate(1, (-20, 5)), Candidate(2, (100, 0))], 0
        ... ).ranked_goal_ids
        [2, 1]
    """
    scores = candidate_scores(state, candidates, horizon)
    return GoalSelectionResponse(
        rank_by_scores(candidates, scores, seed),
        'heading alignment and reachable distance')


def describe_candidates(state, candidates):
    lines = []
    for candidate in candidates:
        dx = candidate.position[0] - state.x
        dy = candidate.position[1] - state.y
        cos, sin = math.cos(state.heading), math.sin(state.heading)
        forward, left = dx * cos + dy * sin, -dx * sin + dy * cos
        lines.append(
            '{0}: {1:.0f} m ahead, {2:.0f} m to the {3}, on lanes {4}'.format(
                candidate.number, forward, abs(left),
                'left' if left >= 0 else 'right',
                ' > '.join(getattr(candidate, 'route', ()))))
    return '\n'.join(lines)


def goal_selection_query(
        vehicle, candidates, image, request_seed=0, scene='',
        knowledge_text='', context=None, temperature=0.0, max_tokens=512,
        extra_images=()):
    """
    Builds the ``VisionQuery`` asking a model to rank ``candidates`` for
    ``vehicle``. ``context`` is merged into the data offline backends read.
    ``extra_images`` are sent after the scene image, with the knowledge text.
    """
    state = vehicle.initial_state
    user_prompt = load_prompt('goal_selection_user').format(
        scene=scene or 'generated traffic scenario', kind=vehicle.kind,
        length=vehicle.length, speed=state.speed,
        candidates=describe_candidates(state, candidates),
        knowledge=knowledge_text)
    query_context = {
        'task': 'goal_selection', 'state': state,
        'candidates': list(candidates),
    }
    query_context.update(context or {})
    return VisionQuery(
        load_prompt('goal_selection_system'), user_prompt, image,
        temperature=temperature, max_tokens=max_tokens,
        request_seed=request_seed, context=query_context,
        extra_images=extra_images)
