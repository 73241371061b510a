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
import unittest

import inelegant.finder

from cruzamento.cornercase.knowledge import KnowledgeFragment
from cruzamento.gateway.backends import ScriptedTextBackend
from cruzamento.gateway.gateway import Gateway
from cruzamento.rollout import selectors
from cruzamento.rollout.bev import render_bev
from cruzamento.rollout.candidates import sample_goal_candidates
from cruzamento.rollout.selectors import (
    PARSE_FAILURE, GatewayGoalSelector, GoalSelectionRequest,
    RandomGoalSelector)

from cruzamento_tests.gateway.query import png
from cruzamento_tests.reference import (
    constant_speed, straight_road, vehicle)


class RecordingBackend(object):

    def __init__(self, answer='RANKING: 1'):
        self.answer = answer
        self.queries = []

    def complete(self, query):
        self.queries.append(query)
        return self.answer


def request(vehicle_id=2, knowledge=None, accepted=()):
    network = straight_road()
    vehicles = [
        vehicle(1, 20, 0, is_target=True),
        vehicle(2, 100, 0, speed=8)]
    ego = next(v for v in vehicles if v.id == vehicle_id)
    candidates = sample_goal_candidates(network, ego.initial_state)
    image = render_bev(network, vehicles, vehicle_id, candidates)
    return GoalSelectionRequest(
        network, ego, vehicles, candidates, image, 11, knowledge, accepted)


class TestGatewayGoalSelector(unittest.TestCase):

    def test_ranking(self):
        """
        The model ranking is returned as it was parsed.
        """
        gateway = Gateway(vision_backend=ScriptedTextBackend(
            ['RANKING: 3, 1\nRATIONALE: keep going']))

        response = GatewayGoalSelector(gateway).select(request())

        self.assertEqual([3, 1], response.ranked_goal_ids)
        self.assertEqual('keep going', response.rationale)
        self.assertEqual((), response.warnings)

    def test_query(self):
        """
        The query has the image, the seed and the candidates of the request.
        """
        backend = RecordingBackend()
        r = request()

        GatewayGoalSelector(Gateway(vision_backend=backend)).select(r)

        query = backend.queries[0]
        self.assertEqual(r.image.png, query.image)
        self.assertEqual(11, query.request_seed)
        self.assertEqual(list(r.candidates), query.context['candidates'])
        self.assertNotIn('adversarial', query.context)

    def test_unparseable(self):
        """
        An answer without a ranking gives the heuristic ranking, with a
        warning.
        """
        gateway = Gateway(vision_backend=ScriptedTextBackend(
            ['I cannot see the image.']))

        response = GatewayGoalSelector(gateway).select(request())

        self.assertEqual([1, 2, 3], sorted(response.ranked_goal_ids))
        self.assertEqual((PARSE_FAILURE,), response.warnings)

    def test_knowledge(self):
        """
        Knowledge goes to the prompt and its images after the scene image.
        Social vehicles also get the adversarial context, with the target
        and its trajectory.
        """
        backend = RecordingBackend()
        knowledge = KnowledgeFragment(
            'Collisions happen at merges.', [png(7)], {'total': 3})
        target = vehicle(1, 20, 0, is_target=True)
        trajectory = constant_speed(target.initial_state)

        GatewayGoalSelector(Gateway(vision_backend=backend)).select(
            request(knowledge=knowledge, accepted=[(target, trajectory)]))

        query = backend.queries[0]
        adversarial = query.context['adversarial']
        self.assertIn('Collisions happen at merges.', query.user_prompt)
        self.assertEqual((png(7),), query.extra_images)
        self.assertEqual(3, adversarial['total'])
        self.assertEqual(target, adversarial['target'])
        self.assertEqual(trajectory, adversarial['target_trajectory'])

    def test_target_not_adversarial(self):
        """
        The target itself is never ranked adversarially.
        """
        backend = RecordingBackend()
        knowledge = KnowledgeFragment('Some text.', (), {'total': 3})

        GatewayGoalSelector(Gateway(vision_backend=backend)).select(
            request(1, knowledge))

        self.assertNotIn('adversarial', backend.queries[0].context)
        self.assertIn('Some text.', backend.queries[0].user_prompt)


class TestRandomGoalSelector(unittest.TestCase):

    def test_request_seed(self):
        """
        Different request seeds give different orders.
        """
        r = request()
        orders = {
            tuple(RandomGoalSelector(0).select(
                r._replace(request_seed=seed)).ranked_goal_ids)
            for seed in range(30)}

        self.assertGreater(len(orders), 1)


load_tests = inelegant.finder.TestFinder(
    __name__,
    selectors
).load_tests

if __name__ == "__main__":
    unittest.main()
