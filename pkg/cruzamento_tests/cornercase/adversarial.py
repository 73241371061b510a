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
import math
import unittest

import inelegant.finder
import numpy as np

from cruzamento.cornercase import adversarial
from cruzamento.cornercase.adversarial import (
    adversarial_ranking, corner_case_report, corner_case_rollout,
    generate_corner_case, predicted_behavior, ratio, straight_projection,
    target_projection)
from cruzamento.cornercase.knowledge import KnowledgeFragment
from cruzamento.planner.kinematic import KinematicPlanner
from cruzamento.rollout.candidates import GoalCandidate
from cruzamento.rollout.rollout import ScenarioRollout
from cruzamento.rollout.selectors import RandomGoalSelector
from cruzamento.scenario import T_S, VehicleState

from cruzamento_tests.cornercase.failures import head_on, side_by_side
from cruzamento_tests.reference import (
    constant_speed, straight_road, vehicle)

KNOWLEDGE = KnowledgeFragment(
    'Collisions with oncoming vehicles', (),
    {'behavior': 'oncoming', 'total': 3, 'share': 1.0,
     'speed_bin': [18.0, 20.0]})


def candidate(number, x, y, route=()):
    return GoalCandidate(number, (x, y), 0.0, route, 0.0)


def two_way():
    return (
        vehicle(1, 20, 0, is_target=True),
        vehicle(2, 250, 3.5, math.pi, speed=8))


class TestProjections(unittest.TestCase):

    def test_target_projection(self):
        """
        The target drives its lane on a free road.
        """
        positions, headings, route = target_projection(
            straight_road(), vehicle(1, 20, 0, is_target=True))

        self.assertEqual(('east',), route)
        self.assertEqual((T_S + 1, 2), positions.shape)
        self.assertTrue(np.allclose(positions[:, 1], 0))
        self.assertTrue(np.allclose(headings, 0))
        self.assertGreater(positions[-1][0], 120)

    def test_target_projection_from_trajectory(self):
        """
        A known trajectory picks the route.
        """
        target = vehicle(1, 20, 0, is_target=True)

        _, _, route = target_projection(
            straight_road(), target, constant_speed(target.initial_state))

        self.assertEqual(('east',), route)

    def test_target_projection_off_road(self):
        """
        Off the lanes the target drives straight ahead.
        """
        target = vehicle(1, 0, 50, math.pi / 2, is_target=True)

        positions, _, route = target_projection(straight_road(), target)

        self.assertIsNone(route)
        self.assertTrue(np.allclose(positions[:, 0], 0))
        self.assertTrue(np.all(np.diff(positions[:, 1]) > 0))

    def test_straight_projection(self):
        """
        The drive to a candidate arrives there at the last step.
        """
        positions = straight_projection(VehicleState(0, 0, 0, 5), (30, 40))

        np.testing.assert_allclose((30, 40), positions[-1])
        np.testing.assert_allclose((0.3, 0.4), positions[1])


class TestPredictedBehavior(unittest.TestCase):

    def setUp(self):
        self.state = VehicleState(0, 0, 0, 10)

    def test_classes(self):
        """
        The class follows from the travel direction relative to the target.
        """
        def predict(x, y):
            return predicted_behavior(self.state, candidate(1, x, y), 0.0)

        self.assertEqual('following', predict(50, 0.5))
        self.assertEqual('lane_change', predict(50, 3.5))
        self.assertEqual('crossing', predict(0, 50))
        self.assertEqual('oncoming', predict(-50, 0))

    def test_standing(self):
        """
        A vehicle that stays put keeps its heading.
        """
        state = VehicleState(0, 0, math.pi / 2, 0)

        self.assertEqual(
            'crossing',
            predicted_behavior(state, candidate(1, 0, 0.01), 0.0))

    def test_merging(self):
        """
        Candidates joining the target route from another lane merge.
        """
        self.assertEqual(
            'merging',
            predicted_behavior(
                self.state, candidate(1, 50, 0, ('ramp', 'main')), 0.0,
                ('main',)))

    def test_already_on_route(self):
        """
        Candidates whose route starts on the target route follow it.
        """
        self.assertEqual(
            'following',
            predicted_behavior(
                self.state, candidate(1, 50, 0, ('main', 'after')), 0.0,
                ('before', 'main')))


class TestAdversarialRanking(unittest.TestCase):

    def test_conflict_first(self):
        """
        The candidate that brings the vehicle next to the target comes first.
        """
        state = VehicleState(200, 3.5, math.pi, 10)
        candidates = [candidate(1, 190, 3.5), candidate(2, 80, 3.5)]
        context = {
            'network': straight_road(),
            'target': vehicle(1, 20, 0, is_target=True),
            'behavior': 'oncoming'}

        response = adversarial_ranking(state, candidates, context)

        self.assertEqual([2, 1], response.ranked_goal_ids)
        self.assertIn('orange vehicle', response.rationale)

    def test_behavior_only(self):
        """
        Without a target the behavior class decides.
        """
        state = VehicleState(0, 0, 0, 10)
        candidates = [candidate(1, 50, 0), candidate(2, 0, 50)]

        crossing = adversarial_ranking(
            state, candidates, {'behavior': 'crossing'})
        following = adversarial_ranking(
            state, candidates, {'behavior': 'following'})

        self.assertEqual([2, 1], crossing.ranked_goal_ids)
        self.assertEqual([1, 2], following.ranked_goal_ids)
        self.assertEqual('behavior class only', crossing.rationale)

    def test_reproducible(self):
        """
        The same seed gives the same ranking.
        """
        state = VehicleState(0, 0, 0, 10)
        candidates = [candidate(n, 50, 10 * n) for n in range(1, 6)]

        first = adversarial_ranking(state, candidates, {}, seed=3)

        self.assertEqual(
            first, adversarial_ranking(state, candidates, {}, seed=3))
        self.assertEqual([1, 2, 3, 4, 5], sorted(first.ranked_goal_ids))


class TestCornerCaseRollout(unittest.TestCase):

    def test_plain_without_knowledge(self):
        """
        Without knowledge the rollout is a plain one.
        """
        rollout = corner_case_rollout(
            straight_road(), two_way(), KinematicPlanner(),
            RandomGoalSelector(), KnowledgeFragment())

        self.assertFalse(rollout.highlight_target)
        self.assertIsNone(rollout.knowledge)
        self.assertEqual(frozenset(), rollout.exempt_ids)

    def test_knowledge(self):
        """
        With knowledge the target is highlighted and may be touched.
        """
        rollout = corner_case_rollout(
            straight_road(), two_way(), KinematicPlanner(),
            RandomGoalSelector(), KNOWLEDGE)

        self.assertTrue(rollout.highlight_target)
        self.assertIs(KNOWLEDGE, rollout.knowledge)
        self.assertEqual(frozenset([1]), rollout.exempt_ids)

    def test_generate(self):
        """
        Corner cases carry their provenance and the knowledge used.
        """
        scenario = generate_corner_case(
            straight_road(), two_way(), KinematicPlanner(),
            RandomGoalSelector(), KNOWLEDGE, seed=4)

        self.assertEqual('corner_case', scenario.provenance)
        self.assertEqual(4, scenario.seed)
        self.assertEqual(
            'oncoming', scenario.metadata['knowledge']['behavior'])
        scenario.check()

    def test_empty_knowledge(self):
        """
        With empty knowledge only the provenance tells a corner case from a
        plain scenario.
        """
        plain = ScenarioRollout(
            straight_road(), KinematicPlanner(), RandomGoalSelector()).run(
                two_way(), 4)

        corner = generate_corner_case(
            straight_road(), two_way(), KinematicPlanner(),
            RandomGoalSelector(), KnowledgeFragment(), seed=4)

        self.assertEqual(plain.trajectories, corner.trajectories)
        self.assertEqual('corner_case', corner.provenance)
        self.assertNotIn('knowledge', corner.metadata)


class TestCornerCaseReport(unittest.TestCase):

    def test_ratio(self):
        """
        Ratios of zero rates are one, or infinite over a zero base.
        """
        self.assertEqual(2.0, ratio(0.5, 0.25))
        self.assertEqual(1.0, ratio(0.0, 0.0))
        self.assertEqual(math.inf, ratio(0.1, 0.0))

    def test_report(self):
        """
        Reports compare collision rates and tell whether the planner changed.
        """
        report = corner_case_report(
            [side_by_side(), side_by_side()], [head_on(), side_by_side()],
            'abc', 'abc')

        self.assertEqual(0.0, report.base.cr)
        self.assertEqual(0.5, report.corner_cases.cr)
        self.assertEqual(math.inf, report.cr_ratio)
        self.assertTrue(report.planner_unchanged)
        self.assertTrue(report.to_dict()['planner_unchanged'])
        self.assertIn('CR ratio: inf', report.table())

    def test_changed_planner(self):
        """
        Different checkpoint hashes show the planner changed.
        """
        report = corner_case_report(
            [head_on()], [head_on()], 'abc', 'abd')

        self.assertEqual(1.0, report.cr_ratio)
        self.assertFalse(report.planner_unchanged)


load_tests = inelegant.finder.TestFinder(
    __name__,
    adversarial
).load_tests

if __name__ == "__main__":
    unittest.main()
