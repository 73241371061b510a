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

from cruzamento.errors import GoalParseError
from cruzamento.gateway import goals
from cruzamento.gateway.goals import (
    candidate_scores, goal_selection_query, mock_goal_selector,
    parse_goal_selection, rank_by_scores)
from cruzamento.gateway.query import VisionQuery
from cruzamento.rollout.candidates import GoalCandidate
from cruzamento.scenario import VehicleState

from cruzamento_tests.gateway.query import png
from cruzamento_tests.reference import vehicle


class TestParseGoalSelection(unittest.TestCase):

    def test_markdown(self):
        """
        Models like bold text and arrows; the ranking is read anyway.
        """
        response = parse_goal_selection(
            'Here you go.\n**RANKING**: 3 > 1\nRATIONALE: go straight',
            [1, 2, 3])

        self.assertEqual([3, 1], response.ranked_goal_ids)
        self.assertEqual('go straight', response.rationale)

    def test_case_insensitive(self):
        """
        The keyword may be written in any case.
        """
        response = parse_goal_selection('ranking: 2, 1', [1, 2])

        self.assertEqual([2, 1], response.ranked_goal_ids)
        self.assertEqual('', response.rationale)

    def test_repeated_and_bad_tokens(self):
        """
        Repeated ids and tokens that are not numbers are dropped with a
        warning each.
        """
        response = parse_goal_selection('RANKING: 1, three, 1, 2', [1, 2])

        self.assertEqual([1, 2], response.ranked_goal_ids)
        self.assertEqual(
            ("dropped token 'three'", 'dropped repeated id 1'),
            response.warnings)

    def test_nothing_usable(self):
        """
        A ranking with no offered id is an error.
        """
        with self.assertRaises(GoalParseError):
            parse_goal_selection('RANKING: 7, 8', [1, 2])

    def test_nothing_offered(self):
        """
        Nothing can be ranked if nothing was offered.
        """
        with self.assertRaises(GoalParseError):
            parse_goal_selection('RANKING: 1', [])

    def test_to_text_parses_back(self):
        """
        The text of a response is understood by the parser.
        """
        response = mock_goal_selector(
            VehicleState(0, 0, 0, 10),
            [GoalCandidate(1, (100, 0), 0, ('a',), 100),
             GoalCandidate(2, (50, 0), 0, ('a',), 50)], 0)

        self.assertEqual(
            response.ranked_goal_ids,
            parse_goal_selection(response.to_text(), [1, 2]).ranked_goal_ids)


class TestHeuristic(unittest.TestCase):

    def test_reachable_beats_far(self):
        """
        At 5 m/s a goal 50 m ahead is better than one 250 m ahead.
        """
        scores = candidate_scores(
            VehicleState(0, 0, 0, 5),
            [GoalCandidate(1, (250, 0), 0, (), 250),
             GoalCandidate(2, (50, 0), 0, (), 50)])

        self.assertGreater(scores[1], scores[0])

    def test_renumbering(self):
        """
        Renumbering candidates renumbers the ranking and nothing else, even
        with ties.
        """
        left, right = (100.0, 10.0), (100.0, -10.0)
        first = [GoalCandidate(1, left, 0, (), 100),
                 GoalCandidate(2, right, 0, (), 100)]
        second = [GoalCandidate(2, left, 0, (), 100),
                  GoalCandidate(1, right, 0, (), 100)]
        state = VehicleState(0, 0, 0, 10)

        for seed in range(10):
            a = rank_by_scores(first, candidate_scores(state, first), seed)
            b = rank_by_scores(second, candidate_scores(state, second), seed)
            position_a = [first[n - 1].position for n in a]
            position_b = [second[2 - n].position for n in b]
            self.assertEqual(position_a, position_b)

    def test_seed_decides_ties(self):
        """
        Tied candidates are ordered by the seed, reproducibly.
        """
        candidates = [GoalCandidate(1, (100, 10), 0, (), 100),
                      GoalCandidate(2, (100, -10), 0, (), 100)]
        state = VehicleState(0, 0, 0, 10)
        rankings = {
            tuple(mock_goal_selector(state, candidates, s).ranked_goal_ids)
            for s in range(20)}

        self.assertEqual({(1, 2), (2, 1)}, rankings)
        self.assertEqual(
            mock_goal_selector(state, candidates, 3),
            mock_goal_selector(state, candidates, 3))


class TestGoalSelectionQuery(unittest.TestCase):

    def test_query(self):
        """
        The query describes the vehicle and its candidates, and carries them
        as context for offline backends.
        """
        car = vehicle(1, 0, 0, speed=10, is_target=True)
        candidates = [GoalCandidate(1, (100, 0), 0, ('east',), 100)]

        query = goal_selection_query(
            car, candidates, png(), request_seed=4,
            context={'adversarial': None})

        self.assertIsInstance(query, VisionQuery)
        self.assertIn('1: 100 m ahead', query.user_prompt)
        self.assertIn('on lanes east', query.user_prompt)
        self.assertIn('10.0 m/s', query.user_prompt)
        self.assertEqual('goal_selection', query.context['task'])
        self.assertEqual(candidates, query.context['candidates'])
        self.assertIn('adversarial', query.context)
        self.assertEqual(4, query.request_seed)


load_tests = inelegant.finder.TestFinder(
    __name__,
    goals
).load_tests

if __name__ == "__main__":
    unittest.main()
