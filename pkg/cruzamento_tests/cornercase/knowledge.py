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

from cruzamento.cornercase import knowledge
from cruzamento.cornercase.failures import (
    CollisionRecord, FailureFeatureStats)
from cruzamento.cornercase.knowledge import (
    KnowledgeFragment, build_knowledge_prompt, describe_cell)
from cruzamento.errors import ValidationError


class TestKnowledgeFragment(unittest.TestCase):

    def test_empty(self):
        """
        A fragment with nothing in it is false.
        """
        self.assertFalse(KnowledgeFragment())
        self.assertTrue(KnowledgeFragment(context={'total': 1}))
        self.assertTrue(KnowledgeFragment(images=[b'png']))

    def test_images_tuple(self):
        """
        Images are kept as a tuple.
        """
        self.assertEqual((b'a',), KnowledgeFragment(images=[b'a']).images)


class TestBuildKnowledgePrompt(unittest.TestCase):

    def setUp(self):
        self.records = [
            CollisionRecord('b', 30, 5.2, 1.6, 'crossing', 2, b'B'),
            CollisionRecord('a', 12, -1.0, 0.0, 'following', 3, b'A'),
            CollisionRecord('c', 41, 4.8, 1.7, 'crossing', 4, b'C'),
            CollisionRecord('d', 50, 4.1, 1.65, 'crossing', 5)]
        self.stats = FailureFeatureStats.from_records(self.records)

    def test_summary(self):
        """
        The text tells the most frequent cell and the share of every
        behavior.
        """
        fragment = build_knowledge_prompt(self.stats, self.records)

        self.assertIn(
            '- 3 of 4 collisions (75%) happened with a crossing vehicle',
            fragment.text)
        self.assertIn(
            '- 75% of the collisions involved a crossing vehicle',
            fragment.text)
        self.assertIn(
            '- 25% of the collisions involved a following vehicle',
            fragment.text)
        self.assertIn('orange vehicle', fragment.text)
        self.assertNotIn('{summary}', fragment.text)

    def test_images(self):
        """
        Snapshots of the most frequent cell come first.
        """
        self.assertEqual(
            (b'B', b'C'),
            build_knowledge_prompt(self.stats, self.records, 2).images)
        self.assertEqual(
            (b'B', b'C', b'A'),
            build_knowledge_prompt(self.stats, self.records, 5).images)
        self.assertEqual(
            (), build_knowledge_prompt(self.stats, self.records, 0).images)

    def test_context(self):
        """
        The structured summary holds the most frequent cell.
        """
        context = build_knowledge_prompt(self.stats).context

        self.assertEqual('crossing', context['behavior'])
        self.assertEqual([4.0, 6.0], context['speed_bin'])
        self.assertEqual(0.75, context['share'])
        self.assertEqual(4, context['total'])
        low, high = context['heading_bin']
        self.assertAlmostEqual((low + high) / 2, context['relative_heading'])
        self.assertAlmostEqual(math.pi / 8, high - low)

    def test_no_collisions(self):
        """
        Without collisions there is no knowledge.
        """
        with self.assertRaises(ValidationError):
            build_knowledge_prompt(FailureFeatureStats(), self.records)

    def test_describe_cell(self):
        """
        Behaviors are written in words.
        """
        stats = FailureFeatureStats.from_records([
            CollisionRecord('a', 3, 0.5, 0.0, 'lane_change')])

        text = describe_cell(stats, stats.argmax())

        self.assertIn('lane change vehicle', text)
        self.assertIn('[0.0, 2.0) m/s', text)


load_tests = inelegant.finder.TestFinder(
    __name__,
    knowledge
).load_tests

if __name__ == "__main__":
    unittest.main()
