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

from cruzamento import interfaces
from cruzamento.planner.kinematic import KinematicPlanner
from cruzamento.rollout.selectors import RandomGoalSelector


class TestHasPlanMethod(unittest.TestCase):

    def test_planners(self):
        """
        The bundled planners should be recognized as planners.
        """
        self.assertTrue(interfaces.has_plan_method(KinematicPlanner()))

    def test_attribute_is_not_method(self):
        """
        An attribute named ``plan`` that is not a method does not count.
        """
        class Holder(object):
            plan = None

        self.assertFalse(interfaces.has_plan_method(Holder()))


class TestHasSelectMethod(unittest.TestCase):

    def test_selectors(self):
        """
        The bundled selectors should be recognized as selectors.
        """
        self.assertTrue(interfaces.has_select_method(RandomGoalSelector()))

    def test_planner_is_not_selector(self):
        """
        A planner has no ``select()`` method.
        """
        self.assertFalse(interfaces.has_select_method(KinematicPlanner()))


class TestHasCompleteMethod(unittest.TestCase):

    def test_false_no_method(self):
        """
        Objects without ``complete()`` are not backends.
        """
        self.assertFalse(interfaces.has_complete_method(object()))


class TestTranscriptAwareBackend(unittest.TestCase):

    def test_transcript_is_per_instance(self):
        """
        Every backend should keep its own transcript.
        """
        class Backend(interfaces.TranscriptAwareBackend):
            pass

        a, b = Backend(), Backend()
        a.set_transcript(['a'])
        b.set_transcript(['b'])

        self.assertEqual(['a'], a.get_transcript())
        self.assertEqual(['b'], b.get_transcript())


load_tests = inelegant.finder.TestFinder(
    __name__,
    interfaces
).load_tests

if __name__ == "__main__":
    unittest.main()
