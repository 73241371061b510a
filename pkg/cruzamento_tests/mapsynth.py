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
import os
import tempfile
import unittest

import inelegant.finder

from cruzamento import mapsynth
from cruzamento.errors import (
    NetworkRejected, ParameterError, RepairExhausted, UsageError)
from cruzamento.gateway.backends import (
    ScriptedTextBackend, TemplateTextBackend)
from cruzamento.gateway.gateway import Gateway
from cruzamento.mapsynth import (
    KINDS, extract_xml, generate_lm_map, generate_template_map, import_map,
    map_prompt)
from cruzamento.roadnet.network import Lane, RoadNetwork
from cruzamento.roadnet.xmlio import emit_network, write_network

GAPPED = '''```xml
<net>
  <lane id="a" shape="0,0 50,0" width="3.5" speed="13.9"/>
  <lane id="b" shape="60,0 100,0" width="3.5" speed="13.9"/>
  <connection from="a" to="b"/>
</net>
```'''

FIXED = '''```xml
<net>
  <lane id="a" shape="0,0 50,0" width="3.5" speed="13.9"/>
  <lane id="b" shape="50,0 100,0" width="3.5" speed="13.9"/>
  <connection from="a" to="b"/>
</net>
```'''


class TestTemplateMaps(unittest.TestCase):

    def test_every_template_is_valid(self):
        """
        Every template, with its defaults, should give a valid network.
        """
        for kind in KINDS:
            self.assertTrue(
                generate_template_map(kind).validate().is_empty, kind)

    def test_templates_are_deterministic(self):
        """
        The same parameters should always give the same XML.
        """
        for kind in KINDS:
            self.assertEqual(
                emit_network(generate_template_map(kind)),
                emit_network(generate_template_map(kind)))

    def test_extreme_parameters_are_valid(self):
        """
        Templates should stay valid at the ends of their parameter ranges.
        """
        for params in ({'lanes': 4, 'lane_width': 2.5, 'length': 50.0},
                       {'lanes': 1, 'lane_width': 4.0, 'length': 500.0}):
            for kind in ('intersection', 't_junction', 'highway'):
                network = generate_template_map(kind, params)
                self.assertTrue(network.validate().is_empty, kind)
        for params in ({'radius': 10.0, 'legs': 6}, {'radius': 50.0,
                                                      'legs': 3}):
            network = generate_template_map('roundabout', params)
            self.assertTrue(network.validate().is_empty)

    def test_lane_count(self):
        """
        A highway should have as many lanes as asked for.
        """
        network = generate_template_map('highway', {'lanes': 3})

        self.assertEqual(3, len(network.lanes))

    def test_unknown_kind(self):
        """
        Unknown templates are usage errors.
        """
        with self.assertRaises(UsageError):
            generate_template_map('bridge')

    def test_unknown_parameter(self):
        """
        Parameters a template does not take are refused.
        """
        with self.assertRaises(ParameterError):
            generate_template_map('highway', {'radius': 20})

    def test_fractional_lanes(self):
        """
        Lane counts must be integers.
        """
        with self.assertRaises(ParameterError):
            generate_template_map('highway', {'lanes': 2.5})

    def test_merge_point_range(self):
        """
        The merge point must leave room for the lane after it.
        """
        with self.assertRaises(ParameterError):
            generate_template_map(
                'on_ramp_merge', {'length': 200, 'merge_at': 190})


class TestLmMaps(unittest.TestCase):

    def test_first_answer_accepted(self):
        """
        A valid first answer should be accepted in one round.
        """
        backend = ScriptedTextBackend([FIXED])

        network = generate_lm_map('a straight road', Gateway(backend))

        self.assertEqual(['a', 'b'], sorted(network.lanes))
        self.assertEqual(1, backend.calls)

    def test_repair_round(self):
        """
        An invalid answer should be sent back with its problems, and the
        corrected answer accepted.
        """
        backend = ScriptedTextBackend([GAPPED, FIXED])
        gateway = Gateway(backend)

        network = generate_lm_map('a straight road', gateway)

        self.assertEqual(2, backend.calls)
        self.assertEqual(['b'], network.successors('a'))
        second_prompt = gateway.transcript.records[1]['user_prompt']
        self.assertIn('PREVIOUS ANSWER', second_prompt)
        self.assertIn('discontinuity a->b', second_prompt)

    def test_repair_exhausted(self):
        """
        After the allowed rounds the last report should be raised.
        """
        backend = ScriptedTextBackend([GAPPED, GAPPED])

        with self.assertRaises(RepairExhausted) as context:
            generate_lm_map('a road', Gateway(backend), max_repair_rounds=2)

        self.assertEqual(2, context.exception.rounds)
        self.assertEqual(
            1, len(context.exception.report.of_kind('discontinuity')))

    def test_unparseable_answer(self):
        """
        Answers that are not XML count as failed rounds too.
        """
        backend = ScriptedTextBackend(['I cannot draw maps.'])

        with self.assertRaises(RepairExhausted) as context:
            generate_lm_map('a road', Gateway(backend), max_repair_rounds=1)

        self.assertIsNone(context.exception.report)
        self.assertIsNotNone(context.exception.parse_error)

    def test_template_backend(self):
        """
        The offline text backend should build the template the description
        names.
        """
        network = generate_lm_map(
            'a roundabout with radius 30 m', Gateway(TemplateTextBackend()))

        self.assertEqual(
            generate_template_map('roundabout', {'radius': 30.0}), network)

    def test_template_backend_feedback(self):
        """
        Feedback should change the parameters of the offline answer.
        """
        network = generate_lm_map(
            'a highway', Gateway(TemplateTextBackend()),
            feedback='use 3 lanes')

        self.assertEqual(3, len(network.lanes))

    def test_rounds_must_be_positive(self):
        """
        At least one round is needed.
        """
        with self.assertRaises(ParameterError):
            generate_lm_map(
                'a road', Gateway(ScriptedTextBackend([])),
                max_repair_rounds=0)

    def test_prompt_has_example(self):
        """
        The prompt should carry an example network and the description.
        """
        system, user = map_prompt('a quiet street', 'wider lanes')

        self.assertTrue(system)
        self.assertIn('a quiet street', user)
        self.assertIn('FEEDBACK: wider lanes', user)
        self.assertIn('<net', user)

    def test_extract_bare_net(self):
        """
        A ``net`` element outside a code block should be found too.
        """
        self.assertEqual(
            '<net></net>', extract_xml('Here it is: <net></net> Bye.'))


class TestImportMap(unittest.TestCase):

    def test_valid(self):
        """
        Valid files should be imported.
        """
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'map.xml')
            write_network(generate_template_map('t_junction'), path)

            self.assertEqual(
                generate_template_map('t_junction'), import_map(path))

    def test_invalid(self):
        """
        Files with violations should be refused with their report.
        """
        network = RoadNetwork([
            Lane('a', [(0, 0), (50, 0)], 3.5, 13.9),
            Lane('b', [(0, 100), (50, 100)], 3.5, 13.9)])
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'map.xml')
            write_network(network, path)

            with self.assertRaises(NetworkRejected) as context:
                import_map(path)
        self.assertEqual(
            1, len(context.exception.report.of_kind('disconnected')))


load_tests = inelegant.finder.TestFinder(
    __name__,
    mapsynth
).load_tests

if __name__ == "__main__":
    unittest.main()
