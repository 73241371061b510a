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
import numpy as np

from cruzamento.errors import (
    GeometryViolation, MalformedXml, NetworkRejected, ParameterError)
from cruzamento.mapsynth import (
    KINDS, PARAM_RANGES, clamp_params, generate_template_map)
from cruzamento.roadnet import xmlio
from cruzamento.roadnet.xmlio import (
    DEFAULT_SPEED, DEFAULT_WIDTH, emit_network, parse_network, read_network,
    write_network)

from cruzamento_tests.reference import crossroad

SUMO_TEXT = '''<net version="1.16">
    <location netOffset="0.00,0.00"/>
    <edge id=":J0_0" function="internal">
        <lane id=":J0_0_0" index="0" speed="13.89" shape="90,0 100,0"/>
    </edge>
    <edge id="in" from="A" to="J0">
        <lane id="in_0" index="0" speed="13.89" width="3.2"
              shape="0,0 90,0"/>
        <lane id="in_1" index="1" speed="13.89" width="3.2"
              shape="0,3.2 90,3.2"/>
    </edge>
    <edge id="out" from="J0" to="B">
        <lane id="out_0" index="0" speed="13.89" shape="90,0 200,0"/>
    </edge>
    <junction id="J0" type="priority" incLanes="in_0 in_1"
              intLanes=":J0_0_0" shape="88,-2 92,-2 92,5 88,5"/>
    <junction id=":J0_0_0" type="internal"/>
    <connection from="in" to="out" fromLane="0" toLane="0" via=":J0_0_0"/>
    <connection from=":J0_0" to="out" fromLane="0" toLane="0"/>
</net>'''


class TestParseNetwork(unittest.TestCase):

    def test_sumo_network(self):
        """
        SUMO plain networks should be read, internal edges skipped and edge
        connections resolved to lane ids.
        """
        network = parse_network(SUMO_TEXT)

        self.assertEqual(['in_0', 'in_1', 'out_0'], sorted(network.lanes))
        self.assertEqual(['out_0'], network.successors('in_0'))
        self.assertEqual(['J0'], sorted(network.junctions))
        self.assertIsNone(network.connections[0].via)

    def test_sumo_network_warnings(self):
        """
        Unsupported elements should be counted in the warnings.
        """
        warnings = parse_network(SUMO_TEXT).warnings

        self.assertIn(
            "ignored 1 unsupported element(s) 'location'", warnings)
        self.assertIn(
            "ignored 1 unsupported element(s) 'internal edge'", warnings)

    def test_defaults(self):
        """
        Lanes without width or speed should get the SUMO defaults.
        """
        network = parse_network(
            '<net><lane id="a" shape="0,0 10,0"/></net>')

        self.assertEqual(DEFAULT_WIDTH, network.lane('a').width)
        self.assertEqual(DEFAULT_SPEED, network.lane('a').speed_limit)

    def test_malformed_position(self):
        """
        Badly formed XML should be reported with its line and column.
        """
        with self.assertRaises(MalformedXml) as context:
            parse_network('<net>\n  <lane id="a" shape="0,0 1,0">\n</net>')

        self.assertEqual(3, context.exception.line)
        self.assertEqual(2, context.exception.exit_code)

    def test_invalid_shape(self):
        """
        Shapes that are not numbers should be refused.
        """
        with self.assertRaises(GeometryViolation):
            parse_network('<net><lane id="a" shape="0,0 x,y"/></net>')

    def test_wrong_root(self):
        """
        The root element must be ``net``.
        """
        with self.assertRaises(GeometryViolation):
            parse_network('<map/>')


class TestEmitNetwork(unittest.TestCase):

    def test_emit_is_deterministic(self):
        """
        The same network should always give the same text, and the text
        should parse back into the same network.
        """
        text = emit_network(crossroad())

        self.assertEqual(text, emit_network(parse_network(text)))
        self.assertEqual(crossroad(), parse_network(text))

    def test_templates(self):
        """
        Every template map comes back from its text unchanged.
        """
        for kind in KINDS:
            network = generate_template_map(kind)

            self.assertEqual(
                network, parse_network(emit_network(network)), kind)

    def test_random_templates(self):
        """
        A hundred template maps with random parameters come back from their
        text unchanged.
        """
        rng = np.random.default_rng(8)
        checked = 0
        while checked < 100:
            kind = KINDS[int(rng.integers(len(KINDS)))]
            params = clamp_params(kind, {
                name: rng.uniform(low, high + 1)
                for name, (low, high) in PARAM_RANGES.items()})
            try:
                network = generate_template_map(kind, params)
            except (NetworkRejected, ParameterError):
                continue

            self.assertEqual(
                network, parse_network(emit_network(network)),
                (kind, params))
            checked += 1

    def test_files(self):
        """
        ``write_network()`` and ``read_network()`` should go through a file.
        """
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'map.xml')
            write_network(crossroad(), path)

            self.assertEqual(crossroad(), read_network(path))


load_tests = inelegant.finder.TestFinder(
    __name__,
    xmlio
).load_tests

if __name__ == "__main__":
    unittest.main()
