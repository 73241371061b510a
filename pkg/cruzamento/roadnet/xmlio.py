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
Reading and writing road networks as XML.

The supported grammar is a small subset of SUMO plain networks. The root is a
``net`` element and it may contain:

``<lane id="a" shape="0,0 50,0" width="3.5" speed="13.9"/>``
    A lane. ``shape`` is a space-separated list of ``x,y`` pairs. ``width``
    defaults to 3.2 m and ``speed`` to 13.89 m/s, as in SUMO.
``<edge id="e">`` with ``lane`` children
    Lanes grouped in an edge, as SUMO writes them. Edges with
    ``function="internal"`` describe paths inside junctions and are skipped.
``<junction id="J0" incLanes="a b" outLanes="c" shape="x,y ..."/>``
    A junction.
``<connection from="a" to="b" via="J0"/>``
    A legal move from lane ``a`` to lane ``b``. The SUMO form, with edge ids in
    ``from``/``to`` plus ``fromLane``/``toLane`` indexes, is also accepted and
    resolved to the ``<edge>_<index>`` lane ids.

A network goes in and out like this::

    >>> text = '''<net>
    ...     <lane id="a" shape="0,0 50,0" width="3.5" speed="13.9"/>
    ...     <lane id="b" shape="50,0 100,0" width="3.5" speed="13.9"/>
    ...     <connection from="a" to="b"/>
    ... </net>'''
    >>> network = parse_network(text)
    >>> sorted(network.lanes)
    ['a', 'b']
    >>> parse_network(emit_network(network)) == network
    True

Elements outside the grammar are dropped and a warning is kept::

    >>> parse_network('<net><tlLogic id="x"/></net>').warnings
    ("ignored 1 unsupported element(s) 'tlLogic'",)
"""
import collections
import logging
import xml.etree.ElementTree as ET

from cruzamento.errors import GeometryViolation, MalformedXml
from cruzamento.roadnet.network import Connection, Junction, Lane, RoadNetwork

logger = logging.getLogger(__name__)

DEFAULT_WIDTH = 3.2
DEFAULT_SPEED = 13.89
FORMAT_VERSION = '1'


def parse_network(xml_text):
    """
    Parses XML text into a ``RoadNetwork``. Badly formed XML is reported with
    its position::

        >>> try:
        ...     parse_network('<net>\\n<lane id="a"></net>')
        ... except MalformedXml as e:
        ...     e.line
        2

    References to unknown elements are errors too::

        >>> parse_network('<net><connection from="a" to="b"/></net>')
        Traceback (most recent call last):
          ...
        cruzamento.errors.DanglingReference: a->b: references unknown lane 'a'
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as e:
        line, column = e.position
        raise MalformedXml(str(e), line, column)

    lanes, junctions, connections = [], [], []
    ignored = collections.Counter()
    edge_lanes = {}

    if root.tag != 'net':
        raise GeometryViolation(root.tag, 'the root element must be net')

    for element in root:
        if element.tag == 'lane':
            lanes.append(_parse_lane(element))
        elif element.tag == 'edge':
            if element.get('function') == 'internal':
                ignored['internal edge'] += 1
                continue
            for i, child in enumerate(element.iter('lane')):
                lane = _parse_lane(child)
                lanes.append(lane)
                index = child.get('index', str(i))
                edge_lanes[(element.get('id'), index)] = lane.id
        elif element.tag == 'junction':
            if element.get('type') == 'internal':
                ignored['internal junction'] += 1
                continue
            junctions.append(_parse_junction(element))
        elif element.tag == 'connection':
            connection = _parse_connection(element, edge_lanes)
            if connection is None:
                ignored['internal connection'] += 1
            else:
                connections.append(connection)
        else:
            ignored[element.tag] += 1

    warnings = [
        'ignored {0} unsupported element(s) {1!r}'.format(count, tag)
        for tag, count in sorted(ignored.items())
    ]
    for warning in warnings:
        logger.warning(warning)

    network = RoadNetwork(lanes, junctions, connections, warnings)
    network.check_references()
    return network


def _require_id(element, position):
    element_id = element.get('id')
    if not element_id:
        raise GeometryViolation(
            '{0}#{1}'.format(element.tag, position), 'missing id')
    return element_id


def _parse_points(element_id, text):
    try:
        return [
            tuple(float(c) for c in pair.split(',')[:2])
            for pair in text.split()
        ]
    except ValueError:
        raise GeometryViolation(
            element_id, 'invalid shape {0!r}'.format(text))


def _parse_float(element_id, element, name, default):
    value = element.get(name)
    if value is None:
        return default
    try:
        return float(value)
    except ValueError:
        raise GeometryViolation(
            element_id, 'invalid {0} {1!r}'.format(name, value))


def _parse_lane(element):
    lane_id = _require_id(element, element.get('index', '?'))
    shape = _parse_points(lane_id, element.get('shape', ''))
    return Lane(
        lane_id, shape,
        _parse_float(lane_id, element, 'width', DEFAULT_WIDTH),
        _parse_float(lane_id, element, 'speed', DEFAULT_SPEED))


def _parse_junction(element):
    junction_id = _require_id(element, '?')
    return Junction(
        junction_id,
        element.get('incLanes', '').split(),
        element.get('outLanes', '').split(),
        _parse_points(junction_id, element.get('shape', '')))


def _parse_connection(element, edge_lanes):
    from_id, to_id = element.get('from'), element.get('to')
    if from_id is None or to_id is None:
        raise GeometryViolation(
            'connection {0}->{1}'.format(from_id, to_id),
            'connection needs from and to')
    if from_id.startswith(':'):
        return None
    if element.get('fromLane') is not None:
        from_id = edge_lanes.get(
            (from_id, element.get('fromLane')),
            '{0}_{1}'.format(from_id, element.get('fromLane')))
    if element.get('toLane') is not None:
        to_id = edge_lanes.get(
            (to_id, element.get('toLane')),
            '{0}_{1}'.format(to_id, element.get('toLane')))
    via = element.get('via')
    if via is not None and via.startswith(':'):
        via = None
    return Connection(from_id, to_id, via)


def _format_points(points):
    return ' '.join('{0!r},{1!r}'.format(x, y) for x, y in points)


def emit_network(network):
    """
    Writes a network as XML text. Elements are sorted by id and numbers keep
    their shortest exact representation, so the same network always gives the
    same text::

        >>> network = RoadNetwork([Lane('a', [(0, 0), (0.1, 5)], 3.5, 13.9)])
        >>> print(emit_network(network), end='')
        <net version="1">
          <lane id="a" shape="0.0,0.0 0.1,5.0" width="3.5" speed="13.9" />
        </net>
    """
    root = ET.Element('net', version=FORMAT_VERSION)
    for lane in network.lanes.values():
        ET.SubElement(
            root, 'lane', id=lane.id, shape=_format_points(lane.shape),
            width=repr(lane.width), speed=repr(lane.speed_limit))
    for junction in network.junctions.values():
        attributes = {
            'id': junction.id,
            'incLanes': ' '.join(junction.incoming),
            'outLanes': ' '.join(junction.outgoing),
        }
        if junction.shape:
            attributes['shape'] = _format_points(junction.shape)
        ET.SubElement(root, 'junction', attributes)
    for connection in network.connections:
        attributes = {'from': connection.from_lane, 'to': connection.to_lane}
        if connection.via is not None:
            attributes['via'] = connection.via
        ET.SubElement(root, 'connection', attributes)

    ET.indent(root)
    return ET.tostring(root, encoding='unicode') + '\n'


def read_network(path):
    with open(path) as f:
        return parse_network(f.read())


def write_network(network, path):
    with open(path, 'w') as f:
        f.write(emit_network(network))
