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
Road networks can be made in three ways:

``generate_template_map()``
    builds one of the typical layouts (intersection, T junction, roundabout,
    highway, on-ramp merge) from a few parameters, offline;
``generate_lm_map()``
    asks a text model for a network matching a description, repairing its
    answer while the network does not validate;
``import_map()``
    reads an existing network file.

Every network returned passes ``RoadNetwork.validate()`` with no violation::

    >>> network = generate_template_map('highway', {'lanes': 2, 'length': 300})
    >>> len(network.lanes), len(network.junctions)
    (2, 0)
    >>> network.validate().is_empty
    True
"""
import logging
import math
import re

from cruzamento.errors import (
    NetworkRejected, ParameterError, RepairExhausted, UsageError,
    ValidationError)
from cruzamento.gateway.query import TextQuery
from cruzamento.prompts import load_prompt
from cruzamento.roadnet.network import Connection, Junction, Lane, RoadNetwork
from cruzamento.roadnet.xmlio import emit_network, parse_network, read_network

logger = logging.getLogger(__name__)

KINDS = ('intersection', 't_junction', 'roundabout', 'highway',
         'on_ramp_merge')

PARAM_RANGES = {
    'lanes': (1, 4),
    'lane_width': (2.5, 4.0),
    'radius': (10.0, 50.0),
    'length': (50.0, 500.0),
    'legs': (3, 6),
    'speed_limit': (5.0, 40.0),
    'merge_at': (50.0, 480.0),
}

TEMPLATE_DEFAULTS = {
    'intersection': {
        'lanes': 1, 'lane_width': 3.5, 'length': 100.0, 'speed_limit': 13.89},
    't_junction': {
        'lanes': 1, 'lane_width': 3.5, 'length': 100.0, 'speed_limit': 13.89},
    'roundabout': {
        'radius': 20.0, 'legs': 4, 'lane_width': 3.5, 'length': 80.0,
        'speed_limit': 8.33},
    'highway': {
        'lanes': 2, 'lane_width': 3.5, 'length': 300.0, 'speed_limit': 27.78},
    'on_ramp_merge': {
        'lanes': 2, 'lane_width': 3.5, 'length': 300.0, 'speed_limit': 27.78,
        'merge_at': None},
}

DIRECTIONS = (('e', 0), ('n', 90), ('w', 180), ('s', 270))


def _point(x, y):
    return (round(x, 6) + 0.0, round(y, 6) + 0.0)


def _check_params(kind, params):
    if kind not in TEMPLATE_DEFAULTS:
        raise UsageError(
            'unknown template {0!r}; choose one of {1}'.format(
                kind, ', '.join(KINDS)))
    values = dict(TEMPLATE_DEFAULTS[kind])
    for name, value in (params or {}).items():
        if name not in values:
            raise ParameterError(
                name, value,
                message='{0} does not take parameter {1!r}'.format(kind, name))
        values[name] = value

    if kind == 'on_ramp_merge':
        if values['merge_at'] is None:
            values['merge_at'] = values['length'] / 2
        low = PARAM_RANGES['merge_at'][0]
        high = values['length'] - 20.0
        if not low <= values['merge_at'] <= high:
            raise ParameterError(
                'merge_at', values['merge_at'], (low, high))

    for name, value in values.items():
        low, high = PARAM_RANGES[name]
        if name == 'merge_at':
            continue
        if not low <= value <= high:
            raise ParameterError(name, value, (low, high))
        if name in ('lanes', 'legs') and int(value) != value:
            raise ParameterError(
                name, value, message='{0} must be an integer'.format(name))
    return values


def clamp_params(kind, params):
    """
    Brings parameters into their ranges and drops the ones ``kind`` does not
    take::

        >>> clamp_params('roundabout', {'radius': 5, 'lanes': 2})
        {'radius': 10.0}
    """
    accepted = TEMPLATE_DEFAULTS.get(kind, {})
    result = {}
    for name, value in params.items():
        if name not in accepted:
            continue
        low, high = PARAM_RANGES[name]
        value = min(max(value, low), high)
        result[name] = (
            int(value) if name in ('lanes', 'legs') else float(value))
    if 'merge_at' in result:
        length = result.get('length', accepted['length'])
        result['merge_at'] = min(result['merge_at'], length - 20.0)
    return result


def generate_template_map(kind, params=None):
    """
    Builds a template network. Parameters out of their documented range are
    refused::

        >>> generate_template_map('roundabout', {'radius': 5})
        Traceback (most recent call last):
          ...
        cruzamento.errors.ParameterError: radius=5 is outside [10.0, 50.0]

    The same parameters always give the same network.
    """
    values = _check_params(kind, params)
    builder = {
        'intersection': _intersection,
        't_junction': _t_junction,
        'roundabout': _roundabout,
        'highway': _highway,
        'on_ramp_merge': _on_ramp_merge,
    }[kind]
    network = builder(**values)

    report = network.validate()
    if not report.is_empty:
        raise NetworkRejected(report, '{0} template is invalid'.format(kind))
    return network


def _unit(degrees):
    radians = math.radians(degrees)
    return math.cos(radians), math.sin(radians)


def _junction_map(approaches, lanes, lane_width, length, speed_limit):
    """
    Lanes of a junction where every approach meets the others at the origin.
    Incoming lanes end and outgoing lanes start at the origin, so every
    connection is continuous; routes are rounded when driven.
    """
    core = max(3 * lane_width, lanes * lane_width + lane_width)
    lane_list, incoming, outgoing, connections = [], [], [], []

    for name, angle in approaches:
        ux, uy = _unit(angle)
        for k in range(lanes):
            offset = (k + 0.5) * lane_width
            # incoming lanes drive towards the center, right of the axis
            rx, ry = -uy, ux
            lane_list.append(Lane(
                '{0}_in_{1}'.format(name, k),
                [_point(ux * length + rx * offset, uy * length + ry * offset),
                 _point(ux * core + rx * offset, uy * core + ry * offset),
                 _point(0, 0)],
                lane_width, speed_limit))
            incoming.append('{0}_in_{1}'.format(name, k))
            lane_list.append(Lane(
                '{0}_out_{1}'.format(name, k),
                [_point(0, 0),
                 _point(ux * core - rx * offset, uy * core - ry * offset),
                 _point(ux * length - rx * offset,
                        uy * length - ry * offset)],
                lane_width, speed_limit))
            outgoing.append('{0}_out_{1}'.format(name, k))

    def exit_towards(angle):
        for name, other in approaches:
            if other == angle % 360:
                return name
        return None

    for name, angle in approaches:
        straight = exit_towards(angle + 180)
        right = exit_towards(angle + 90)
        left = exit_towards(angle - 90)
        for k in range(lanes):
            source = '{0}_in_{1}'.format(name, k)
            if straight is not None:
                connections.append(Connection(
                    source, '{0}_out_{1}'.format(straight, k), 'J0'))
            if right is not None and k == lanes - 1:
                connections.append(Connection(
                    source, '{0}_out_{1}'.format(right, lanes - 1), 'J0'))
            if left is not None and k == 0:
                connections.append(Connection(
                    source, '{0}_out_{1}'.format(left, 0), 'J0'))

    shape = [_point(-core, -core), _point(core, -core),
             _point(core, core), _point(-core, core)]
    junction = Junction('J0', sorted(incoming), sorted(outgoing), shape)
    return RoadNetwork(lane_list, [junction], connections)


def _intersection(lanes, lane_width, length, speed_limit):
    """
    A four-way intersection. With one lane per approach there are eight lanes
    and twelve connections::

        >>> network = generate_template_map('intersection', {'lanes': 1})
        >>> len(network.lanes), len(network.connections)
        (8, 12)
    """
    return _junction_map(
        DIRECTIONS, int(lanes), lane_width, length, speed_limit)


def _t_junction(lanes, lane_width, length, speed_limit):
    """
    A T junction, with the stem to the south::

        >>> network = generate_template_map('t_junction')
        >>> len(network.lanes), len(network.connections)
        (6, 6)
    """
    approaches = tuple(d for d in DIRECTIONS if d[0] != 'n')
    return _junction_map(
        approaches, int(lanes), lane_width, length, speed_limit)


def _arc(radius, start, end):
    span = end - start
    count = max(2, int(math.ceil(abs(span) * radius / 2.0)) + 1)
    return [
        _point(radius * math.cos(start + span * i / (count - 1)),
               radius * math.sin(start + span * i / (count - 1)))
        for i in range(count)
    ]


def _roundabout(radius, legs, lane_width, length, speed_limit):
    """
    A single-lane roundabout driven counterclockwise. Every ring lane lies on
    the circle::

        >>> network = generate_template_map('roundabout', {'radius': 20})
        >>> ring = [l for l in network.lanes.values() if l.id.startswith('r')]
        >>> all(abs(math.hypot(x, y) - 20) < 0.01
        ...     for lane in ring for x, y in lane.shape)
        True
    """
    legs = int(legs)
    gap = math.asin(min(0.9, lane_width / radius))
    angles = [2 * math.pi * i / legs for i in range(legs)]
    lane_list, connections = [], []
    incoming, outgoing = [], []

    for i, angle in enumerate(angles):
        ux, uy = math.cos(angle), math.sin(angle)
        rx, ry = -uy, ux
        half = lane_width / 2
        approach = radius + 2 * lane_width
        entry = (angle + gap, 'r{0}_a'.format(i))

        in_id, out_id = 'leg{0}_in'.format(i), 'leg{0}_out'.format(i)
        lane_list.append(Lane(
            in_id,
            [_point((radius + length) * ux + rx * half,
                    (radius + length) * uy + ry * half),
             _point(approach * ux + rx * half, approach * uy + ry * half),
             _point(radius * math.cos(entry[0]),
                    radius * math.sin(entry[0]))],
            lane_width, speed_limit))
        lane_list.append(Lane(
            out_id,
            [_point(radius * math.cos(angle - gap),
                    radius * math.sin(angle - gap)),
             _point(approach * ux - rx * half, approach * uy - ry * half),
             _point((radius + length) * ux - rx * half,
                    (radius + length) * uy - ry * half)],
            lane_width, speed_limit))
        incoming.append(in_id)
        outgoing.append(out_id)

        following = angles[(i + 1) % legs] + (2 * math.pi if i == legs - 1
                                               else 0)
        lane_list.append(Lane(
            'r{0}_a'.format(i), _arc(radius, angle + gap, following - gap),
            lane_width, speed_limit))
        lane_list.append(Lane(
            'r{0}_b'.format(i), _arc(radius, angle - gap, angle + gap),
            lane_width, speed_limit))

        j = (i + 1) % legs
        connections.extend([
            Connection(in_id, 'r{0}_a'.format(i), 'R0'),
            Connection('r{0}_b'.format(i), 'r{0}_a'.format(i), 'R0'),
            Connection('r{0}_a'.format(i), 'r{0}_b'.format(j), 'R0'),
            Connection('r{0}_a'.format(i), 'leg{0}_out'.format(j), 'R0'),
        ])

    outline = _arc(radius + lane_width / 2, 0, 2 * math.pi)[:-1]
    junction = Junction('R0', sorted(incoming), sorted(outgoing), outline)
    return RoadNetwork(lane_list, [junction], connections)


def _highway(lanes, lane_width, length, speed_limit):
    return RoadNetwork([
        Lane('hw_{0}'.format(k),
             [_point(0, -k * lane_width), _point(length, -k * lane_width)],
             lane_width, speed_limit)
        for k in range(int(lanes))
    ])


def _on_ramp_merge(lanes, lane_width, length, speed_limit, merge_at):
    """
    A highway whose rightmost lane receives an on-ramp ``merge_at`` meters
    from the start::

        >>> network = generate_template_map(
        ...     'on_ramp_merge', {'lanes': 2, 'merge_at': 120})
        >>> network.lane('ramp').end
        (120.0, -3.5)
        >>> network.predecessors('hw_1_down')
        ['hw_1_up', 'ramp']
    """
    lanes = int(lanes)
    lane_list = [
        Lane('hw_{0}'.format(k),
             [_point(0, -k * lane_width), _point(length, -k * lane_width)],
             lane_width, speed_limit)
        for k in range(lanes - 1)
    ]
    right = lanes - 1
    y = -right * lane_width
    up, down = 'hw_{0}_up'.format(right), 'hw_{0}_down'.format(right)
    lane_list.append(Lane(
        up, [_point(0, y), _point(merge_at, y)], lane_width, speed_limit))
    lane_list.append(Lane(
        down, [_point(merge_at, y), _point(length, y)], lane_width,
        speed_limit))
    ramp_start = max(0.0, merge_at - 120.0)
    lane_list.append(Lane(
        'ramp',
        [_point(ramp_start, y - 30.0),
         _point(ramp_start + (merge_at - ramp_start) * 0.6,
                y - 2 * lane_width),
         _point(merge_at, y)],
        lane_width, speed_limit * 0.6))
    junction = Junction(
        'M0', sorted([up, 'ramp']), [down],
        [_point(merge_at - 10, y - 2 * lane_width),
         _point(merge_at, y - lane_width / 2),
         _point(merge_at, y + lane_width / 2),
         _point(merge_at - 10, y + lane_width / 2)])
    return RoadNetwork(
        lane_list, [junction],
        [Connection(up, down, 'M0'), Connection('ramp', down, 'M0')])


XML_BLOCK = re.compile(r'```(?:xml)?\s*(?P<xml><.*?)```', re.DOTALL)
NET_ELEMENT = re.compile(r'<net\b.*?</net>|<net\b[^>]*/>', re.DOTALL)


def extract_xml(text):
    """
    Finds the XML document in a model answer::

        >>> extract_xml('Sure!\\n```xml\\n<net/>\\n```\\nEnjoy.')
        '<net/>'
    """
    match = XML_BLOCK.search(text)
    if match is not None:
        return match.group('xml').strip()
    match = NET_ELEMENT.search(text)
    if match is not None:
        return match.group(0)
    return text.strip()


def map_prompt(description, feedback=None, example_kind='intersection'):
    """
    The system and user prompts asking for a network: the rules of the
    format, one worked template example and the description.
    """
    user_prompt = load_prompt('map_user').format(
        example_kind=example_kind.replace('_', ' '),
        example=emit_network(generate_template_map(example_kind)).strip(),
        description=description,
        feedback='FEEDBACK: {0}\n'.format(feedback) if feedback else '',
        report='')
    return load_prompt('map_system'), user_prompt


def generate_lm_map(
        description, gateway, max_repair_rounds=3, feedback=None,
        example_kind='intersection', request_seed=0, temperature=0.0,
        max_tokens=4096):
    """
    Asks the text model behind ``gateway`` for a network. While the answer
    does not parse or does not validate, the model is asked again with the
    problems appended, up to ``max_repair_rounds`` calls in total. If no round
    succeeds, ``RepairExhausted`` is raised with the last report.
    """
    if max_repair_rounds < 1:
        raise ParameterError(
            'max_repair_rounds', max_repair_rounds,
            message='max_repair_rounds must be at least 1')

    system_prompt, user_prompt = map_prompt(
        description, feedback, example_kind)
    report, parse_error = None, None

    for round_number in range(1, max_repair_rounds + 1):
        query = TextQuery(
            system_prompt, user_prompt, temperature=temperature,
            max_tokens=max_tokens, request_seed=request_seed,
            context={
                'description': description, 'feedback': feedback,
                'round': round_number})
        answer = gateway.complete_text(query)
        xml_text = extract_xml(answer)

        try:
            network = parse_network(xml_text)
        except ValidationError as e:
            report, parse_error = None, e
            problems = 'Your answer could not be read: {0}'.format(e)
        else:
            report, parse_error = network.validate(), None
            if report.is_empty:
                logger.info(
                    'network accepted after %d round(s)', round_number)
                return network
            problems = 'Your answer has these problems:\n{0}'.format(
                report.to_text())

        logger.warning(
            'round %d rejected: %s', round_number, problems.splitlines()[0])
        user_prompt = '{0}\nPREVIOUS ANSWER:\n```xml\n{1}\n```\n{2}\n' \
            'Write the corrected network.\n'.format(
                user_prompt.split('\nPREVIOUS ANSWER:')[0], xml_text,
                problems)

    raise RepairExhausted(max_repair_rounds, report, parse_error)


def import_map(xml_path):
    """
    Reads a network file, refusing networks with violations.
    """
    network = read_network(xml_path)
    report = network.validate()
    if not report.is_empty:
        raise NetworkRejected(report, 'imported network has violations')
    return network
