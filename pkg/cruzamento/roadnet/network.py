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
The road network is the static map of a scenario. It has three kinds of
elements, following the plain network files of SUMO:

``Lane``
    A lane a vehicle drives along, with its centerline, width and speed limit.
``Junction``
    The area where lanes meet, with the lanes entering and leaving it.
``Connection``
    A legal move from the end of one lane to the start of another.

A network is built from these elements::

    >>> network = RoadNetwork(
    ...     lanes=[
    ...         Lane('a', [(0, 0), (50, 0)], 3.5, 13.9),
    ...         Lane('b', [(50, 0), (100, 0)], 3.5, 13.9)],
    ...     connections=[Connection('a', 'b')])
    >>> network.successors('a')
    ['b']
    >>> network.bounding_box
    (0.0, 0.0, 100.0, 0.0)

Networks are validated by ``RoadNetwork.validate()``, which returns a
``ValidationReport`` instead of raising::

    >>> network.validate().is_empty
    True
"""
import collections
import functools
import itertools
import logging

import networkx

from cruzamento.errors import DanglingReference, GeometryViolation
from cruzamento.roadnet.geometry import Polyline

logger = logging.getLogger(__name__)

CONTINUITY_TOLERANCE = 2.0
MIN_LANE_LENGTH = 1.0
ADJACENCY_MARGIN = 0.5


class Lane(collections.namedtuple(
        'Lane', ('id', 'shape', 'width', 'speed_limit'))):
    """
    A lane. Its shape is kept as a tuple of float pairs and checked on
    creation::

        >>> Lane('a', [(0, 0), (0, 0), (5, 0)], 3.5, 10.0)
        Traceback (most recent call last):
          ...
        cruzamento.errors.GeometryViolation: a: repeated consecutive point \
(0.0, 0.0)
        >>> Lane('a', [(0, 0), (5, 0)], 0, 10.0)
        Traceback (most recent call last):
          ...
        cruzamento.errors.GeometryViolation: a: width must be positive
    """

    def __new__(cls, id, shape, width, speed_limit):
        shape = tuple((float(x), float(y)) for x, y in shape)
        if len(shape) < 2:
            raise GeometryViolation(id, 'shape needs at least two points')
        for p, q in zip(shape[:-1], shape[1:]):
            if p == q:
                raise GeometryViolation(
                    id, 'repeated consecutive point {0}'.format(p))
        if not float(width) > 0:
            raise GeometryViolation(id, 'width must be positive')
        if not float(speed_limit) > 0:
            raise GeometryViolation(id, 'speed limit must be positive')
        return super(Lane, cls).__new__(
            cls, str(id), shape, float(width), float(speed_limit))

    @functools.cached_property
    def polyline(self):
        return Polyline(self.shape)

    @property
    def length(self):
        return self.polyline.length

    @property
    def start(self):
        return self.shape[0]

    @property
    def end(self):
        return self.shape[-1]


class Junction(collections.namedtuple(
        'Junction', ('id', 'incoming', 'outgoing', 'shape'))):

    def __new__(cls, id, incoming=(), outgoing=(), shape=()):
        return super(Junction, cls).__new__(
            cls, str(id), tuple(incoming), tuple(outgoing),
            tuple((float(x), float(y)) for x, y in shape))


class Connection(collections.namedtuple(
        'Connection', ('from_lane', 'to_lane', 'via'))):
    """
    A legal move between lanes, optionally through a junction::

        >>> Connection('a', 'b')
        Connection(from_lane='a', to_lane='b', via=None)
    """

    def __new__(cls, from_lane, to_lane, via=None):
        return super(Connection, cls).__new__(cls, from_lane, to_lane, via)

    @property
    def id(self):
        return '{0}->{1}'.format(self.from_lane, self.to_lane)


Violation = collections.namedtuple(
    'Violation', ('kind', 'element_ids', 'message', 'value'))


class ValidationReport(object):
    """
    A list of violations found in a network. An empty report means a valid
    network::

        >>> report = ValidationReport([
        ...     Violation('degenerate', ('x',), 'lane is 0.5 m long', 0.5)])
        >>> report.is_empty
        False
        >>> print(report.to_text())
        degenerate x: lane is 0.5 m long
    """

    KINDS = ('dangling', 'discontinuity', 'degenerate', 'disconnected')

    def __init__(self, violations=()):
        self.violations = list(violations)

    @property
    def is_empty(self):
        return not self.violations

    def of_kind(self, kind):
        return [v for v in self.violations if v.kind == kind]

    def to_text(self):
        return '\n'.join(
            '{0} {1}: {2}'.format(v.kind, ','.join(v.element_ids), v.message)
            for v in self.violations)

    def to_list(self):
        return [
            {
                'kind': v.kind, 'elements': list(v.element_ids),
                'message': v.message, 'value': v.value
            }
            for v in self.violations
        ]

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)


class RoadNetwork(object):
    """
    A set of lanes, junctions and connections. Element ids must be unique::

        >>> lane = Lane('a', [(0, 0), (5, 0)], 3.5, 10.0)
        >>> RoadNetwork([lane, lane])
        Traceback (most recent call last):
          ...
        cruzamento.errors.GeometryViolation: a: duplicate lane id

    Elements are kept sorted by id so two networks with the same elements are
    equal no matter the order they were given in.
    """

    def __init__(self, lanes=(), junctions=(), connections=(), warnings=()):
        self.lanes = _index(lanes, 'lane')
        self.junctions = _index(junctions, 'junction')
        connections = tuple(connections)
        self.connections = tuple(sorted(set(connections), key=_connection_key))
        if len(self.connections) != len(connections):
            logger.warning('duplicate connections were merged')
        self.warnings = tuple(warnings)

    def lane(self, lane_id):
        return self.lanes[lane_id]

    @functools.cached_property
    def graph(self):
        """
        The lane graph: lanes are nodes and connections are edges.
        """
        graph = networkx.DiGraph()
        graph.add_nodes_from(self.lanes)
        graph.add_edges_from(
            (c.from_lane, c.to_lane) for c in self.connections
            if c.from_lane in self.lanes and c.to_lane in self.lanes)
        return graph

    def successors(self, lane_id):
        return sorted(self.graph.successors(lane_id))

    def predecessors(self, lane_id):
        return sorted(self.graph.predecessors(lane_id))

    def has_connection(self, from_lane, to_lane):
        return self.graph.has_edge(from_lane, to_lane)

    @functools.cached_property
    def bounding_box(self):
        points = [p for lane in self.lanes.values() for p in lane.shape]
        points += [p for j in self.junctions.values() for p in j.shape]
        if not points:
            return (0.0, 0.0, 0.0, 0.0)
        xs, ys = zip(*points)
        return (min(xs), min(ys), max(xs), max(ys))

    def dangling_references(self):
        """
        Yields ``(element_id, kind, missing_id)`` for every reference to an
        unknown element.
        """
        for junction in self.junctions.values():
            for lane_id in junction.incoming + junction.outgoing:
                if lane_id not in self.lanes:
                    yield junction.id, 'lane', lane_id
        for c in self.connections:
            for lane_id in (c.from_lane, c.to_lane):
                if lane_id not in self.lanes:
                    yield c.id, 'lane', lane_id
            if c.via is not None and c.via not in self.junctions:
                yield c.id, 'junction', c.via

    def check_references(self):
        for element_id, kind, missing_id in self.dangling_references():
            raise DanglingReference(element_id, kind, missing_id)

    def connection_gap(self, connection):
        end = self.lanes[connection.from_lane].end
        start = self.lanes[connection.to_lane].start
        return ((end[0] - start[0]) ** 2 + (end[1] - start[1]) ** 2) ** 0.5

    def road_groups(self):
        """
        Groups of lanes reachable from each other through connections or by
        driving across the surface of adjacent lanes. Each group is a sorted
        list; groups are sorted by their first lane id.
        """
        graph = networkx.Graph()
        graph.add_nodes_from(self.lanes)
        graph.add_edges_from(self.graph.edges)
        for a, b in itertools.combinations(self.lanes.values(), 2):
            limit = (a.width + b.width) / 2 + ADJACENCY_MARGIN
            if a.polyline.line.distance(b.polyline.line) <= limit:
                graph.add_edge(a.id, b.id)
        return sorted(
            sorted(component)
            for component in networkx.connected_components(graph))

    def validate(self):
        """
        Returns a ``ValidationReport`` listing dangling references,
        connections whose lanes are more than 2 m apart, lanes shorter than
        1 m and groups of lanes disconnected from each other::

            >>> network = RoadNetwork(
            ...     lanes=[
            ...         Lane('a', [(0, 0), (50, 0)], 3.5, 13.9),
            ...         Lane('b', [(60, 0), (100, 0)], 3.5, 13.9)],
            ...     connections=[Connection('a', 'b')])
            >>> print(network.validate().to_text())
            discontinuity a->b: connection gap is 10.000 m
        """
        violations = []

        for element_id, kind, missing_id in self.dangling_references():
            violations.append(Violation(
                'dangling', (element_id,),
                'references unknown {0} {1!r}'.format(kind, missing_id),
                missing_id))

        for c in self.connections:
            if c.from_lane not in self.lanes or c.to_lane not in self.lanes:
                continue
            gap = self.connection_gap(c)
            if gap > CONTINUITY_TOLERANCE:
                violations.append(Violation(
                    'discontinuity', (c.id,),
                    'connection gap is {0:.3f} m'.format(gap), gap))

        for lane in self.lanes.values():
            if lane.length < MIN_LANE_LENGTH:
                violations.append(Violation(
                    'degenerate', (lane.id,),
                    'lane is {0:.3f} m long'.format(lane.length),
                    lane.length))

        groups = self.road_groups()
        if len(groups) > 1:
            violations.append(Violation(
                'disconnected', tuple(g[0] for g in groups),
                '{0} disconnected groups: {1}'.format(
                    len(groups),
                    '; '.join(' '.join(g) for g in groups)),
                groups))

        return ValidationReport(violations)

    def __eq__(self, other):
        return (
            isinstance(other, RoadNetwork) and
            self.lanes == other.lanes and
            self.junctions == other.junctions and
            self.connections == other.connections
        )

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return self._hash

    @functools.cached_property
    def _hash(self):
        return hash((
            tuple(self.lanes.values()), tuple(self.junctions.values()),
            self.connections))

    def __repr__(self):
        return 'RoadNetwork(<{0} lanes, {1} junctions, {2} connections>)'\
            .format(
                len(self.lanes), len(self.junctions), len(self.connections))


def _index(elements, kind):
    index = {}
    for element in elements:
        if element.id in index:
            raise GeometryViolation(
                element.id, 'duplicate {0} id'.format(kind))
        index[element.id] = element
    return dict(sorted(index.items()))


def _connection_key(connection):
    return (
        connection.from_lane, connection.to_lane,
        connection.via if connection.via is not None else '')


def network_to_dict(network):
    return {
        'lanes': [
            {
                'id': lane.id, 'shape': [list(p) for p in lane.shape],
                'width': lane.width, 'speed_limit': lane.speed_limit
            }
            for lane in network.lanes.values()
        ],
        'junctions': [
            {
                'id': j.id, 'incoming': list(j.incoming),
                'outgoing': list(j.outgoing),
                'shape': [list(p) for p in j.shape]
            }
            for j in network.junctions.values()
        ],
        'connections': [
            {'from': c.from_lane, 'to': c.to_lane, 'via': c.via}
            for c in network.connections
        ]
    }


def network_from_dict(document):
    network = RoadNetwork(
        [Lane(d['id'], d['shape'], d['width'], d['speed_limit'])
         for d in document.get('lanes', [])],
        [Junction(d['id'], d.get('incoming', ()), d.get('outgoing', ()),
                  d.get('shape', ()))
         for d in document.get('junctions', [])],
        [Connection(d['from'], d['to'], d.get('via'))
         for d in document.get('connections', [])])
    network.check_references()
    return network
