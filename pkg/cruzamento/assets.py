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
Vehicle assets: the database of vehicle types and sizes, and the placement of
vehicles on a road network before rollout.

A database is a CSV file with the header
``kind,length,width,height,speed_min,speed_max``. Cruzamento ships one::

    >>> database = default_database()
    >>> sorted(database.kinds)
    ['bus', 'car', 'motorcycle', 'truck']

Placement puts the target vehicle somewhere on the network and the social
vehicles around it::

    >>> from cruzamento.mapsynth import generate_template_map
    >>> network = generate_template_map('highway', {'lanes': 2})
    >>> vehicles = place_vehicles(network, database, 4, seed=1)
    >>> [v.id for v in vehicles], vehicles[0].is_target
    ([0, 1, 2, 3], True)
"""
import collections
import csv
import io
import json
import logging
import math
import pkgutil

import numpy as np
import shapely.geometry

from cruzamento.errors import (
    DatabaseError, OffRoadError, ParameterError, ValidationError)
from cruzamento.roadnet.geometry import box_polygon
from cruzamento.roadnet.routes import enumerate_routes
from cruzamento.scenario import (
    KINDS, MAX_VEHICLES, SCHEMA_VERSION, VehicleAttributes, VehicleState)

logger = logging.getLogger(__name__)

HEADER = ('kind', 'length', 'width', 'height', 'speed_min', 'speed_max')

SURROUND_RADIUS = 50.0
SPEED_BAND = 0.2
BUMPER_GAP = 2.0
PLACEMENT_TRIES = 100
STOP_DECEL = 7.5


class VehicleRecord(collections.namedtuple('VehicleRecord', HEADER)):
    """
    One vehicle type of the database: its kind, its size in meters and the
    speeds, in m/s, it usually drives at.
    """
    __slots__ = ()


class VehicleDatabase(object):
    """
    A list of vehicle records. Repeated records are kept, so common vehicles
    are drawn more often::

        >>> database = VehicleDatabase([
        ...     VehicleRecord('car', 4.5, 1.8, 1.5, 5, 15),
        ...     VehicleRecord('car', 4.5, 1.8, 1.5, 5, 15),
        ...     VehicleRecord('bus', 12, 2.5, 3.2, 3, 11)])
        >>> len(database), len(database.by_kind('car'))
        (3, 2)

    An empty database is useless::

        >>> VehicleDatabase([])
        Traceback (most recent call last):
          ...
        cruzamento.errors.DatabaseError: no records
    """

    def __init__(self, records, source=None):
        records = tuple(records)
        if not records:
            raise DatabaseError('no records')
        self.records = records
        self.source = source

    @property
    def kinds(self):
        return {r.kind for r in self.records}

    def by_kind(self, kind):
        records = [r for r in self.records if r.kind == kind]
        if not records:
            raise DatabaseError(
                'no record of kind {0!r} in {1}'.format(
                    kind, self.source or 'database'))
        return records

    def sample(self, rng, kind=None):
        records = self.records if kind is None else self.by_kind(kind)
        return records[int(rng.integers(len(records)))]

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def parse_database(text, source=None):
    """
    Reads database records from CSV text. Malformed rows are reported with
    their line number::

        >>> parse_database(
        ...     'kind,length,width,height,speed_min,speed_max\\n'
        ...     'car,4.5,1.8,1.5,5,15\\n'
        ...     'car,-4.5,1.8,1.5,5,15\\n')
        Traceback (most recent call last):
          ...
        cruzamento.errors.DatabaseError: line 3: length must be positive, \
got -4.5
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise DatabaseError('no records')
    if tuple(h.strip() for h in header) != HEADER:
        raise DatabaseError(
            'expected header {0}'.format(','.join(HEADER)), line=1)

    records = []
    for row in reader:
        line = reader.line_num
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != len(HEADER):
            raise DatabaseError(
                'expected {0} fields, got {1}'.format(len(HEADER), len(row)),
                line=line)
        kind = row[0].strip()
        if kind not in KINDS:
            raise DatabaseError(
                'unknown vehicle kind {0!r}'.format(kind), line=line)
        try:
            values = [float(cell) for cell in row[1:]]
        except ValueError as e:
            raise DatabaseError(str(e), line=line)
        for name, value in zip(HEADER[1:], values):
            if not math.isfinite(value) or \
                    (name.startswith('speed') and value < 0) or \
                    (not name.startswith('speed') and value <= 0):
                raise DatabaseError(
                    '{0} must be {1}, got {2!r}'.format(
                        name,
                        'non-negative' if name.startswith('speed')
                        else 'positive',
                        value),
                    line=line)
        if values[3] > values[4]:
            raise DatabaseError('speed_min exceeds speed_max', line=line)
        records.append(VehicleRecord(kind, *values))

    return VehicleDatabase(records, source)


def ingest_database(csv_path):
    try:
        with open(csv_path, newline='') as f:
            text = f.read()
    except OSError as e:
        raise DatabaseError('cannot read {0}: {1}'.format(csv_path, e))
    database = parse_database(text, csv_path)
    logger.info('read %d vehicle records from %s', len(database), csv_path)
    return database


def default_database():
    text = pkgutil.get_data('cruzamento', 'data/vehicles.csv')
    return parse_database(text.decode('utf-8'), 'cruzamento:data/vehicles.csv')


class VehiclePlacer(object):
    """
    Places vehicles by rejection sampling. The target comes first, uniformly
    over the length of every lane, heading along its lane. Social vehicles are
    then drawn on the lane stretches within ``radius`` meters of the target,
    with speeds within ``speed_band`` of the target speed::

        >>> from cruzamento.mapsynth import generate_template_map
        >>> network = generate_template_map('highway', {'lanes': 2})
        >>> placer = VehiclePlacer(network, default_database(), seed=3)
        >>> vehicles = placer.place(6)
        >>> target = vehicles[0]
        >>> all(0.8 * target.initial_state.speed - 1e-9 <=
        ...     v.initial_state.speed <=
        ...     1.2 * target.initial_state.speed + 1e-9 for v in vehicles)
        True

    Footprints, lengthened by ``bumper_gap`` meters, never overlap. Every
    vehicle can brake to a stop at ``stop_decel`` before the road ahead of it
    ends: the target is slowed down when it could not, and social vehicles
    that could not are drawn again. A social vehicle that cannot be placed in
    ``tries`` draws is dropped; the shortfall is kept in ``dropped``.
    """

    def __init__(
            self, network, database, seed=0, radius=SURROUND_RADIUS,
            speed_band=SPEED_BAND, bumper_gap=BUMPER_GAP,
            tries=PLACEMENT_TRIES, stop_decel=STOP_DECEL):
        if not network.lanes:
            raise ValidationError(
                'target placement is impossible without lanes',
                field_path='network')
        self.network = network
        self.database = database
        self.seed = seed
        self.radius = radius
        self.speed_band = speed_band
        self.bumper_gap = bumper_gap
        self.tries = tries
        self.stop_decel = stop_decel
        self.dropped = 0

    def place(self, n_vehicles):
        if not 1 <= n_vehicles <= MAX_VEHICLES:
            raise ParameterError('n_vehicles', n_vehicles, (1, MAX_VEHICLES))
        rng = np.random.default_rng(self.seed)
        self.dropped = 0

        target = self._place_target(rng)
        vehicles = [target]
        footprints = [self._footprint(target)]
        stretches = self._stretches(target.initial_state)

        for _ in range(n_vehicles - 1):
            record = self.database.sample(rng)
            vehicle = None
            for _ in range(self.tries):
                candidate = self._draw_social(
                    rng, record, len(vehicles), target, stretches)
                if candidate is None:
                    break
                footprint = self._footprint(candidate)
                if any(footprint.intersects(f) for f in footprints):
                    continue
                if self.can_stop(candidate.initial_state):
                    vehicle = candidate
                    break
            if vehicle is None:
                self.dropped += 1
                continue
            vehicles.append(vehicle)
            footprints.append(footprint)

        if self.dropped:
            logger.warning(
                'dropped %d of %d social vehicles: no free spot found',
                self.dropped, n_vehicles - 1)
        return vehicles

    def _place_target(self, rng):
        lanes = list(self.network.lanes.values())
        lengths = np.array([lane.length for lane in lanes])
        lane = lanes[int(rng.choice(len(lanes), p=lengths / lengths.sum()))]
        offset = float(rng.uniform(0, lane.length))
        record = self.database.sample(rng)

        high = min(record.speed_max, lane.speed_limit)
        low = min(record.speed_min, high)
        x, y = lane.polyline.point_at(offset)
        state = VehicleState(
            x, y, lane.polyline.heading_at(offset), rng.uniform(low, high))
        if not self.can_stop(state):
            room = self.stopping_room(state)
            state = VehicleState(
                x, y, state.heading, math.sqrt(2 * self.stop_decel * room))
            logger.info(
                'target slowed down to %.2f m/s to stop within %.1f m',
                state.speed, room)
        return VehicleAttributes(
            0, record.kind, record.length, record.width, record.height,
            state, True)

    def stopping_room(self, state):
        """
        The length of the longest route ahead of a vehicle in ``state``, or
        zero when it is not on a lane.
        """
        try:
            routes = enumerate_routes(self.network, state)
        except OffRoadError:
            return 0.0
        return max((r.polyline.length for r in routes), default=0.0)

    def can_stop(self, state):
        needed = state.speed * state.speed / (2 * self.stop_decel)
        return self.stopping_room(state) >= needed - 1e-9

    def _stretches(self, center):
        disk = shapely.geometry.Point(center.x, center.y).buffer(
            self.radius, quad_segs=32)
        stretches = []
        for lane in self.network.lanes.values():
            inside = lane.polyline.line.intersection(disk)
            pieces = getattr(inside, 'geoms', [inside])
            for piece in pieces:
                if piece.geom_type == 'LineString' and piece.length > 0:
                    stretches.append((lane, piece))
        return stretches

    def _draw_social(self, rng, record, vehicle_id, target, stretches):
        if not stretches:
            return None
        lengths = np.array([piece.length for _, piece in stretches])
        index = int(rng.choice(len(stretches), p=lengths / lengths.sum()))
        lane, piece = stretches[index]
        point = piece.interpolate(float(rng.uniform(0, piece.length)))
        offset = lane.polyline.project((point.x, point.y))
        x, y = lane.polyline.point_at(offset)

        factor = rng.uniform(1 - self.speed_band, 1 + self.speed_band)
        speed = max(0.0, target.initial_state.speed * factor)
        state = VehicleState(x, y, lane.polyline.heading_at(offset), speed)
        return VehicleAttributes(
            vehicle_id, record.kind, record.length, record.width,
            record.height, state, False)

    def _footprint(self, vehicle):
        s = vehicle.initial_state
        return box_polygon(
            s.x, s.y, s.heading, vehicle.length + self.bumper_gap,
            vehicle.width)


def place_vehicles(network, database, n_vehicles, seed=0, **settings):
    """
    Places ``n_vehicles`` vehicles, the target first. ``settings`` are passed
    to ``VehiclePlacer``. The same seed always gives the same vehicles.
    """
    return VehiclePlacer(network, database, seed, **settings).place(n_vehicles)


def dumps_assets(vehicles, metadata=None):
    return json.dumps({
        'version': SCHEMA_VERSION,
        'metadata': metadata or {},
        'vehicles': [v.to_dict() for v in vehicles],
    }, indent=1, sort_keys=True) + '\n'


def loads_assets(text):
    """
    Reads the vehicle list written by ``dumps_assets()``::

        >>> v = VehicleAttributes(
        ...     0, 'car', 4.5, 1.8, 1.5, VehicleState(0, 0, 0, 10), True)
        >>> loads_assets(dumps_assets([v])) == [v]
        True
    """
    try:
        document = json.loads(text)
    except ValueError as e:
        raise ValidationError(str(e), field_path='document')
    if document.get('version') != SCHEMA_VERSION:
        raise ValidationError(
            'unsupported version {0!r}'.format(document.get('version')),
            field_path='version')
    vehicles = []
    for i, raw in enumerate(document.get('vehicles', [])):
        try:
            vehicles.append(VehicleAttributes.from_dict(raw))
        except (KeyError, TypeError) as e:
            raise ValidationError(
                'missing or invalid field {0}'.format(e),
                field_path='vehicles.{0}'.format(i))
    return vehicles


def write_assets(vehicles, path, metadata=None):
    with open(path, 'w') as f:
        f.write(dumps_assets(vehicles, metadata))


def read_assets(path):
    with open(path) as f:
        return loads_assets(f.read())
