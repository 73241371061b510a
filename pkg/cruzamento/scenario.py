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
The scenario is the unit Cruzamento produces and consumes: a road network, the
vehicles placed on it and the trajectory each vehicle follows for ten seconds.
This module has the value types, the coordinate conventions and the scenario
file format.

Coordinates are meters in a scenario frame, headings are radians in
``(-pi, pi]`` measured from the x axis and speeds are non-negative scalars
along the heading.
"""
import collections
import json
import math

import numpy as np

from cruzamento.errors import SchemaVersionError, ValidationError

T_S = 100
DT = 0.1
MAX_VEHICLES = 16
SCHEMA_VERSION = 1
SPEED_TOLERANCE = 0.5

KINDS = ('car', 'truck', 'bus', 'motorcycle')
PROVENANCES = ('dataset', 'generated', 'corner_case')


def normalize_angle(angle):
    """
    Brings an angle (or an array of angles) into ``(-pi, pi]``::

        >>> normalize_angle(0.0)
        0.0
        >>> normalize_angle(-math.pi) == math.pi
        True
        >>> round(normalize_angle(3 * math.pi / 2), 6)
        -1.570796
    """
    result = math.pi - np.mod(math.pi - angle, 2 * math.pi)
    if np.ndim(result) == 0:
        return float(result)
    return result


class VehicleState(collections.namedtuple(
        'VehicleState', ('x', 'y', 'heading', 'speed'))):
    """
    The state of a vehicle at one timestep::

        >>> s = VehicleState(1.0, 2.0, 2 * math.pi, 3.0)
        >>> s.heading
        0.0

    Speeds cannot be negative and positions must be finite::

        >>> VehicleState(0.0, 0.0, 0.0, -1.0)
        Traceback (most recent call last):
          ...
        cruzamento.errors.ValidationError: speed: must be non-negative, \
got -1.0
    """
    __slots__ = ()

    def __new__(cls, x, y, heading, speed):
        x, y, heading, speed = float(x), float(y), float(heading), float(speed)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValidationError('position must be finite', field_path='x,y')
        if not math.isfinite(heading):
            raise ValidationError('must be finite', field_path='heading')
        if not speed >= 0:
            raise ValidationError(
                'must be non-negative, got {0!r}'.format(speed),
                field_path='speed')
        return super(VehicleState, cls).__new__(
            cls, x, y, normalize_angle(heading), speed)

    @property
    def position(self):
        return np.array([self.x, self.y])

    def to_dict(self):
        return {
            'x': self.x, 'y': self.y, 'heading': self.heading,
            'speed': self.speed
        }


class VehicleAttributes(collections.namedtuple(
        'VehicleAttributes',
        ('id', 'kind', 'length', 'width', 'height', 'initial_state',
         'is_target'))):
    """
    What is known about a vehicle before rollout: its type, its size and where
    it starts::

        >>> v = VehicleAttributes(
        ...     0, 'car', 4.5, 1.8, 1.5, VehicleState(0, 0, 0, 10), True)
        >>> v.kind, v.is_target
        ('car', True)

    Sizes must be positive and the kind must be known::

        >>> VehicleAttributes(
        ...     1, 'tank', 4.5, 1.8, 1.5, VehicleState(0, 0, 0, 10), False)
        Traceback (most recent call last):
          ...
        cruzamento.errors.ValidationError: kind: unknown vehicle kind 'tank'
    """
    __slots__ = ()

    def __new__(
            cls, id, kind, length, width, height, initial_state,
            is_target=False):
        if kind not in KINDS:
            raise ValidationError(
                'unknown vehicle kind {0!r}'.format(kind), field_path='kind')
        for name, value in (
                ('length', length), ('width', width), ('height', height)):
            if not float(value) > 0:
                raise ValidationError(
                    'must be positive, got {0!r}'.format(value),
                    field_path=name)
        return super(VehicleAttributes, cls).__new__(
            cls, int(id), kind, float(length), float(width), float(height),
            initial_state, bool(is_target))

    def to_dict(self):
        return {
            'id': self.id, 'kind': self.kind, 'length': self.length,
            'width': self.width, 'height': self.height,
            'initial_state': self.initial_state.to_dict(),
            'is_target': self.is_target
        }

    @staticmethod
    def from_dict(d):
        return VehicleAttributes(
            d['id'], d['kind'], d['length'], d['width'], d['height'],
            VehicleState(**d['initial_state']), d.get('is_target', False))


class Trajectory(object):
    """
    A sequence of states sampled every ``dt`` seconds. Internally it is a
    read-only ``(n, 4)`` array with columns x, y, heading and speed::

        >>> t = Trajectory.from_states(
        ...     [VehicleState(0, 0, 0, 1), VehicleState(0.1, 0, 0, 1)])
        >>> len(t)
        2
        >>> t[1]
        VehicleState(x=0.1, y=0.0, heading=0.0, speed=1.0)

    The array cannot be changed afterwards::

        >>> t.array[0, 0] = 5
        Traceback (most recent call last):
          ...
        ValueError: assignment destination is read-only
    """

    def __init__(self, array, dt=DT):
        array = np.array(array, dtype=np.float64)
        if array.ndim != 2 or array.shape[1] != 4 or len(array) < 1:
            raise ValidationError(
                'expected an (n, 4) array, got shape {0}'.format(
                    array.shape),
                field_path='trajectory')
        array[:, 2] = normalize_angle(array[:, 2])
        array.setflags(write=False)
        self.array = array
        self.dt = dt

    @staticmethod
    def from_states(states, dt=DT):
        return Trajectory(
            [(s.x, s.y, s.heading, s.speed) for s in states], dt)

    @staticmethod
    def from_arrays(positions, headings, speeds, dt=DT):
        positions = np.asarray(positions, dtype=np.float64)
        return Trajectory(
            np.column_stack([positions, headings, speeds]), dt)

    @property
    def positions(self):
        return self.array[:, :2]

    @property
    def headings(self):
        return self.array[:, 2]

    @property
    def speeds(self):
        return self.array[:, 3]

    def __len__(self):
        return len(self.array)

    def __getitem__(self, index):
        return VehicleState(*self.array[index])

    def __iter__(self):
        return (VehicleState(*row) for row in self.array)

    def __eq__(self, other):
        return (
            isinstance(other, Trajectory) and
            self.dt == other.dt and
            np.array_equal(self.array, other.array)
        )

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Trajectory(<{0} states>)'.format(len(self))

    def check(self, horizon=T_S, tolerance=SPEED_TOLERANCE):
        """
        Raises ``ValidationError`` if the trajectory breaks an invariant:
        exactly ``horizon + 1`` finite states, non-negative speeds and
        positions that agree with the stored speeds::

            >>> t = Trajectory.from_states([VehicleState(0, 0, 0, 1)] * 50)
            >>> t.check()
            Traceback (most recent call last):
              ...
            cruzamento.errors.ValidationError: trajectory: T_s requires 101 \
states, got 50

        The displacement between two states, divided by ``dt``, must be within
        ``tolerance`` of the speed stored at the later state.
        """
        if len(self) != horizon + 1:
            raise ValidationError(
                'T_s requires {0} states, got {1}'.format(
                    horizon + 1, len(self)),
                field_path='trajectory')
        if not np.all(np.isfinite(self.array)):
            raise ValidationError('non-finite values', field_path='trajectory')
        if np.any(self.speeds < 0):
            raise ValidationError('negative speed', field_path='trajectory')

        implied = np.linalg.norm(np.diff(self.positions, axis=0), axis=1)
        implied = implied / self.dt
        mismatch = np.abs(implied - self.speeds[1:])
        if len(mismatch) and mismatch.max() > tolerance:
            step = int(np.argmax(mismatch)) + 1
            raise ValidationError(
                'speed at step {0} disagrees with positions by {1:.3f} m/s'
                .format(step, mismatch.max()),
                field_path='trajectory')


class Scenario(object):
    """
    A complete scenario: a map, up to sixteen vehicles and one trajectory per
    vehicle.

    >>> s0 = VehicleState(0, 0, 0, 0)
    >>> v = VehicleAttributes(0, 'car', 4.5, 1.8, 1.5, s0, True)
    >>> scenario = Scenario(None, [v], {0: Trajectory.from_states([s0] * 3)})
    >>> scenario.target.id
    0

    Every vehicle needs exactly one trajectory starting at its initial state::

        >>> Scenario(None, [v], {})
        Traceback (most recent call last):
          ...
        cruzamento.errors.ValidationError: trajectories: vehicle ids [0] \
have no trajectory
    """

    def __init__(
            self, network, vehicles, trajectories, seed=0,
            provenance='generated', metadata=None):
        vehicles = tuple(vehicles)
        trajectories = dict(trajectories)

        if not 1 <= len(vehicles) <= MAX_VEHICLES:
            raise ValidationError(
                'expected between 1 and {0} vehicles, got {1}'.format(
                    MAX_VEHICLES, len(vehicles)),
                field_path='vehicles')

        ids = [v.id for v in vehicles]
        if len(set(ids)) != len(ids):
            raise ValidationError(
                'repeated vehicle ids', field_path='vehicles')

        targets = [v for v in vehicles if v.is_target]
        if len(targets) != 1:
            raise ValidationError(
                'expected exactly one target, got {0}'.format(len(targets)),
                field_path='vehicles')

        missing = sorted(set(ids) - set(trajectories))
        if missing:
            raise ValidationError(
                'vehicle ids {0} have no trajectory'.format(missing),
                field_path='trajectories')
        extra = sorted(set(trajectories) - set(ids))
        if extra:
            raise ValidationError(
                'trajectories for unknown vehicle ids {0}'.format(extra),
                field_path='trajectories')

        for v in vehicles:
            first = trajectories[v.id].array[0]
            initial = np.array(v.initial_state)
            gap = np.abs(first - initial)
            gap[2] = abs(normalize_angle(first[2] - initial[2]))
            if gap.max() > 1e-9:
                raise ValidationError(
                    'state 0 differs from the initial state',
                    field_path='trajectories.{0}'.format(v.id))

        if provenance not in PROVENANCES:
            raise ValidationError(
                'unknown provenance {0!r}'.format(provenance),
                field_path='provenance')

        self.network = network
        self.vehicles = vehicles
        self.trajectories = trajectories
        self.seed = int(seed)
        self.provenance = provenance
        self.metadata = dict(metadata) if metadata is not None else {}

    @property
    def target(self):
        return next(v for v in self.vehicles if v.is_target)

    def vehicle(self, vehicle_id):
        return next(v for v in self.vehicles if v.id == vehicle_id)

    def ordered_trajectories(self):
        """
        Returns the trajectories in asset order.
        """
        return [self.trajectories[v.id] for v in self.vehicles]

    def check(self, horizon=T_S):
        for v in self.vehicles:
            try:
                self.trajectories[v.id].check(horizon)
            except ValidationError as e:
                raise ValidationError(
                    e.message, field_path='trajectories.{0}'.format(v.id))

    def replace(self, **changes):
        """
        Returns a copy of the scenario with some fields replaced.
        """
        fields = {
            'network': self.network, 'vehicles': self.vehicles,
            'trajectories': self.trajectories, 'seed': self.seed,
            'provenance': self.provenance, 'metadata': self.metadata
        }
        fields.update(changes)
        return Scenario(**fields)

    def __eq__(self, other):
        return (
            isinstance(other, Scenario) and
            self.network == other.network and
            self.vehicles == other.vehicles and
            self.trajectories == other.trajectories and
            self.seed == other.seed and
            self.provenance == other.provenance and
            self.metadata == other.metadata
        )

    def __ne__(self, other):
        return not self == other


def canonicalize(trajectory):
    """
    Moves a trajectory so that it starts at the origin heading along the x
    axis. The motion is rigid, so distances and speeds are kept. For example, a
    straight line heading north from ``(5, 5)``...

    ::

        >>> states = [
        ...     VehicleState(5, 5 + i, math.pi / 2, 10) for i in range(3)]
        >>> c = canonicalize(Trajectory.from_states(states))

    ...becomes a straight line along the x axis::

        >>> np.round(c.positions, 9).tolist()
        [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]
        >>> c.headings.tolist()
        [0.0, 0.0, 0.0]

    Doing it twice is the same as doing it once::

        >>> canonicalize(c) == c
        True
    """
    x0, y0, h0, _ = trajectory.array[0]
    if x0 == 0 and y0 == 0 and h0 == 0:
        return trajectory

    cos, sin = math.cos(h0), math.sin(h0)
    offsets = trajectory.positions - (x0, y0)
    positions = np.column_stack([
        offsets[:, 0] * cos + offsets[:, 1] * sin,
        -offsets[:, 0] * sin + offsets[:, 1] * cos
    ])
    positions[0] = 0.0
    headings = normalize_angle(trajectory.headings - h0)
    headings[0] = 0.0

    return Trajectory.from_arrays(
        positions, headings, trajectory.speeds, trajectory.dt)


def scenario_to_dict(scenario):
    from cruzamento.roadnet.network import network_to_dict

    return {
        'version': SCHEMA_VERSION,
        'seed': scenario.seed,
        'provenance': scenario.provenance,
        'metadata': scenario.metadata,
        'map': (
            network_to_dict(scenario.network)
            if scenario.network is not None else None),
        'vehicles': [v.to_dict() for v in scenario.vehicles],
        'trajectories': {
            str(v.id): [
                {
                    'x': float(x), 'y': float(y), 'heading': float(h),
                    'speed': float(s)
                }
                for x, y, h, s in scenario.trajectories[v.id].array
            ]
            for v in scenario.vehicles
        }
    }


def scenario_from_dict(document, horizon=T_S):
    from cruzamento.roadnet.network import network_from_dict

    version = document.get('version')
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(version, SCHEMA_VERSION)

    raw_vehicles = document.get('vehicles', [])
    if not 1 <= len(raw_vehicles) <= MAX_VEHICLES:
        raise ValidationError(
            'expected between 1 and {0} vehicles, got {1}'.format(
                MAX_VEHICLES, len(raw_vehicles)),
            field_path='vehicles')

    vehicles = []
    for i, raw in enumerate(raw_vehicles):
        try:
            vehicles.append(VehicleAttributes.from_dict(raw))
        except ValidationError as e:
            raise ValidationError(
                e.message, field_path='vehicles.{0}'.format(i))
        except (KeyError, TypeError) as e:
            raise ValidationError(
                'missing or invalid field {0}'.format(e),
                field_path='vehicles.{0}'.format(i))

    trajectories = {}
    for key, raw_states in document.get('trajectories', {}).items():
        path = 'trajectories.{0}'.format(key)
        try:
            trajectory = Trajectory(
                [(s['x'], s['y'], s['heading'], s['speed'])
                 for s in raw_states])
        except (KeyError, TypeError) as e:
            raise ValidationError(
                'missing or invalid field {0}'.format(e), field_path=path)
        try:
            trajectory.check(horizon)
        except ValidationError as e:
            raise ValidationError(e.message, field_path=path)
        trajectories[int(key)] = trajectory

    network = None
    if document.get('map') is not None:
        network = network_from_dict(document['map'])

    return Scenario(
        network, vehicles, trajectories, document.get('seed', 0),
        document.get('provenance', 'generated'), document.get('metadata'))


def dumps_scenario(scenario):
    """
    Serializes a scenario to the JSON text written by ``write_scenario()``.
    The text is deterministic: keys are sorted and floats keep their shortest
    exact representation.
    """
    scenario.check()
    return json.dumps(
        scenario_to_dict(scenario), indent=1, sort_keys=True) + '\n'


def loads_scenario(text, horizon=T_S):
    try:
        document = json.loads(text)
    except ValueError as e:
        raise ValidationError(str(e), field_path='document')
    return scenario_from_dict(document, horizon)


def write_scenario(scenario, path):
    with open(path, 'w') as f:
        f.write(dumps_scenario(scenario))


def read_scenario(path, horizon=T_S):
    with open(path) as f:
        return loads_scenario(f.read(), horizon)
