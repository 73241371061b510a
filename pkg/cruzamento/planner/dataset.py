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
Synthetic driving data for training the planner.

Vehicles start somewhere on a template map, pick a route and drive it with a
kinematic bicycle steered by pure pursuit. The speed follows one of four
profiles:

``constant``
    keep the initial speed;
``accelerate``, ``decelerate``
    change speed at a constant rate until the speed limit or a stop;
``stop_and_go``
    brake to a stop, wait, then drive off again.

On multi-lane roads some vehicles also change lane along a smooth lateral
offset. Every trajectory is checked by the legality checker and discarded if
it fails.

Datasets are stored as compressed NumPy archives with the arrays
``trajectories`` (n, T_S + 1, 4), ``rasters`` (n, size, size) holding map
rasters as ``uint8`` codes (0 empty, 1 lane border, 2 lane surface),
``kinds``, ``profiles`` and ``version``.
"""
import logging
import math

import numpy as np
import torch

from cruzamento.errors import OffRoadError, ValidationError
from cruzamento.mapsynth import TEMPLATE_DEFAULTS, generate_template_map
from cruzamento.planner.encoding import (
    TrajectoryEncoder, condition_features, derive_states)
from cruzamento.planner.training import TrajectoryBatch
from cruzamento.raster import RASTER_SIZE, RESOLUTION, rasterize_map
from cruzamento.roadnet.routes import enumerate_routes
from cruzamento.rollout.legality import check_legality
from cruzamento.scenario import (
    DT, T_S, Trajectory, VehicleAttributes, VehicleState, normalize_angle)

logger = logging.getLogger(__name__)

DATASET_VERSION = 1

PROFILES = ('constant', 'accelerate', 'decelerate', 'stop_and_go')
DEFAULT_TEMPLATES = tuple(
    (kind, TEMPLATE_DEFAULTS[kind]) for kind in sorted(TEMPLATE_DEFAULTS))
LANE_CHANGE_KINDS = ('highway', 'on_ramp_merge')

WHEELBASE = 2.7
MAX_STEER = 0.5
MIN_LOOKAHEAD = 4.0
LOOKAHEAD_TIME = 1.0
CURVE_LATERAL_ACCEL = 3.0
MAX_BRAKE = 3.0
END_MARGIN = 5.0
LANE_CHANGE_PROBABILITY = 0.3
ATTEMPTS_PER_SAMPLE = 50
SAMPLE_VEHICLE = VehicleAttributes(
    0, 'car', 4.5, 1.8, 1.5, VehicleState(0, 0, 0, 0), True)


class SyntheticDataset(object):
    """
    Trajectories with the maps they were driven on::

        >>> dataset = generate_synthetic_dataset(
        ...     2, seed=1, raster_size=32, templates=[
        ...         ('highway', {'lanes': 2})])
        >>> len(dataset), dataset.trajectories.shape
        (2, (2, 101, 4))
        >>> dataset.rasters.shape
        (2, 32, 32)
    """

    def __init__(self, trajectories, rasters, kinds, profiles):
        self.trajectories = np.asarray(trajectories, dtype=np.float64)
        self.rasters = np.asarray(rasters, dtype=np.uint8)
        self.kinds = tuple(str(k) for k in kinds)
        self.profiles = tuple(str(p) for p in profiles)
        if not len(self.trajectories) == len(self.rasters) == \
                len(self.kinds) == len(self.profiles):
            raise ValidationError(
                'dataset arrays differ in length', field_path='dataset')

    def __len__(self):
        return len(self.trajectories)

    def trajectory(self, index):
        return Trajectory(self.trajectories[index])

    def initial_state(self, index):
        return VehicleState(*self.trajectories[index][0])

    def goal(self, index):
        return VehicleState(*self.trajectories[index][-1])

    def raster(self, index):
        return self.rasters[index].astype(np.float32) / 2

    def raw_offsets(self):
        """
        Position offsets of every step in the frame of the first state, in
        meters, for fitting the scale of an encoder.
        """
        encoder = TrajectoryEncoder()
        return np.stack([
            encoder.raw_offsets(t[:, :2], VehicleState(*t[0]))
            for t in self.trajectories])

    def split(self, count):
        """
        Splits off the last ``count`` samples, for evaluation.
        """
        head = slice(0, len(self) - count)
        tail = slice(len(self) - count, len(self))
        return self._subset(head), self._subset(tail)

    def _subset(self, part):
        return SyntheticDataset(
            self.trajectories[part], self.rasters[part], self.kinds[part],
            self.profiles[part])

    def to_batch(self, encoder, use_map=True, dtype=torch.float32):
        offsets, starts, goals = [], [], []
        for index in range(len(self)):
            state = self.initial_state(index)
            final = self.goal(index)
            offsets.append(encoder.encode_positions(
                self.trajectories[index][:, :2], state))
            start, goal = condition_features(
                state, (final.x, final.y), final.heading)
            starts.append(start)
            goals.append(goal)
        raster = None
        if use_map:
            raster = torch.as_tensor(
                self.rasters[:, None].astype(np.float64) / 2, dtype=dtype)
        return TrajectoryBatch(
            torch.as_tensor(np.stack(offsets), dtype=dtype),
            torch.as_tensor(np.stack(starts), dtype=dtype),
            torch.as_tensor(np.stack(goals), dtype=dtype),
            raster)

    def save(self, path):
        np.savez_compressed(
            path, version=np.array(DATASET_VERSION),
            trajectories=self.trajectories, rasters=self.rasters,
            kinds=np.array(self.kinds, dtype=str),
            profiles=np.array(self.profiles, dtype=str))

    @staticmethod
    def load(path):
        try:
            with np.load(path, allow_pickle=False) as archive:
                version = int(archive['version'])
                if version != DATASET_VERSION:
                    raise ValidationError(
                        'unsupported dataset version {0}'.format(version),
                        field_path='version')
                return SyntheticDataset(
                    archive['trajectories'], archive['rasters'],
                    archive['kinds'].tolist(), archive['profiles'].tolist())
        except (OSError, KeyError, ValueError) as e:
            raise ValidationError(
                'cannot read dataset {0}: {1}'.format(path, e),
                field_path='dataset')


class SpeedProfile(object):
    """
    The acceleration asked for at time ``t`` by one of the ``PROFILES``.
    """

    def __init__(self, name, rng, speed_limit):
        self.name = name
        self.speed_limit = speed_limit
        self.rate = float(rng.uniform(0.5, 2.0))
        self.brake_at = float(rng.uniform(0.0, 3.0))
        self.brake = float(rng.uniform(1.5, MAX_BRAKE))
        self.wait = float(rng.uniform(1.0, 3.0))
        self.stopped_at = None

    def accel(self, t, speed):
        if self.name == 'accelerate':
            return self.rate if speed < self.speed_limit else 0.0
        if self.name == 'decelerate':
            return -self.rate if speed > 0 else 0.0
        if self.name == 'stop_and_go':
            if t < self.brake_at:
                return 0.0
            if self.stopped_at is None:
                if speed > 1e-9:
                    return -self.brake
                self.stopped_at = t
            if t < self.stopped_at + self.wait:
                return 0.0
            return self.rate if speed < self.speed_limit else 0.0
        return 0.0


def lateral_offset(t, start, duration, offset):
    """
    A smoothstep from 0 to ``offset`` between ``start`` and ``start +
    duration``::

        >>> [lateral_offset(t, 1, 2, 3.5) for t in (0, 2, 5)]
        [0.0, 1.75, 3.5]
    """
    u = min(max((t - start) / duration, 0.0), 1.0)
    return offset * u * u * (3 - 2 * u)


def simulate_vehicle(
        network, rng, allow_lane_change=False, horizon=T_S, dt=DT):
    """
    Drives one vehicle with a kinematic bicycle and pure pursuit. Returns the
    trajectory and the name of the speed profile, or ``None`` when the
    random start has no route.
    """
    lanes = list(network.lanes.values())
    lengths = np.array([lane.length for lane in lanes])
    lane = lanes[int(rng.choice(len(lanes), p=lengths / lengths.sum()))]
    offset = float(rng.uniform(0, 0.6 * lane.length))
    x, y = lane.polyline.point_at(offset)
    heading = lane.polyline.heading_at(offset)
    profile = SpeedProfile(
        PROFILES[int(rng.integers(len(PROFILES)))], rng, lane.speed_limit)
    speed = float(rng.uniform(0.2, 1.0)) * lane.speed_limit
    initial = VehicleState(x, y, heading, speed)

    try:
        routes = enumerate_routes(network, initial)
    except OffRoadError:
        return None
    if not routes:
        return None
    path = routes[int(rng.integers(len(routes)))].polyline
    curvatures = path.curvatures()

    shift = None
    if allow_lane_change and rng.uniform() < LANE_CHANGE_PROBABILITY:
        shift = (
            float(rng.uniform(1.0, 5.0)), float(rng.uniform(3.0, 5.0)),
            float(rng.choice([-1.0, 1.0])) * lane.width)

    positions = [(x, y)]
    for k in range(horizon):
        t = k * dt
        along = path.project((x, y))
        accel = profile.accel(t, speed)

        window = (path.cumulative >= along) & \
            (path.cumulative <= along + max(10.0, 2 * speed))
        curvature = float(np.max(curvatures[window], initial=0.0))
        remaining = max(path.length - END_MARGIN - along, 0.0)
        cap = min(
            math.sqrt(CURVE_LATERAL_ACCEL / max(curvature, 1e-6)),
            math.sqrt(2 * MAX_BRAKE * remaining))
        if speed > cap:
            accel = min(accel, max(-MAX_BRAKE, (cap - speed) / dt))
        speed_next = min(max(speed + accel * dt, 0.0), lane.speed_limit)

        lookahead = max(MIN_LOOKAHEAD, LOOKAHEAD_TIME * speed_next)
        target = path.point_at(along + lookahead)
        if shift is not None:
            normal = path.heading_at(along + lookahead) + math.pi / 2
            d = lateral_offset(t + dt + LOOKAHEAD_TIME, *shift)
            target = target + d * np.array([math.cos(normal),
                                            math.sin(normal)])
        alpha = normalize_angle(
            math.atan2(target[1] - y, target[0] - x) - heading)
        steer = math.atan2(2 * WHEELBASE * math.sin(alpha), lookahead)
        steer = min(max(steer, -MAX_STEER), MAX_STEER)

        distance = speed_next * dt
        new_heading = heading + distance / WHEELBASE * math.tan(steer)
        middle = (heading + new_heading) / 2
        x += distance * math.cos(middle)
        y += distance * math.sin(middle)
        heading, speed = new_heading, speed_next
        positions.append((x, y))

    return derive_states(np.array(positions), initial, dt), profile.name


def generate_synthetic_dataset(
        n, seed=0, templates=None, raster_size=RASTER_SIZE,
        resolution=RESOLUTION, limits=None):
    """
    Generates ``n`` legal trajectories on the ``templates``, pairs of a map
    kind and its parameters. The same seed gives the same dataset.
    """
    if n < 1:
        raise ValidationError(
            'a dataset needs at least one sample', field_path='n')
    rng = np.random.default_rng(seed)
    maps = [
        (kind, generate_template_map(kind, params))
        for kind, params in (templates or DEFAULT_TEMPLATES)]

    trajectories, rasters, kinds, profiles = [], [], [], []
    attempts = rejected = 0
    while len(trajectories) < n:
        attempts += 1
        if attempts > ATTEMPTS_PER_SAMPLE * n:
            raise ValidationError(
                'only {0} of {1} samples were legal after {2} attempts'
                .format(len(trajectories), n, attempts - 1),
                field_path='dataset')
        kind, network = maps[int(rng.integers(len(maps)))]
        simulated = simulate_vehicle(
            network, rng, kind in LANE_CHANGE_KINDS)
        if simulated is None:
            continue
        trajectory, profile = simulated
        report = check_legality(
            network, trajectory, [],
            SAMPLE_VEHICLE._replace(initial_state=trajectory[0]), limits)
        if not report.passed:
            rejected += 1
            continue
        raster = rasterize_map(
            network, trajectory[0], raster_size, resolution)
        trajectories.append(trajectory.array)
        rasters.append(np.round(raster * 2).astype(np.uint8))
        kinds.append(kind)
        profiles.append(profile)

    logger.info(
        'generated %d trajectories, %d rejected by the legality checker',
        n, rejected)
    return SyntheticDataset(trajectories, rasters, kinds, profiles)
