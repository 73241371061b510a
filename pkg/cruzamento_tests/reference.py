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

import numpy as np
import torch

from cruzamento.config import Configuration, Environment
from cruzamento.planner.dataset import SyntheticDataset
from cruzamento.planner.encoding import TrajectoryEncoder
from cruzamento.planner.model import PlannerModel
from cruzamento.planner.sampling import DiffusionPlanner
from cruzamento.planner.schedule import NoiseSchedule
from cruzamento.roadnet.network import Connection, Lane, RoadNetwork
from cruzamento.rollout.candidates import GoalCandidate
from cruzamento.scenario import (
    DT, T_S, Scenario, Trajectory, VehicleAttributes, VehicleState)

SLOW_TESTS = Environment().slow_tests

TINY = {
    'planner': {
        'dim': 8, 'layers': 1, 'heads': 2, 'diffusion_steps': 5,
        'raster_size': 32, 'raster_resolution': 6.25,
    },
    'training': {'epochs': 2, 'batch_size': 2, 'dataset_size': 4},
}

# held-out targets of a planner trained with the default settings: the best
# of ``samples`` draws within ``min_sade`` meters of the recorded drive and
# draws ending within ``goal_error`` meters of the goal, each on at least
# ``share`` of the cases
DESK_SCALE = {
    'training_size': 1000, 'held_out': 50, 'samples': 10, 'min_sade': 1.0,
    'goal_error': 5.0, 'share': 0.9,
}


def tiny_configuration():
    """
    A configuration whose planner trains and samples in a blink.
    """
    return Configuration(TINY)


def tiny_planner(use_map=True, seed=0):
    torch.manual_seed(seed)
    model = PlannerModel(
        dim=8, layers=1, heads=2, raster_size=32, use_map=use_map)
    return DiffusionPlanner(
        model, NoiseSchedule(steps=5), TrajectoryEncoder(), 32, 6.25)


def tiny_dataset(count=4, raster_size=32):
    """
    Vehicles driving east at different speeds on empty rasters.
    """
    trajectories = [
        constant_speed(VehicleState(0, i, 0, 5 + i)).array
        for i in range(count)]
    return SyntheticDataset(
        trajectories, np.zeros((count, raster_size, raster_size), np.uint8),
        ['highway'] * count, ['constant'] * count)


def straight_road(length=300.0, width=3.5, speed_limit=14.0):
    """
    Two opposite lanes along the x axis: ``east`` on y = 0 and ``west`` on
    y = ``width``.
    """
    return RoadNetwork([
        Lane('east', [(0, 0), (length, 0)], width, speed_limit),
        Lane('west', [(length, width), (0, width)], width, speed_limit)])


def crossroad(length=100.0, width=3.5, speed_limit=14.0):
    """
    An eastbound lane and a northbound lane crossing at ``(length, 0)``,
    each continued by a second lane.
    """
    return RoadNetwork(
        lanes=[
            Lane('east_in', [(0, 0), (length - 10, 0)], width, speed_limit),
            Lane('east_out', [(length - 10, 0), (2 * length, 0)], width,
                 speed_limit),
            Lane('north_in', [(length, -length), (length, -10)], width,
                 speed_limit),
            Lane('north_out', [(length, -10), (length, length)], width,
                 speed_limit)],
        connections=[
            Connection('east_in', 'east_out'),
            Connection('north_in', 'north_out')])


def vehicle(vehicle_id, x, y, heading=0.0, speed=10.0, is_target=False,
            kind='car', length=4.5, width=1.8):
    return VehicleAttributes(
        vehicle_id, kind, length, width, 1.5,
        VehicleState(x, y, heading, speed), is_target)


def constant_speed(state, steps=T_S, dt=DT):
    """
    The trajectory of a vehicle keeping its heading and speed.
    """
    times = np.arange(steps + 1) * dt
    positions = np.column_stack([
        state.x + state.speed * times * math.cos(state.heading),
        state.y + state.speed * times * math.sin(state.heading)])
    return Trajectory.from_arrays(
        positions, np.full(steps + 1, state.heading),
        np.full(steps + 1, state.speed), dt)


def scenario_of(vehicles, trajectories=None, network=None, **kwargs):
    """
    A scenario where vehicles without a given trajectory keep their speed.
    """
    trajectories = dict(trajectories or {})
    for v in vehicles:
        if v.id not in trajectories:
            trajectories[v.id] = constant_speed(v.initial_state)
    return Scenario(network, vehicles, trajectories, **kwargs)


def straight_goal(state, distance, number=1, route=('east',)):
    return GoalCandidate(
        number,
        (state.x + distance * math.cos(state.heading),
         state.y + distance * math.sin(state.heading)),
        state.heading, route, distance)


class PlannerReference(unittest.TestCase):
    """
    Behaviors every planner is supposed to have. Test cases for planners
    extend this class and implement ``get_planner()``, which returns the
    planner under test.
    """

    def get_planner(self):
        raise NotImplementedError()

    def test_plan_has_horizon_states(self):
        """
        A plan should have ``T_S + 1`` states, the first one being the
        initial state of the vehicle.
        """
        network = straight_road()
        state = VehicleState(20, 0, 0, 10)
        trajectory = self.get_planner().plan(
            network, state, straight_goal(state, 100), 3)

        self.assertEqual(T_S + 1, len(trajectory))
        self.assertEqual(state, trajectory[0])

    def test_plan_is_reproducible(self):
        """
        The same noise seed should always give the same plan.
        """
        network = straight_road()
        state = VehicleState(20, 0, 0, 10)
        goal = straight_goal(state, 100)
        planner = self.get_planner()

        self.assertEqual(
            planner.plan(network, state, goal, 7),
            planner.plan(network, state, goal, 7))

    def test_plan_is_finite(self):
        """
        Every state of a plan should be finite and no speed negative.
        """
        network = straight_road()
        state = VehicleState(20, 0, 0, 0)
        trajectory = self.get_planner().plan(
            network, state, straight_goal(state, 30), 11)

        self.assertTrue(np.all(np.isfinite(trajectory.array)))
        self.assertTrue(np.all(trajectory.speeds >= 0))

    def test_planner_has_name(self):
        """
        Planners should be named, so the name can go to the metadata.
        """
        self.assertIsInstance(self.get_planner().name, str)
