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

import inelegant.finder
import numpy as np

from cruzamento.config import Configuration
from cruzamento.cornercase import idm
from cruzamento.cornercase.idm import (
    IdmPolicy, PathFollower, TrafficView, ballistic_step,
    braking_trajectory, extend_path, idm_trajectory, match_route,
    run_policy, straight_path)
from cruzamento.errors import ParameterError
from cruzamento.roadnet.geometry import Polyline
from cruzamento.rollout.legality import check_legality, first_collision
from cruzamento.scenario import DT, T_S, VehicleState

from cruzamento_tests.reference import (
    constant_speed, crossroad, scenario_of, straight_road, vehicle)


def integrate(policy, speed, desired, seconds=10.0, dt=0.01):
    """
    Free-road speed and distance integrated with small Euler steps.
    """
    distance = 0.0
    for _ in range(int(round(seconds / dt))):
        accel = policy.acceleration(speed, desired_speed=desired)
        distance += speed * dt
        speed += accel * dt
    return distance, speed


class TestIdmPolicy(unittest.TestCase):

    def test_free_road(self):
        """
        On a free road the acceleration only depends on the speed.
        """
        policy = IdmPolicy(desired_speed=15.0)

        self.assertAlmostEqual(2 * (1 - 0.5 ** 4), policy.acceleration(7.5))

    def test_leader(self):
        """
        A leader makes the vehicle brake when the gap is short.
        """
        policy = IdmPolicy(desired_speed=15.0)

        self.assertAlmostEqual(
            2 * (1 - (10 / 15) ** 4 - (17 / 20) ** 2),
            policy.acceleration(10.0, gap=20.0))
        self.assertLess(policy.acceleration(10.0, gap=5.0, approach=5.0), -2)

    def test_zero_gap(self):
        """
        A zero gap gives a strong but finite braking.
        """
        accel = IdmPolicy(desired_speed=15.0).acceleration(1.0, gap=0.0)

        self.assertTrue(math.isfinite(accel))
        self.assertLess(accel, -1000)

    def test_bad_parameters(self):
        """
        Parameters have to be positive.
        """
        with self.assertRaises(ParameterError):
            IdmPolicy(time_headway=0)
        with self.assertRaises(ParameterError):
            IdmPolicy(desired_speed=-1)

    def test_no_desired_speed(self):
        """
        Without a desired speed there is nothing to drive towards.
        """
        with self.assertRaises(ParameterError):
            IdmPolicy().acceleration(5.0)

    def test_from_config(self):
        """
        Policies read the ``[idm]`` section.
        """
        configuration = Configuration({'idm': {'time_headway': 1.0}})

        policy = IdmPolicy.from_config(configuration, desired_speed=12)

        self.assertEqual(1.0, policy.time_headway)
        self.assertEqual(12.0, policy.desired_speed)


class TestBallisticStep(unittest.TestCase):

    def test_no_reverse(self):
        """
        Strong braking never gives a negative speed.
        """
        distance, speed = ballistic_step(2.0, -100.0, 0.1)

        self.assertEqual(0.0, speed)
        self.assertAlmostEqual(0.02, distance)

    def test_standing(self):
        """
        A stopped vehicle stays stopped.
        """
        self.assertEqual((0.0, 0.0), ballistic_step(0.0, -3.0))


class TestPathFollower(unittest.TestCase):

    def test_matches_fine_integration(self):
        """
        Steps of 0.1 s stay close to a fine integration of the model.
        """
        policy = IdmPolicy()
        follower = PathFollower(
            straight_path(VehicleState(0, 0, 0, 0), 500), policy, 15.0)

        arcs, speeds = follower.run(3.0, T_S)
        distance, speed = integrate(policy, 3.0, 15.0, T_S * DT)

        self.assertAlmostEqual(speed, speeds[-1], delta=0.1)
        self.assertAlmostEqual(distance, arcs[-1], delta=1.0)
        self.assertTrue(np.all(np.diff(speeds) >= 0))

    def test_keeps_distance(self):
        """
        A vehicle approaching a stopped one stops behind it.
        """
        path = straight_path(VehicleState(0, 0, 0, 0), 500)
        stopped = (vehicle(2, 60, 0, speed=0),
                   constant_speed(VehicleState(60, 0, 0, 0)))
        follower = PathFollower(
            path, IdmPolicy(), 14.0, TrafficView(path, [stopped]))

        arcs, speeds = follower.run(14.0, T_S)

        self.assertLess(arcs[-1], 60 - 4.5)
        self.assertLess(speeds[-1], 2.0)

    def test_stop_at_end(self):
        """
        A vehicle asked to stop at the end of its path does.
        """
        path = straight_path(VehicleState(0, 0, 0, 0), 60)
        follower = PathFollower(path, IdmPolicy(), 10.0, stop_at_end=True)

        arcs, speeds = follower.run(10.0, T_S)

        self.assertLessEqual(arcs[-1], 60 - 2.25)
        self.assertLess(speeds[-1], 2.0)

    def test_curves(self):
        """
        A lateral limit slows the vehicle before sharp curves.
        """
        path = straight_path(VehicleState(0, 0, 0, 0), 30)
        path = type(path)(np.concatenate([
            path.points,
            [(30 + 10 * math.sin(a), 10 - 10 * math.cos(a))
             for a in np.linspace(0.1, math.pi / 2, 20)]]))
        follower = PathFollower(path, IdmPolicy(), 14.0, lateral_limit=3.0)

        arcs, speeds = follower.run(14.0, T_S)

        in_curve = speeds[(arcs > 32) & (arcs < 40)]
        self.assertTrue(len(in_curve))
        self.assertTrue(np.all(in_curve <= math.sqrt(30.0) + 0.5))

    def test_stop_when(self):
        """
        ``stop_when`` freezes the vehicle for the remaining steps.
        """
        follower = PathFollower(
            straight_path(VehicleState(0, 0, 0, 0), 500), IdmPolicy(), 10.0)

        arcs, speeds = follower.run(
            10.0, 20, stop_when=lambda step, arc: step == 5)

        self.assertEqual(21, len(arcs))
        self.assertTrue(np.all(arcs[5:] == arcs[5]))
        self.assertTrue(np.all(speeds[6:] == 0))


class TestTrafficView(unittest.TestCase):

    def test_leader(self):
        """
        Only vehicles ahead and on the path lead.
        """
        path = straight_path(VehicleState(0, 0, 0, 0), 500)
        others = [
            (vehicle(2, 40, 0, speed=5),
             constant_speed(VehicleState(40, 0, 0, 5))),
            (vehicle(3, 20, 3.5, speed=5),
             constant_speed(VehicleState(20, 3.5, 0, 5))),
            (vehicle(4, 5, 0, speed=5),
             constant_speed(VehicleState(5, 0, 0, 5)))]

        leader = TrafficView(path, others).leader(0, 10.0, 4.5)

        gap, speed = leader
        self.assertAlmostEqual(40 - 10 - 4.5, gap)
        self.assertEqual(5.0, speed)
        self.assertIsNone(TrafficView(path, others).leader(0, 100.0, 4.5))


class TestTrajectories(unittest.TestCase):

    def test_idm_trajectory(self):
        """
        Fallback trajectories follow the lane under the speed limit.
        """
        trajectory = idm_trajectory(
            straight_road(), vehicle(1, 20, 0, speed=10), ('east',))

        self.assertEqual(T_S + 1, len(trajectory))
        self.assertTrue(np.allclose(trajectory.positions[:, 1], 0))
        self.assertLessEqual(trajectory.speeds.max(), 14.0 + 1e-6)
        self.assertGreater(trajectory.positions[-1][0], 100)

    def test_idm_trajectory_stops_before_end(self):
        """
        Fallback trajectories end before their lanes do.
        """
        trajectory = idm_trajectory(
            straight_road(), vehicle(1, 200, 0, speed=14), ('east',))

        self.assertLess(trajectory.positions[-1][0], 300)

    def test_braking(self):
        """
        Braking at 7.5 m/s² from 15 m/s stops after 15 meters.
        """
        trajectory = braking_trajectory(
            straight_road(), vehicle(1, 20, 0, speed=15), ('east',))

        np.testing.assert_allclose((35, 0), trajectory.positions[-1])
        self.assertAlmostEqual(0.0, trajectory.speeds[-1])

    def test_braking_off_road(self):
        """
        Without lanes the vehicle brakes straight ahead.
        """
        trajectory = braking_trajectory(
            None, vehicle(1, 0, 50, heading=math.pi / 2, speed=7.5))

        np.testing.assert_allclose(
            (0, 53.75), trajectory.positions[-1], atol=1e-9)

    def test_braking_harder_before_dead_end(self):
        """
        A vehicle too fast for its room brakes harder and stops at the end
        of its lane.
        """
        moving = vehicle(1, 287, 0, speed=14)
        trajectory = braking_trajectory(
            straight_road(), moving, ('east',), decel_limit=7.6)

        np.testing.assert_allclose((300, 0), trajectory.positions[-1])
        self.assertAlmostEqual(0.0, trajectory.speeds[-1])
        self.assertTrue(
            check_legality(straight_road(), trajectory, [], moving).passed)

    def test_braking_past_dead_end(self):
        """
        When even the hardest braking is not enough, the vehicle stops a
        little past the end of its lane, still legally.
        """
        moving = vehicle(1, 285.1, 0, speed=15.4)
        trajectory = braking_trajectory(
            straight_road(), moving, ('east',), decel_limit=7.6)
        report = check_legality(straight_road(), trajectory, [], moving)

        self.assertAlmostEqual(0.0, trajectory.speeds[-1])
        self.assertGreater(trajectory.positions[-1][0], 300)
        self.assertTrue(report.passed, report.failures())

    def test_extend_path(self):
        """
        Extended paths go on in the direction of their last segment.
        """
        path = extend_path(Polyline([(0, 0), (0, 10)]), 5)

        np.testing.assert_allclose((0, 15), path.points[-1], atol=1e-9)


class TestMatchRoute(unittest.TestCase):

    def test_match(self):
        """
        The route driven is the one found.
        """
        trajectory = constant_speed(VehicleState(10, 0, 0, 10))

        self.assertEqual(
            ('east_in', 'east_out'), match_route(crossroad(), trajectory))

    def test_off_road(self):
        """
        Trajectories starting off the lanes follow no route.
        """
        trajectory = constant_speed(VehicleState(10, 50, 0, 10))

        self.assertIsNone(match_route(crossroad(), trajectory))


class TestRunPolicy(unittest.TestCase):

    def test_free_road(self):
        """
        A lone target accelerates towards the speed limit.
        """
        scenario = scenario_of([vehicle(1, 20, 0, is_target=True)],
                               network=straight_road())

        evaluated = run_policy(scenario)

        speeds = evaluated.trajectories[1].speeds
        self.assertGreater(speeds[-1], 10.0)
        self.assertLessEqual(speeds.max(), 14.0)
        self.assertEqual('idm', evaluated.metadata['policy'])

    def test_stops_at_collision(self):
        """
        At its first collision the target stops where it is.
        """
        target = vehicle(1, 20, 0, is_target=True)
        wrong_way = vehicle(2, 150, 0, heading=math.pi)
        scenario = scenario_of([target, wrong_way], network=straight_road())

        evaluated = run_policy(scenario)

        trajectory = evaluated.trajectories[1]
        step = first_collision(
            trajectory, target, evaluated.trajectories[2], wrong_way)
        self.assertIsNotNone(step)
        np.testing.assert_allclose(
            np.tile(trajectory.positions[step], (T_S + 1 - step, 1)),
            trajectory.positions[step:])
        self.assertEqual(
            scenario.trajectories[2], evaluated.trajectories[2])

    def test_keeps_scenario(self):
        """
        Everything but the target trajectory is kept.
        """
        scenario = scenario_of(
            [vehicle(1, 20, 0, is_target=True), vehicle(2, 100, 3.5)],
            network=straight_road(), seed=9, metadata={'id': 'x'})

        evaluated = run_policy(scenario)

        self.assertEqual(9, evaluated.seed)
        self.assertEqual('x', evaluated.metadata['id'])
        self.assertEqual(scenario.vehicles, evaluated.vehicles)


load_tests = inelegant.finder.TestFinder(
    __name__,
    idm
).load_tests

if __name__ == "__main__":
    unittest.main()
