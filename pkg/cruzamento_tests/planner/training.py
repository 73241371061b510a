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
import torch

from cruzamento.config import Configuration
from cruzamento.errors import TrainingDiverged
from cruzamento.metrics import ade
from cruzamento.planner import training
from cruzamento.planner.dataset import generate_synthetic_dataset
from cruzamento.planner.encoding import TrajectoryEncoder
from cruzamento.planner.model import PlannerModel
from cruzamento.planner.sampling import DiffusionPlanner, sample_trajectory
from cruzamento.planner.schedule import NoiseSchedule
from cruzamento.planner.training import (
    Trainer, TrajectoryBatch, diffusion_loss, train_planner)

from cruzamento_tests.reference import (
    DESK_SCALE, SLOW_TESTS, tiny_configuration, tiny_dataset)


def tiny_model(seed=0):
    torch.manual_seed(seed)
    return PlannerModel(
        dim=8, layers=1, heads=2, horizon=100, raster_size=32)


def batch():
    return tiny_dataset().to_batch(TrajectoryEncoder())


class TestTrajectoryBatch(unittest.TestCase):

    def test_select(self):
        """
        Selecting keeps the chosen items of every tensor.
        """
        data = batch()

        selected = data.select(torch.tensor([3, 1]))

        self.assertEqual(2, selected.size)
        self.assertTrue(torch.equal(data.goal[3], selected.goal[0]))
        self.assertEqual((2, 1, 32, 32), tuple(selected.raster.shape))

    def test_select_without_map(self):
        """
        Batches without rasters stay without rasters.
        """
        batch = tiny_dataset().to_batch(TrajectoryEncoder(), use_map=False)

        self.assertIsNone(batch.select(torch.tensor([0])).raster)


class TestDiffusionLoss(unittest.TestCase):

    def test_gradients_of_every_parameter(self):
        """
        The loss gradient of every parameter tensor agrees with central
        finite differences in double precision.
        """
        torch.manual_seed(0)
        network = PlannerModel(
            dim=8, layers=1, heads=2, horizon=10, raster_size=32).double()
        # A fresh fusion is the identity and hides the map from the loss.
        for parameter in network.layers[0].fusion.parameters():
            parameter.data += 0.1
        schedule = NoiseSchedule(steps=5)
        generator = torch.Generator().manual_seed(1)
        data = TrajectoryBatch(
            torch.randn(2, 10, 2, generator=generator, dtype=torch.float64),
            torch.randn(2, 1, generator=generator, dtype=torch.float64),
            torch.randn(2, 4, generator=generator, dtype=torch.float64),
            torch.rand(
                2, 1, 32, 32, generator=generator, dtype=torch.float64))

        def loss():
            return diffusion_loss(
                network, schedule, data, torch.Generator().manual_seed(2))

        network.zero_grad()
        loss().backward()
        step = 1e-6
        for name, parameter in network.named_parameters():
            flat = parameter.data.view(-1)
            picked = torch.randperm(flat.numel(), generator=generator)[:3]
            analytic = parameter.grad.view(-1)[picked]
            numeric = torch.zeros_like(analytic)
            for k, index in enumerate(picked):
                original = float(flat[index])
                flat[index] = original + step
                above = float(loss())
                flat[index] = original - step
                below = float(loss())
                flat[index] = original
                numeric[k] = (above - below) / (2 * step)
            error = float(torch.linalg.norm(analytic - numeric)) / max(
                float(torch.linalg.norm(analytic)),
                float(torch.linalg.norm(numeric)), 1e-8)
            self.assertLess(error, 1e-4, name)

    def test_loss_decreases(self):
        """
        Five epochs of training lower the loss.
        """
        trainer = Trainer(
            tiny_model(), NoiseSchedule(steps=5), learning_rate=3e-3,
            batch_size=4, epochs=5)

        losses = trainer.fit(
            tiny_dataset(count=32).to_batch(TrajectoryEncoder()))

        self.assertEqual(5, len(losses))
        self.assertLess(losses[-1], losses[0])


class TestTrainer(unittest.TestCase):

    def test_loss_per_epoch(self):
        """
        ``fit()`` returns one finite loss per epoch and calls back after each
        one.
        """
        calls = []
        trainer = Trainer(
            tiny_model(), NoiseSchedule(steps=5), batch_size=3, epochs=3)

        losses = trainer.fit(batch(), lambda *args: calls.append(args))

        self.assertEqual(3, len(losses))
        self.assertTrue(all(math.isfinite(loss) for loss in losses))
        self.assertEqual([(i, losses[i]) for i in range(3)], calls)
        self.assertFalse(trainer.model.training)

    def test_reproducible(self):
        """
        The same seed and initialization train the same way.
        """
        def train():
            trainer = Trainer(
                tiny_model(), NoiseSchedule(steps=5), batch_size=2,
                epochs=2, seed=4)
            return trainer.fit(batch())

        self.assertEqual(train(), train())

    def test_diverged(self):
        """
        A non-finite loss stops the training with diagnostics.
        """
        data = batch()
        data = data._replace(offsets=data.offsets * float('nan'))
        trainer = Trainer(
            tiny_model(), NoiseSchedule(steps=5), batch_size=4, epochs=2)

        with self.assertRaises(TrainingDiverged) as context:
            trainer.fit(data)

        diagnostics = context.exception.diagnostics
        self.assertEqual(1, diagnostics['epoch'])
        self.assertEqual(0, diagnostics['batch'])
        self.assertFalse(diagnostics['offsets_finite'])
        self.assertEqual(4, diagnostics['batch_size'])
        self.assertEqual(2, context.exception.exit_code)

    def test_from_config(self):
        """
        Trainers read the ``[training]`` section.
        """
        configuration = tiny_configuration()

        trainer = Trainer.from_config(
            tiny_model(), NoiseSchedule(steps=5), configuration)

        self.assertEqual(2, trainer.epochs)
        self.assertEqual(2, trainer.batch_size)


class TestTrainPlanner(unittest.TestCase):

    def test_train_planner(self):
        """
        ``train_planner()`` returns a planner ready to sample and the losses.
        """
        planner, losses = train_planner(tiny_dataset(), tiny_configuration())

        self.assertIsInstance(planner, DiffusionPlanner)
        self.assertEqual(2, len(losses))
        self.assertEqual(5, planner.schedule.steps)
        self.assertEqual(32, planner.raster_size)
        self.assertGreater(planner.encoder.sigma, 1.0)


class TestDeskScale(unittest.TestCase):

    @unittest.skipUnless(SLOW_TESTS, 'set CRUZAMENTO_SLOW_TESTS=1 to run')
    def test_held_out(self):
        """
        A planner trained with the default settings on a thousand synthetic
        drives follows held-out drives closely and reaches their goals.
        """
        data, held_out = generate_synthetic_dataset(
            DESK_SCALE['training_size'] + DESK_SCALE['held_out'],
            seed=1).split(DESK_SCALE['held_out'])
        planner, _ = train_planner(data, Configuration())

        close = reached = 0
        for index in range(len(held_out)):
            state = held_out.initial_state(index)
            goal = held_out.goal(index)
            raster = held_out.raster(index) if planner.model.use_map else None
            drawn = [
                sample_trajectory(
                    planner.model, planner.schedule, planner.encoder, state,
                    (goal.x, goal.y), goal.heading, raster, seed)
                for seed in range(DESK_SCALE['samples'])]

            errors = [ade(held_out.trajectory(index), t) for t in drawn]
            close += min(errors) <= DESK_SCALE['min_sade']
            reached += sum(
                math.hypot(t[-1].x - goal.x, t[-1].y - goal.y) <=
                DESK_SCALE['goal_error'] for t in drawn)

        self.assertGreaterEqual(
            close, DESK_SCALE['share'] * len(held_out))
        self.assertGreaterEqual(
            reached,
            DESK_SCALE['share'] * len(held_out) * DESK_SCALE['samples'])


load_tests = inelegant.finder.TestFinder(
    __name__,
    training
).load_tests

if __name__ == "__main__":
    unittest.main()
