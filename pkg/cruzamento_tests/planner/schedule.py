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
import unittest

import inelegant.finder
import torch

from cruzamento.config import Configuration
from cruzamento.errors import ParameterError
from cruzamento.planner import schedule
from cruzamento.planner.schedule import NoiseSchedule


class TestNoiseSchedule(unittest.TestCase):

    def test_monotonic(self):
        """
        Each step keeps less of the data than the one before.
        """
        alpha_bars = NoiseSchedule().alpha_bars

        self.assertTrue(bool(torch.all(alpha_bars[1:] < alpha_bars[:-1])))
        self.assertEqual(0.0, float(NoiseSchedule().betas[0]))

    def test_per_item_steps(self):
        """
        Every batch item may be noised to its own step.
        """
        generator = torch.Generator().manual_seed(0)
        x0 = torch.ones(2, 4, 2, dtype=torch.float64)
        noise = torch.randn(2, 4, 2, generator=generator, dtype=torch.float64)

        noised = NoiseSchedule().forward_noise(
            x0, torch.tensor([0, 100]), noise)

        self.assertTrue(torch.equal(x0[0], noised[0]))
        self.assertTrue(torch.allclose(noise[1], noised[1], atol=0.05))

    def test_reverse_first_step(self):
        """
        Knowing the noise exactly, the reverse step from step 1 gives the
        clean data back.
        """
        schedule = NoiseSchedule()
        generator = torch.Generator().manual_seed(1)
        x0 = torch.randn(1, 5, 2, generator=generator, dtype=torch.float64)
        noise = torch.randn(1, 5, 2, generator=generator, dtype=torch.float64)

        noised = schedule.forward_noise(x0, 1, noise)

        self.assertTrue(torch.allclose(
            x0, schedule.reverse_mean(noised, 1, noise)))

    def test_posterior_variance(self):
        """
        The last reverse step adds no noise; the others add less than the
        forward step did.
        """
        schedule = NoiseSchedule()

        self.assertEqual(0.0, schedule.posterior_variance(1))
        for t in range(2, schedule.steps + 1):
            variance = schedule.posterior_variance(t)
            self.assertGreater(variance, 0.0)
            self.assertLessEqual(variance, float(schedule.betas[t]))

    def test_bad_parameters(self):
        """
        Schedules need steps and increasing betas below one.
        """
        with self.assertRaises(ParameterError):
            NoiseSchedule(steps=0)
        with self.assertRaises(ParameterError):
            NoiseSchedule(beta_start=0.3, beta_end=0.2)
        with self.assertRaises(ParameterError):
            NoiseSchedule(beta_end=1.0)

    def test_shapes_must_agree(self):
        """
        Noise must have the shape of the data.
        """
        with self.assertRaises(ValueError):
            NoiseSchedule().forward_noise(
                torch.zeros(1, 3, 2), 5, torch.zeros(1, 4, 2))

    def test_from_config(self):
        """
        Schedules are built from the ``[planner]`` section.
        """
        configuration = Configuration().override(
            {'planner.diffusion_steps': '10'})

        schedule = NoiseSchedule.from_config(configuration)

        self.assertEqual(10, schedule.steps)
        self.assertEqual(11, len(schedule.alpha_bars))
        self.assertEqual(
            {'steps': 10, 'beta_start': 1e-3, 'beta_end': 0.2},
            schedule.to_dict())


load_tests = inelegant.finder.TestFinder(
    __name__,
    schedule
).load_tests

if __name__ == "__main__":
    unittest.main()
