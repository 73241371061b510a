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
from cruzamento.errors import ValidationError
from cruzamento.planner import model
from cruzamento.planner.model import (
    AffineFusion, PlannerModel, build_model, timestep_embedding)


def inputs(batch=2, horizon=4, size=32, dtype=torch.float64):
    generator = torch.Generator().manual_seed(0)
    return (
        torch.randn(batch, horizon, 2, generator=generator, dtype=dtype),
        torch.tensor([1, 3][:batch]),
        torch.randn(batch, 1, generator=generator, dtype=dtype),
        torch.randn(batch, 4, generator=generator, dtype=dtype),
        torch.rand(batch, 1, size, size, generator=generator, dtype=dtype))


class TestPlannerModel(unittest.TestCase):

    def test_gradients(self):
        """
        Gradients with respect to the noised offsets agree with finite
        differences.
        """
        torch.manual_seed(0)
        network = PlannerModel(
            dim=4, layers=1, heads=2, horizon=4, raster_size=32).double()
        x, t, start, goal, raster = inputs()
        x.requires_grad_(True)

        self.assertTrue(torch.autograd.gradcheck(
            lambda x: network(x, t, start, goal, raster), (x,)))

    def test_conditions_matter(self):
        """
        The prediction depends on the goal and on the map.
        """
        torch.manual_seed(0)
        network = PlannerModel(
            dim=8, layers=1, heads=2, horizon=4, raster_size=32).double()
        # A fresh fusion is the identity; perturb it so the map is read.
        for parameter in network.layers[0].fusion.parameters():
            parameter.data += 0.1
        x, t, start, goal, raster = inputs()

        output = network(x, t, start, goal, raster)

        self.assertFalse(torch.allclose(
            output, network(x, t, start, goal + 1, raster)))
        self.assertFalse(torch.allclose(
            output, network(x, t, start, goal, torch.zeros_like(raster))))

    def test_without_map(self):
        """
        A model without the map needs no raster.
        """
        network = PlannerModel(
            dim=8, layers=2, heads=2, horizon=4, use_map=False).double()
        x, t, start, goal, _ = inputs()

        self.assertEqual((2, 4, 2), network(x, t, start, goal).shape)
        self.assertIsNone(network.map_encoder)

    def test_missing_raster(self):
        """
        A model reading the map refuses to work without it.
        """
        network = PlannerModel(
            dim=8, layers=1, heads=2, horizon=4, raster_size=32).double()
        x, t, start, goal, _ = inputs()

        with self.assertRaises(ValidationError):
            network(x, t, start, goal)

    def test_horizon(self):
        """
        Offsets must cover the horizon of the model.
        """
        network = PlannerModel(
            dim=8, layers=1, heads=2, horizon=5, raster_size=32).double()

        with self.assertRaises(ValidationError):
            network(*inputs(horizon=4))

    def test_build_model(self):
        """
        Models are built from the ``[planner]`` section.
        """
        settings = Configuration({'planner': {
            'dim': 8, 'layers': 2, 'heads': 2, 'raster_size': 32}}).get(
                'planner')

        network = build_model(settings, horizon=6)

        self.assertEqual(2, len(network.layers))
        self.assertEqual(
            {'dim': 8, 'layers': 2, 'heads': 2, 'horizon': 6,
             'raster_size': 32, 'use_map': True},
            network.settings)


class TestFusion(unittest.TestCase):

    def test_fresh_fusion_is_identity(self):
        """
        A new fusion layer leaves activations alone.
        """
        fusion = AffineFusion(6, 4)
        x = torch.randn(3, 5, 4)

        self.assertTrue(torch.allclose(x, fusion(x, torch.randn(3, 6))))

    def test_odd_embedding(self):
        """
        Step embeddings may have an odd size.
        """
        embedding = timestep_embedding(torch.tensor([0, 7, 99]), 5)

        self.assertEqual((3, 5), tuple(embedding.shape))
        self.assertEqual(0.0, float(embedding[:, -1].abs().max()))


load_tests = inelegant.finder.TestFinder(
    __name__,
    model
).load_tests

if __name__ == "__main__":
    unittest.main()
