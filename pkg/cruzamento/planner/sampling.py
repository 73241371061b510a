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
Reverse diffusion: trajectories drawn from a trained noise predictor.
"""
import logging

import torch

from cruzamento.planner.encoding import condition_features
from cruzamento.raster import RASTER_SIZE, RESOLUTION, rasterize_map

logger = logging.getLogger(__name__)

SEED_MODULUS = 2 ** 63


def seeded_generator(seed):
    return torch.Generator().manual_seed(int(seed) % SEED_MODULUS)


def sample_offsets(model, schedule, start, goal, raster, generator):
    """
    Ancestral sampling from pure noise down to step 0. ``start``, ``goal``
    and ``raster`` hold one item each; the result has shape
    ``(1, horizon, 2)``.
    """
    dtype = next(model.parameters()).dtype
    x = torch.randn(
        (1, model.horizon, 2), generator=generator, dtype=dtype)
    model.eval()
    with torch.no_grad():
        for t in range(schedule.steps, 0, -1):
            steps = torch.full((1,), t, dtype=torch.long)
            predicted = model(x, steps, start, goal, raster)
            x = schedule.reverse_mean(x, t, predicted)
            variance = schedule.posterior_variance(t)
            if variance > 0:
                noise = torch.randn(x.shape, generator=generator, dtype=dtype)
                x = x + variance ** 0.5 * noise
    return x


def sample_trajectory(
        model, schedule, encoder, initial_state, goal_position, goal_heading,
        raster, noise_seed, smooth=True):
    """
    Draws one trajectory from ``initial_state`` towards the goal pose. The
    first state is exactly ``initial_state``; the same ``noise_seed`` always
    gives the same trajectory.
    """
    dtype = next(model.parameters()).dtype
    start, goal = condition_features(
        initial_state, goal_position, goal_heading)
    start = torch.as_tensor(start, dtype=dtype)[None]
    goal = torch.as_tensor(goal, dtype=dtype)[None]
    if raster is not None:
        raster = torch.as_tensor(raster, dtype=dtype)[None, None]
    offsets = sample_offsets(
        model, schedule, start, goal, raster, seeded_generator(noise_seed))
    return encoder.decode(
        offsets[0].double().numpy(), initial_state, smooth=smooth)


class DiffusionPlanner(object):
    """
    The planner interface over a trained model: rasterizes the map around
    the vehicle and samples a trajectory towards the goal candidate.
    """
    name = 'diffusion'

    def __init__(
            self, model, schedule, encoder, raster_size=RASTER_SIZE,
            resolution=RESOLUTION):
        self.model = model
        self.schedule = schedule
        self.encoder = encoder
        self.raster_size = raster_size
        self.resolution = resolution

    def plan(self, network, state, goal, noise_seed):
        raster = None
        if self.model.use_map:
            raster = rasterize_map(
                network, state, self.raster_size, self.resolution)
        return sample_trajectory(
            self.model, self.schedule, self.encoder, state, goal.position,
            goal.heading, raster, noise_seed)
