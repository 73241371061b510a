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
Training of the noise predictor. Every item of a batch gets a random step and
random noise; the loss is the mean squared error between that noise and the
model prediction. A model that always predicts zero has a loss near one::

    >>> class Zero(torch.nn.Module):
    ...     def forward(self, x, t, start, goal, raster=None):
    ...         return torch.zeros_like(x)
    >>> batch = TrajectoryBatch(
    ...     torch.zeros(512, 10, 2), torch.zeros(512, 1), torch.zeros(512, 4),
    ...     None)
    >>> generator = torch.Generator().manual_seed(0)
    >>> loss = diffusion_loss(Zero(), NoiseSchedule(), batch, generator)
    >>> abs(float(loss) - 1.0) < 0.05
    True
"""
import collections
import logging
import math

import torch
import torch.nn.functional as F

from cruzamento.errors import TrainingDiverged
from cruzamento.planner.encoding import TrajectoryEncoder
from cruzamento.planner.model import build_model
from cruzamento.planner.sampling import DiffusionPlanner
from cruzamento.planner.schedule import NoiseSchedule

logger = logging.getLogger(__name__)

LEARNING_RATE = 1e-4
BATCH_SIZE = 32
EPOCHS = 90


class TrajectoryBatch(collections.namedtuple(
        'TrajectoryBatch', ('offsets', 'start', 'goal', 'raster'))):
    """
    Normalized offsets (batch, horizon, 2), start features (batch, 1), goal
    features (batch, 4) and map rasters (batch, 1, size, size) or ``None``.
    """
    __slots__ = ()

    @property
    def size(self):
        return len(self.offsets)

    def select(self, indices):
        return TrajectoryBatch(
            self.offsets[indices], self.start[indices], self.goal[indices],
            None if self.raster is None else self.raster[indices])


def diffusion_loss(model, schedule, batch, generator):
    size = len(batch.offsets)
    t = torch.randint(1, schedule.steps + 1, (size,), generator=generator)
    noise = torch.randn(
        batch.offsets.shape, generator=generator, dtype=batch.offsets.dtype)
    noised = schedule.forward_noise(batch.offsets, t, noise)
    predicted = model(noised, t, batch.start, batch.goal, batch.raster)
    return F.mse_loss(predicted, noise)


def training_step(model, schedule, batch, optimizer, generator):
    """
    One gradient update on ``batch``. Returns the loss before the update and
    raises ``TrainingDiverged`` if it is not finite.
    """
    model.train()
    loss = diffusion_loss(model, schedule, batch, generator)
    value = float(loss.detach())
    if not math.isfinite(value):
        raise TrainingDiverged({
            'loss': value,
            'batch_size': batch.size,
            'offsets_finite': bool(torch.isfinite(batch.offsets).all()),
        })
    optimizer.zero_grad()
    loss.backward()
    optimizer.step()
    return value


class Trainer(object):
    """
    Trains a model with Adam over shuffled batches. Batch order and noise
    come from a generator seeded with ``seed``, so two trainers with the same
    seed, model initialization and data train the same way.
    """

    def __init__(
            self, model, schedule, learning_rate=LEARNING_RATE,
            batch_size=BATCH_SIZE, epochs=EPOCHS, seed=0):
        self.model = model
        self.schedule = schedule
        self.batch_size = batch_size
        self.epochs = epochs
        self.seed = seed
        self.optimizer = torch.optim.Adam(
            model.parameters(), lr=learning_rate)
        self.losses = []

    @staticmethod
    def from_config(model, schedule, configuration):
        training = configuration.get('training')
        return Trainer(
            model, schedule, training['learning_rate'],
            training['batch_size'], training['epochs'], training['seed'])

    def fit(self, data, epoch_callback=None):
        """
        Trains on ``data``, a ``TrajectoryBatch`` holding the whole dataset.
        Returns the mean loss of every epoch.
        """
        generator = torch.Generator().manual_seed(self.seed)
        self.losses = []
        for epoch in range(self.epochs):
            order = torch.randperm(data.size, generator=generator)
            total, count = 0.0, 0
            for begin in range(0, data.size, self.batch_size):
                indices = order[begin:begin + self.batch_size]
                batch = data.select(indices)
                try:
                    loss = training_step(
                        self.model, self.schedule, batch, self.optimizer,
                        generator)
                except TrainingDiverged as e:
                    raise TrainingDiverged(dict(
                        e.diagnostics, epoch=epoch + 1, batch=begin)) from e
                total += loss * len(indices)
                count += len(indices)
            mean = total / max(count, 1)
            self.losses.append(mean)
            logger.info('epoch %d: loss %.5f', epoch + 1, mean)
            if epoch_callback is not None:
                epoch_callback(epoch, mean)
        self.model.eval()
        return list(self.losses)


def train_planner(dataset, configuration, epoch_callback=None):
    """
    Builds a model from the ``[planner]`` settings, fits the encoder scale to
    ``dataset`` and trains with the ``[training]`` settings. Returns the
    trained planner and the loss of every epoch.
    """
    planner = configuration.get('planner')
    torch.manual_seed(configuration.get('training.seed'))
    encoder = TrajectoryEncoder.fit(
        dataset.raw_offsets(), planner['smoothing_window'])
    model = build_model(planner)
    schedule = NoiseSchedule.from_config(configuration)
    trainer = Trainer.from_config(model, schedule, configuration)
    losses = trainer.fit(
        dataset.to_batch(encoder, planner['use_map']), epoch_callback)
    return DiffusionPlanner(
        model, schedule, encoder, planner['raster_size'],
        planner['raster_resolution']), losses
