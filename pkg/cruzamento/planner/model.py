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
The noise predictor of the diffusion planner.

Trajectory offsets are projected to tokens. Two condition tokens, one for the
initial state and one for the goal, are put in front. A stack of transformer
layers follows, and the map and the diffusion step enter every layer through
an affine transformation of its activations. The map is a raster around the
vehicle read by a small convolutional encoder.

A model predicts noise of the same shape as its input::

    >>> model = PlannerModel(dim=8, layers=1, heads=2, horizon=10,
    ...                      raster_size=32)
    >>> x = torch.zeros(3, 10, 2)
    >>> t = torch.tensor([1, 50, 100])
    >>> start, goal = torch.zeros(3, 1), torch.zeros(3, 4)
    >>> raster = torch.zeros(3, 1, 32, 32)
    >>> model(x, t, start, goal, raster).shape
    torch.Size([3, 10, 2])
"""
import logging
import math

import torch
from torch import nn

from cruzamento.errors import ValidationError
from cruzamento.scenario import T_S

logger = logging.getLogger(__name__)

START_FEATURES = 1
GOAL_FEATURES = 4
OFFSET_FEATURES = 2


def timestep_embedding(t, dim):
    """
    Sinusoidal embedding of diffusion steps, one row per step::

        >>> timestep_embedding(torch.tensor([0, 10]), 4).shape
        torch.Size([2, 4])
    """
    half = dim // 2
    frequencies = torch.exp(
        -math.log(10000.0) *
        torch.arange(half, dtype=torch.float64) / max(half, 1))
    angles = t.double()[:, None] * frequencies[None, :]
    embedding = torch.cat([torch.sin(angles), torch.cos(angles)], dim=1)
    if dim % 2:
        embedding = torch.cat(
            [embedding, torch.zeros(len(t), 1, dtype=torch.float64)], dim=1)
    return embedding


def affine_fuse(x, weight, bias):
    """
    Scales token activations ``x`` (batch, tokens, dim) elementwise by
    ``weight`` and shifts them by ``bias``, both (batch, dim) and the same for
    every token::

        >>> x = torch.arange(6.0).reshape(1, 3, 2)
        >>> affine_fuse(x, torch.ones(1, 2), torch.zeros(1, 2)).tolist()
        [[[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]]]
        >>> affine_fuse(x, torch.zeros(1, 2), torch.ones(1, 2)).tolist()
        [[[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]]]

    Shapes must agree::

        >>> affine_fuse(x, torch.ones(1, 3), torch.zeros(1, 3))
        Traceback (most recent call last):
          ...
        cruzamento.errors.ValidationError: fusion: activations (1, 3, 2) do \
not match weight (1, 3) and bias (1, 3)
    """
    if x.dim() != 3 or weight.shape != bias.shape or \
            weight.shape != (x.shape[0], x.shape[2]):
        raise ValidationError(
            'activations {0} do not match weight {1} and bias {2}'.format(
                tuple(x.shape), tuple(weight.shape), tuple(bias.shape)),
            field_path='fusion')
    return x * weight[:, None, :] + bias[:, None, :]


class MapEncoder(nn.Module):
    """
    Four convolutions, the first with stride 4 and the others with stride 2,
    then global average pooling and a projection to ``dim`` features.
    """

    def __init__(self, dim, channels=(16, 32, 64, 128)):
        super().__init__()
        layers, previous = [], 1
        for i, channel in enumerate(channels):
            stride = 4 if i == 0 else 2
            kernel = 5 if i == 0 else 3
            layers.append(nn.Conv2d(
                previous, channel, kernel, stride=stride,
                padding=kernel // 2))
            layers.append(nn.SiLU())
            previous = channel
        self.convolutions = nn.Sequential(*layers)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.projection = nn.Linear(previous, dim)

    def forward(self, raster):
        features = self.pool(self.convolutions(raster)).flatten(1)
        return self.projection(features)


class AffineFusion(nn.Module):
    """
    Two perceptrons, one for the weight and one for the bias of
    ``affine_fuse()``, reading the map embedding and the step embedding. Their
    last layers start at zero, with bias one for the weight, so a fresh
    fusion leaves activations unchanged.
    """

    def __init__(self, condition_dim, dim):
        super().__init__()
        self.weight = nn.Sequential(
            nn.Linear(condition_dim, dim), nn.SiLU(), nn.Linear(dim, dim))
        self.bias = nn.Sequential(
            nn.Linear(condition_dim, dim), nn.SiLU(), nn.Linear(dim, dim))
        for mlp, start in ((self.weight, 1.0), (self.bias, 0.0)):
            nn.init.zeros_(mlp[-1].weight)
            nn.init.constant_(mlp[-1].bias, start)

    def forward(self, x, condition):
        return affine_fuse(x, self.weight(condition), self.bias(condition))


class FusedTransformerLayer(nn.Module):
    """
    Self-attention, then the affine fusion, then the feed-forward network.
    """

    def __init__(self, dim, heads, condition_dim):
        super().__init__()
        self.attention_norm = nn.LayerNorm(dim)
        self.attention = nn.MultiheadAttention(dim, heads, batch_first=True)
        self.fusion = AffineFusion(condition_dim, dim)
        self.feed_forward_norm = nn.LayerNorm(dim)
        self.feed_forward = nn.Sequential(
            nn.Linear(dim, 4 * dim), nn.SiLU(), nn.Linear(4 * dim, dim))

    def forward(self, x, condition):
        h = self.attention_norm(x)
        x = x + self.attention(h, h, h, need_weights=False)[0]
        x = self.fusion(x, condition)
        return x + self.feed_forward(self.feed_forward_norm(x))


class PlannerModel(nn.Module):
    """
    Predicts the noise in noised offsets ``x`` (batch, horizon, 2) at steps
    ``t`` given start features (batch, 1), goal features (batch, 4) and map
    rasters (batch, 1, size, size). Without ``use_map`` the raster is ignored
    and the fusion reads the step embedding alone.
    """

    def __init__(
            self, dim=256, layers=3, heads=4, horizon=T_S, raster_size=256,
            use_map=True):
        super().__init__()
        self.settings = {
            'dim': dim, 'layers': layers, 'heads': heads,
            'horizon': horizon, 'raster_size': raster_size,
            'use_map': use_map,
        }
        self.dim = dim
        self.horizon = horizon
        self.use_map = use_map

        self.offset_projection = nn.Linear(OFFSET_FEATURES, dim)
        self.start_projection = nn.Linear(START_FEATURES, dim)
        self.goal_projection = nn.Linear(GOAL_FEATURES, dim)
        self.positions = nn.Parameter(torch.zeros(1, horizon + 2, dim))
        nn.init.normal_(self.positions, std=0.02)

        self.map_encoder = MapEncoder(dim) if use_map else None
        condition_dim = 2 * dim if use_map else dim
        self.step_projection = nn.Sequential(
            nn.Linear(dim, dim), nn.SiLU(), nn.Linear(dim, dim))
        self.layers = nn.ModuleList(
            FusedTransformerLayer(dim, heads, condition_dim)
            for _ in range(layers))
        self.output_norm = nn.LayerNorm(dim)
        self.output_projection = nn.Linear(dim, OFFSET_FEATURES)

    def parameter_count(self):
        return sum(p.numel() for p in self.parameters())

    def condition(self, t, raster):
        step = timestep_embedding(t, self.dim).to(
            self.positions.dtype).to(self.positions.device)
        condition = self.step_projection(step)
        if self.use_map:
            condition = torch.cat(
                [self.map_encoder(raster), condition], dim=1)
        return condition

    def forward(self, x, t, start, goal, raster=None):
        if x.shape[1:] != (self.horizon, OFFSET_FEATURES):
            raise ValidationError(
                'expected offsets of shape (batch, {0}, {1}), got {2}'.format(
                    self.horizon, OFFSET_FEATURES, tuple(x.shape)),
                field_path='offsets')
        if self.use_map and raster is None:
            raise ValidationError(
                'this model reads a map raster', field_path='raster')

        tokens = torch.cat([
            self.start_projection(start)[:, None, :],
            self.goal_projection(goal)[:, None, :],
            self.offset_projection(x),
        ], dim=1) + self.positions

        condition = self.condition(t, raster)
        for layer in self.layers:
            tokens = layer(tokens, condition)
        return self.output_projection(self.output_norm(tokens[:, 2:]))


def build_model(settings, horizon=T_S):
    """
    A model from the ``[planner]`` configuration section.
    """
    model = PlannerModel(
        settings['dim'], settings['layers'], settings['heads'], horizon,
        settings['raster_size'], settings['use_map'])
    logger.info('planner model has %d parameters', model.parameter_count())
    return model
