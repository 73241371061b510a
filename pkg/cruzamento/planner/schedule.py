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
The noise schedule of the diffusion planner.

Step 0 is clean data and step ``steps`` is nearly pure noise. The variances
grow linearly, the usual thousand-step schedule squeezed into a hundred
steps::

    >>> schedule = NoiseSchedule()
    >>> schedule.steps, float(schedule.alpha_bars[0])
    (100, 1.0)
    >>> bool(schedule.alpha_bars[-1] < 1e-3)
    True
"""
import torch

from cruzamento.errors import ParameterError

DIFFUSION_STEPS = 100
BETA_START = 1e-3
BETA_END = 0.2


class NoiseSchedule(object):
    """
    Holds ``betas``, ``alphas`` and ``alpha_bars`` as double tensors indexed by
    step. Index 0 is a placeholder with ``beta = 0`` so that ``alpha_bars[0]``
    is exactly 1.
    """

    def __init__(
            self, steps=DIFFUSION_STEPS, beta_start=BETA_START,
            beta_end=BETA_END):
        if steps < 1:
            raise ParameterError(
                'diffusion_steps', steps,
                message='diffusion_steps must be positive, got {0}'.format(
                    steps))
        if not 0 < beta_start < beta_end < 1:
            raise ParameterError(
                'beta_start', beta_start, message='expected '
                '0 < beta_start < beta_end < 1, got {0} and {1}'.format(
                    beta_start, beta_end))
        self.steps = steps
        self.beta_start = beta_start
        self.beta_end = beta_end

        betas = torch.linspace(
            beta_start, beta_end, steps, dtype=torch.float64)
        self.betas = torch.cat([torch.zeros(1, dtype=torch.float64), betas])
        self.alphas = 1 - self.betas
        self.alpha_bars = torch.cumprod(self.alphas, dim=0)

    @staticmethod
    def from_config(configuration):
        planner = configuration.get('planner')
        return NoiseSchedule(
            planner['diffusion_steps'], planner['beta_start'],
            planner['beta_end'])

    def to_dict(self):
        return {
            'steps': self.steps,
            'beta_start': self.beta_start,
            'beta_end': self.beta_end,
        }

    def _check_steps(self, t):
        t = torch.as_tensor(t)
        if torch.any(t < 0) or torch.any(t > self.steps):
            raise ParameterError('t', t.tolist(), (0, self.steps))
        return t.long()

    def _per_item(self, values, t, like):
        values = values.to(like.dtype)[t]
        return values.reshape(values.shape + (1,) * (like.dim() - t.dim()))

    def forward_noise(self, x0, t, noise):
        """
        Noises clean ``x0`` to step ``t``, which is an integer or one step per
        batch item. At step 0 nothing changes::

            >>> x0 = torch.ones(2, 3, 2)
            >>> noise = torch.randn(2, 3, 2)
            >>> bool(torch.equal(NoiseSchedule().forward_noise(x0, 0, noise),
            ...                  x0))
            True

        Steps outside the schedule are refused::

            >>> NoiseSchedule().forward_noise(x0, 101, noise)
            Traceback (most recent call last):
              ...
            cruzamento.errors.ParameterError: t=101 is outside [0, 100]
        """
        if x0.shape != noise.shape:
            raise ValueError(
                'noise shape {0} differs from data shape {1}'.format(
                    tuple(noise.shape), tuple(x0.shape)))
        t = self._check_steps(t)
        if t.dim() == 0:
            alpha_bar = self.alpha_bars[t].item()
            if alpha_bar == 1.0:
                return x0.clone()
            return alpha_bar ** 0.5 * x0 + (1 - alpha_bar) ** 0.5 * noise
        alpha_bar = self._per_item(self.alpha_bars, t, x0)
        return alpha_bar.sqrt() * x0 + (1 - alpha_bar).sqrt() * noise

    def posterior_variance(self, t):
        """
        The variance of the reverse step from ``t`` to ``t - 1``; zero at the
        last step.
        """
        t = int(t)
        if t <= 1:
            return 0.0
        return float(
            self.betas[t] * (1 - self.alpha_bars[t - 1]) /
            (1 - self.alpha_bars[t]))

    def reverse_mean(self, x, t, predicted_noise):
        t = int(t)
        beta = float(self.betas[t])
        alpha = float(self.alphas[t])
        alpha_bar = float(self.alpha_bars[t])
        return (x - beta / (1 - alpha_bar) ** 0.5 * predicted_noise) / \
            alpha ** 0.5
