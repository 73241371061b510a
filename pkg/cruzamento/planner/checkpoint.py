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
Checkpoint files of trained planners.

A checkpoint is a ``torch.save`` archive of a plain dictionary:

``format``, ``version``
    ``'cruzamento-planner'`` and the format version;
``settings``
    the model hyperparameters;
``schedule``, ``encoder``, ``raster``
    what sampling needs besides the weights;
``manifest``
    the name and shape of every parameter;
``state_dict``
    the weights;
``metadata``
    free-form information such as the configuration used for training.

Only tensors and plain values are stored, so checkpoints load with
``weights_only=True``.
"""
import hashlib
import logging
import pickle

import torch

from cruzamento.errors import ValidationError
from cruzamento.planner.encoding import TrajectoryEncoder
from cruzamento.planner.model import PlannerModel
from cruzamento.planner.sampling import DiffusionPlanner
from cruzamento.planner.schedule import NoiseSchedule

logger = logging.getLogger(__name__)

FORMAT = 'cruzamento-planner'
FORMAT_VERSION = 1


def parameter_manifest(model):
    return {
        name: list(tensor.shape)
        for name, tensor in model.state_dict().items()}


def save_checkpoint(planner, path, metadata=None):
    model = planner.model
    torch.save({
        'format': FORMAT,
        'version': FORMAT_VERSION,
        'settings': dict(model.settings),
        'schedule': planner.schedule.to_dict(),
        'encoder': planner.encoder.to_dict(),
        'raster': {
            'size': planner.raster_size,
            'resolution': planner.resolution,
        },
        'manifest': parameter_manifest(model),
        'state_dict': model.state_dict(),
        'metadata': metadata or {},
    }, path)
    logger.info('saved planner checkpoint %s', path)


def load_checkpoint(path):
    """
    Reads a checkpoint written by ``save_checkpoint()`` and returns the
    planner. Unknown formats and parameters that disagree with the manifest
    are refused.
    """
    try:
        document = torch.load(path, map_location='cpu', weights_only=True)
    except (OSError, RuntimeError, EOFError, pickle.UnpicklingError) as e:
        raise ValidationError(
            'cannot read checkpoint {0}: {1}'.format(path, e),
            field_path='checkpoint')
    if not isinstance(document, dict) or document.get('format') != FORMAT:
        raise ValidationError(
            '{0} is not a planner checkpoint'.format(path),
            field_path='checkpoint.format')
    if document.get('version') != FORMAT_VERSION:
        raise ValidationError(
            'unsupported checkpoint version {0!r}'.format(
                document.get('version')),
            field_path='checkpoint.version')

    model = PlannerModel(**document['settings'])
    manifest = parameter_manifest(model)
    if manifest != document['manifest']:
        raise ValidationError(
            'parameters do not match the manifest',
            field_path='checkpoint.manifest')
    model.load_state_dict(document['state_dict'])
    model.eval()

    schedule = document['schedule']
    raster = document['raster']
    return DiffusionPlanner(
        model,
        NoiseSchedule(
            schedule['steps'], schedule['beta_start'], schedule['beta_end']),
        TrajectoryEncoder(**document['encoder']),
        raster['size'], raster['resolution'])


def checkpoint_hash(path):
    """
    The SHA-256 of a checkpoint file, to show it did not change.
    """
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()
