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
import os
import shutil
import tempfile
import unittest

import inelegant.finder
import numpy as np
import torch

from cruzamento.errors import ValidationError
from cruzamento.planner import checkpoint
from cruzamento.planner.checkpoint import (
    FORMAT, FORMAT_VERSION, checkpoint_hash, load_checkpoint,
    save_checkpoint)
from cruzamento.scenario import VehicleState

from cruzamento_tests.reference import (
    straight_goal, straight_road, tiny_planner)


class TestCheckpoint(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()
        self.path = os.path.join(self.directory, 'planner.pt')

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_same_plans(self):
        """
        A loaded planner plans exactly as the saved one.
        """
        planner = tiny_planner(seed=3)
        state = VehicleState(20, 0, 0, 10)
        goal = straight_goal(state, 90)

        save_checkpoint(planner, self.path, {'epochs': 2})
        loaded = load_checkpoint(self.path)

        np.testing.assert_array_equal(
            planner.plan(straight_road(), state, goal, 5).array,
            loaded.plan(straight_road(), state, goal, 5).array)
        self.assertEqual(planner.model.settings, loaded.model.settings)
        self.assertEqual(planner.schedule.steps, loaded.schedule.steps)
        self.assertEqual(planner.encoder.sigma, loaded.encoder.sigma)
        self.assertEqual(6.25, loaded.resolution)
        self.assertFalse(loaded.model.training)

    def test_metadata(self):
        """
        Metadata is stored along the weights.
        """
        save_checkpoint(tiny_planner(), self.path, {'epochs': 2})

        document = torch.load(self.path, weights_only=True)

        self.assertEqual({'epochs': 2}, document['metadata'])
        self.assertEqual(FORMAT, document['format'])

    def test_loading_keeps_file(self):
        """
        Loading does not touch the file.
        """
        save_checkpoint(tiny_planner(), self.path)
        digest = checkpoint_hash(self.path)

        load_checkpoint(self.path)

        self.assertEqual(digest, checkpoint_hash(self.path))
        self.assertEqual(64, len(digest))

    def test_not_a_checkpoint(self):
        """
        Other files are refused.
        """
        torch.save({'weights': torch.zeros(2)}, self.path)

        with self.assertRaises(ValidationError) as context:
            load_checkpoint(self.path)

        self.assertEqual('checkpoint.format', context.exception.field_path)

    def test_garbage(self):
        """
        Unreadable files are refused.
        """
        with open(self.path, 'wb') as f:
            f.write(b'not a checkpoint')

        with self.assertRaises(ValidationError) as context:
            load_checkpoint(self.path)

        self.assertEqual('checkpoint', context.exception.field_path)

    def test_version(self):
        """
        Checkpoints of another format version are refused.
        """
        save_checkpoint(tiny_planner(), self.path)
        document = torch.load(self.path, weights_only=True)
        document['version'] = FORMAT_VERSION + 1
        torch.save(document, self.path)

        with self.assertRaises(ValidationError) as context:
            load_checkpoint(self.path)

        self.assertEqual('checkpoint.version', context.exception.field_path)

    def test_manifest(self):
        """
        Weights that disagree with the settings are refused.
        """
        save_checkpoint(tiny_planner(), self.path)
        document = torch.load(self.path, weights_only=True)
        document['settings']['dim'] = 16
        torch.save(document, self.path)

        with self.assertRaises(ValidationError) as context:
            load_checkpoint(self.path)

        self.assertEqual('checkpoint.manifest', context.exception.field_path)


load_tests = inelegant.finder.TestFinder(
    __name__,
    checkpoint
).load_tests

if __name__ == "__main__":
    unittest.main()
