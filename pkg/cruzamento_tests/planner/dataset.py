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

from cruzamento.errors import ValidationError
from cruzamento.planner import dataset
from cruzamento.planner.dataset import (
    PROFILES, SpeedProfile, SyntheticDataset, generate_synthetic_dataset)
from cruzamento.planner.encoding import TrajectoryEncoder
from cruzamento.scenario import T_S

from cruzamento_tests.reference import tiny_dataset

HIGHWAY = [('highway', {'lanes': 2})]


class TestGenerateSyntheticDataset(unittest.TestCase):

    def test_generate(self):
        """
        Generated datasets hold legal trajectories of the full horizon with
        a raster each.
        """
        data = generate_synthetic_dataset(
            5, seed=3, templates=HIGHWAY, raster_size=32)

        self.assertEqual((5, T_S + 1, 4), data.trajectories.shape)
        self.assertEqual((5, 32, 32), data.rasters.shape)
        self.assertEqual(('highway',) * 5, data.kinds)
        self.assertTrue(set(data.profiles) <= set(PROFILES))
        self.assertTrue(set(np.unique(data.rasters)) <= {0, 1, 2})
        self.assertTrue(np.all(data.trajectories[:, :, 3] >= 0))

    def test_reproducible(self):
        """
        The same seed gives the same dataset.
        """
        first = generate_synthetic_dataset(
            3, seed=8, templates=HIGHWAY, raster_size=32)
        second = generate_synthetic_dataset(
            3, seed=8, templates=HIGHWAY, raster_size=32)

        np.testing.assert_array_equal(
            first.trajectories, second.trajectories)
        self.assertEqual(first.profiles, second.profiles)

    def test_empty(self):
        """
        Asking for no sample is an error.
        """
        with self.assertRaises(ValidationError):
            generate_synthetic_dataset(0)


class TestSyntheticDataset(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_save_load(self):
        """
        A saved dataset loads back unchanged.
        """
        path = os.path.join(self.directory, 'data.npz')
        data = tiny_dataset()

        data.save(path)
        loaded = SyntheticDataset.load(path)

        np.testing.assert_array_equal(data.trajectories, loaded.trajectories)
        np.testing.assert_array_equal(data.rasters, loaded.rasters)
        self.assertEqual(data.kinds, loaded.kinds)
        self.assertEqual(data.profiles, loaded.profiles)

    def test_bad_version(self):
        """
        Datasets from another format version are refused.
        """
        path = os.path.join(self.directory, 'data.npz')
        data = tiny_dataset()
        np.savez_compressed(
            path, version=np.array(99), trajectories=data.trajectories,
            rasters=data.rasters, kinds=np.array(data.kinds),
            profiles=np.array(data.profiles))

        with self.assertRaises(ValidationError):
            SyntheticDataset.load(path)

    def test_missing_file(self):
        """
        Missing files are validation errors.
        """
        with self.assertRaises(ValidationError):
            SyntheticDataset.load(os.path.join(self.directory, 'no.npz'))

    def test_lengths_differ(self):
        """
        Every array needs one entry per sample.
        """
        with self.assertRaises(ValidationError):
            SyntheticDataset(
                tiny_dataset().trajectories, np.zeros((2, 32, 32)),
                ['highway'] * 4, ['constant'] * 4)

    def test_split(self):
        """
        ``split()`` keeps the last samples apart.
        """
        train, held = tiny_dataset(5).split(2)

        self.assertEqual(3, len(train))
        self.assertEqual(2, len(held))
        self.assertEqual(3.0, held.initial_state(0).y)

    def test_to_batch(self):
        """
        Batches hold one row per sample with rasters scaled to [0, 1].
        """
        data = tiny_dataset()
        data.rasters[1, 0, 0] = 2

        batch = data.to_batch(TrajectoryEncoder())

        self.assertEqual((4, T_S, 2), tuple(batch.offsets.shape))
        self.assertEqual((4, 1), tuple(batch.start.shape))
        self.assertEqual((4, 4), tuple(batch.goal.shape))
        self.assertEqual((4, 1, 32, 32), tuple(batch.raster.shape))
        self.assertEqual(1.0, float(batch.raster.max()))
        self.assertIsNone(
            data.to_batch(TrajectoryEncoder(), use_map=False).raster)

    def test_raster(self):
        """
        Stored codes come back as raster values.
        """
        data = tiny_dataset()
        data.rasters[0, 2, 3] = 1

        self.assertEqual(0.5, data.raster(0)[2, 3])


class TestSpeedProfile(unittest.TestCase):

    def test_stop_and_go(self):
        """
        A stop-and-go vehicle brakes, waits, then accelerates.
        """
        profile = SpeedProfile(
            'stop_and_go', np.random.default_rng(0), 14.0)
        profile.brake_at, profile.wait = 1.0, 2.0

        self.assertEqual(0.0, profile.accel(0.5, 10.0))
        self.assertLess(profile.accel(1.5, 10.0), 0)
        self.assertEqual(0.0, profile.accel(2.0, 0.0))
        self.assertEqual(0.0, profile.accel(3.5, 0.0))
        self.assertGreater(profile.accel(4.5, 0.0), 0)

    def test_limits(self):
        """
        Vehicles do not accelerate past the speed limit nor brake below zero.
        """
        rng = np.random.default_rng(0)

        self.assertEqual(
            0.0, SpeedProfile('accelerate', rng, 14.0).accel(0, 14.0))
        self.assertEqual(
            0.0, SpeedProfile('decelerate', rng, 14.0).accel(0, 0.0))


load_tests = inelegant.finder.TestFinder(
    __name__,
    dataset
).load_tests

if __name__ == "__main__":
    unittest.main()
