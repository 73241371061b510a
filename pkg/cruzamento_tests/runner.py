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

from cruzamento import runner
from cruzamento.errors import ParameterError
from cruzamento.runner import WorkerPool


class TestWorkerPool(unittest.TestCase):

    def test_in_process(self):
        """
        One worker runs jobs in the calling process, in order.
        """
        seen = []

        with WorkerPool(1) as pool:
            results = pool.map(lambda x: seen.append(x) or x * 2, [3, 1, 2])

        self.assertEqual([6, 2, 4], results)
        self.assertEqual([3, 1, 2], seen)

    def test_threads_restored(self):
        """
        The number of torch threads is restored after the jobs.
        """
        threads = torch.get_num_threads()

        with WorkerPool(1) as pool:
            inside = pool.map(lambda _: torch.get_num_threads(), [0])

        self.assertEqual([1], inside)
        self.assertEqual(threads, torch.get_num_threads())

    def test_workers_keep_order(self):
        """
        Several workers give the results in the order of the jobs.
        """
        jobs = list(range(-10, 10))

        with WorkerPool(2) as pool:
            results = pool.map(abs, jobs)

        self.assertEqual([abs(j) for j in jobs], results)

    def test_no_workers(self):
        """
        A pool needs workers.
        """
        with self.assertRaises(ParameterError):
            WorkerPool(0)


load_tests = inelegant.finder.TestFinder(
    __name__,
    runner
).load_tests

if __name__ == "__main__":
    unittest.main()
