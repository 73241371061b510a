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
Running independent jobs, one scenario each, in worker processes.

Results come back in the order of the jobs, whatever the number of workers,
so the outputs do not depend on it::

    >>> with WorkerPool(1) as pool:
    ...     pool.map(abs, [-2, 1, -3])
    [2, 1, 3]
"""
import logging
import multiprocessing

import torch

from cruzamento.errors import ParameterError

logger = logging.getLogger(__name__)


def _single_thread():
    torch.set_num_threads(1)


class WorkerPool(object):
    """
    A context manager around ``multiprocessing.Pool``. With one worker jobs
    run in the calling process. Workers use a single torch thread, so that
    floating-point reductions do not depend on the pool.
    """

    def __init__(self, workers=1):
        if workers < 1:
            raise ParameterError(
                'workers', workers,
                message='at least one worker is needed, got {0}'.format(
                    workers))
        self.workers = workers
        self._pool = None

    def __enter__(self):
        if self.workers > 1:
            self._pool = multiprocessing.get_context('spawn').Pool(
                self.workers, initializer=_single_thread)
            logger.debug('started %d workers', self.workers)
        return self

    def __exit__(self, *args):
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None

    def map(self, function, jobs):
        jobs = list(jobs)
        if self._pool is None:
            threads = torch.get_num_threads()
            torch.set_num_threads(1)
            try:
                return [function(job) for job in jobs]
            finally:
                torch.set_num_threads(threads)
        return self._pool.map(function, jobs, chunksize=1)
