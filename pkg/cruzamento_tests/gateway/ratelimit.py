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

from cruzamento.errors import BackendError
from cruzamento.gateway import ratelimit
from cruzamento.gateway.ratelimit import TokenBucket


class FakeTime(object):

    def __init__(self):
        self.now = 0.0
        self.sleeps = []

    def clock(self):
        return self.now

    def sleep(self, seconds):
        self.sleeps.append(seconds)
        self.now += seconds


class TestTokenBucket(unittest.TestCase):

    def test_burst(self):
        """
        A bucket with capacity for three calls allows three calls at once.
        """
        time = FakeTime()
        bucket = TokenBucket(30, capacity=3, clock=time.clock,
                             sleep=time.sleep)

        waits = [bucket.acquire() for i in range(4)]

        self.assertEqual([0.0, 0.0, 0.0, 2.0], waits)

    def test_refill(self):
        """
        Tokens come back with time.
        """
        time = FakeTime()
        bucket = TokenBucket(60, clock=time.clock, sleep=time.sleep)
        bucket.acquire()
        time.now += 5

        self.assertEqual(0.0, bucket.acquire())
        self.assertEqual([], time.sleeps)

    def test_refill_is_capped(self):
        """
        A long pause does not store more tokens than the capacity.
        """
        time = FakeTime()
        bucket = TokenBucket(60, capacity=2, clock=time.clock,
                             sleep=time.sleep)
        time.now += 1000

        waits = [bucket.acquire() for i in range(3)]

        self.assertEqual([0.0, 0.0, 1.0], waits)

    def test_deadline(self):
        """
        A wait passing the deadline raises without sleeping.
        """
        time = FakeTime()
        bucket = TokenBucket(6, clock=time.clock, sleep=time.sleep)
        bucket.acquire()

        with self.assertRaises(BackendError):
            bucket.acquire(deadline=5.0)
        self.assertEqual([], time.sleeps)


load_tests = inelegant.finder.TestFinder(
    __name__,
    ratelimit
).load_tests

if __name__ == "__main__":
    unittest.main()
