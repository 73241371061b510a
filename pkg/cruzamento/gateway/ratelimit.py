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
Token-bucket rate limiting for model backends.
"""
import threading
import time

from cruzamento.errors import BackendError


class TokenBucket(object):
    """
    Allows ``requests_per_minute`` calls per minute on average, with bursts of
    at most ``capacity`` calls. ``acquire()`` blocks until a token is
    available and returns how long it waited::

        >>> now = [0.0]
        >>> bucket = TokenBucket(
        ...     60, clock=lambda: now[0],
        ...     sleep=lambda s: now.__setitem__(0, now[0] + s))
        >>> bucket.acquire()
        0.0
        >>> bucket.acquire()
        1.0

    A limiter without a rate never waits::

        >>> TokenBucket(None).acquire()
        0.0

    If waiting would pass the caller's deadline, it gives up instead::

        >>> bucket.acquire(deadline=now[0] + 0.5)
        Traceback (most recent call last):
          ...
        cruzamento.errors.BackendError: rate limit wait of 1.000 s exceeds \
the deadline
    """

    def __init__(
            self, requests_per_minute, capacity=1, clock=time.monotonic,
            sleep=time.sleep):
        self.rate = (
            requests_per_minute / 60.0 if requests_per_minute else None)
        self.capacity = capacity
        self.tokens = float(capacity)
        self.clock = clock
        self.sleep = sleep
        self.updated = clock()
        self.lock = threading.Lock()

    def acquire(self, deadline=None):
        if self.rate is None:
            return 0.0

        with self.lock:
            now = self.clock()
            self.tokens = min(
                self.capacity,
                self.tokens + (now - self.updated) * self.rate)
            self.updated = now

            wait = max(0.0, (1.0 - self.tokens) / self.rate)
            if deadline is not None and now + wait > deadline:
                raise BackendError(
                    'rate limit wait of {0:.3f} s exceeds the deadline'.format(
                        wait))
            if wait > 0:
                self.sleep(wait)
                self.tokens += wait * self.rate
                self.updated = self.clock()
            self.tokens -= 1.0
            return wait
