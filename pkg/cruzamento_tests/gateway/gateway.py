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

from cruzamento.config import Configuration, Environment
from cruzamento.errors import (
    BackendError, RetriesExhausted, TransientBackendError, UsageError)
from cruzamento.gateway import gateway
from cruzamento.gateway.backends import (
    MockVisionBackend, ReplayBackend, ScriptedTextBackend,
    TemplateTextBackend)
from cruzamento.gateway.gateway import Channel, Gateway, make_backend
from cruzamento.gateway.query import TextQuery, VisionQuery
from cruzamento.gateway.ratelimit import TokenBucket
from cruzamento.gateway.transcript import TranscriptStore

from cruzamento_tests.gateway.query import png


class FailingBackend(object):

    def __init__(self, error=TransientBackendError):
        self.error = error
        self.calls = 0

    def complete(self, query):
        self.calls += 1
        raise self.error('busy')


class FakeClock(object):

    def __init__(self):
        self.now = 0.0
        self.sleeps = []

    def __call__(self):
        return self.now

    def sleep(self, seconds):
        self.sleeps.append(seconds)
        self.now += seconds


class TestGateway(unittest.TestCase):

    def test_routes_by_kind(self):
        """
        Text queries go to the text backend, vision queries to the vision
        backend.
        """
        gateway = Gateway(
            ScriptedTextBackend(['text']), ScriptedTextBackend(['vision']))

        self.assertEqual(
            'vision',
            gateway.complete_vision(VisionQuery('s', 'u', png())))
        self.assertEqual('text', gateway.complete_text(TextQuery('s', 'u')))

    def test_vision_needs_image(self):
        """
        A text query cannot be sent to the vision backend.
        """
        gateway = Gateway(vision_backend=MockVisionBackend())

        with self.assertRaises(UsageError):
            gateway.complete_vision(TextQuery('s', 'u'))

    def test_missing_backend(self):
        """
        Asking a kind of model nobody configured is a usage error.
        """
        with self.assertRaises(UsageError):
            Gateway(ScriptedTextBackend([])).complete_vision(
                VisionQuery('s', 'u', png()))

    def test_not_a_backend(self):
        """
        Backends must have a ``complete()`` method.
        """
        with self.assertRaises(UsageError):
            Gateway(object())

    def test_retries_exhausted(self):
        """
        After the last retry the gateway gives up, telling how many calls were
        made. Nothing is recorded.
        """
        backend = FailingBackend()
        clock = FakeClock()
        gateway = Gateway(
            backend, retries=2, clock=clock, sleep=clock.sleep)

        with self.assertRaises(RetriesExhausted) as c:
            gateway.complete_text(TextQuery('s', 'u'))

        self.assertEqual(3, c.exception.attempts)
        self.assertEqual(3, backend.calls)
        self.assertEqual([1.0, 2.0], clock.sleeps)
        self.assertIsInstance(c.exception.last_error, TransientBackendError)
        self.assertEqual(0, len(gateway.transcript))

    def test_deadline(self):
        """
        The gateway does not wait past its deadline.
        """
        backend = FailingBackend()
        clock = FakeClock()
        gateway = Gateway(
            backend, retries=5, backoff=10.0, deadline=15.0, clock=clock,
            sleep=clock.sleep)

        with self.assertRaises(RetriesExhausted) as c:
            gateway.complete_text(TextQuery('s', 'u'))

        self.assertEqual(2, c.exception.attempts)
        self.assertEqual([10.0], clock.sleeps)

    def test_permanent_failure(self):
        """
        Errors that are not transient are not retried.
        """
        backend = FailingBackend(BackendError)
        gateway = Gateway(backend, sleep=lambda s: None)

        with self.assertRaises(BackendError) as c:
            gateway.complete_text(TextQuery('s', 'u'))

        self.assertNotIsInstance(c.exception, RetriesExhausted)
        self.assertEqual(1, backend.calls)

    def test_non_text_answer(self):
        """
        Backends must answer with text.
        """
        gateway = Gateway(ScriptedTextBackend([None]))

        with self.assertRaises(BackendError):
            gateway.complete_text(TextQuery('s', 'u'))

    def test_rate_limit(self):
        """
        Every call takes a token from the rate limiter.
        """
        clock = FakeClock()
        bucket = TokenBucket(60, clock=clock, sleep=clock.sleep)
        gateway = Gateway(
            ScriptedTextBackend(['a', 'b', 'c']), rate_limiter=bucket,
            clock=clock, sleep=clock.sleep)

        for i in range(3):
            gateway.complete_text(TextQuery('s', 'u'))

        self.assertEqual([1.0, 1.0], clock.sleeps)

    def test_replay_gets_transcript(self):
        """
        Backends wanting the transcript get the one the gateway records into,
        so a query asked twice is answered from the record.
        """
        store = TranscriptStore()
        query = TextQuery('s', 'u')
        store.record(query, 'recorded')
        gateway = Gateway(ReplayBackend(), transcript=store)

        self.assertEqual('recorded', gateway.complete_text(query))
        self.assertEqual(2, len(store))

    def test_channels(self):
        """
        Each kind of model may have its own policy.
        """
        text = Channel(FailingBackend(), retries=0)
        gateway = Gateway(text, MockVisionBackend(), retries=4)

        with self.assertRaises(RetriesExhausted) as c:
            gateway.complete_text(TextQuery('s', 'u'))

        self.assertEqual(1, c.exception.attempts)
        self.assertEqual(4, gateway.channels['vision'].retries)


class TestMakeBackend(unittest.TestCase):

    def test_offline_defaults(self):
        """
        The default configuration needs no network.
        """
        gateway = Gateway.from_config(Configuration(), Environment({}))

        self.assertIsInstance(
            gateway.channels['text'].backend, TemplateTextBackend)
        self.assertIsInstance(
            gateway.channels['vision'].backend, MockVisionBackend)
        self.assertEqual(3, gateway.channels['text'].retries)

    def test_replay(self):
        """
        A replay backend without a file reads the gateway transcript.
        """
        backend = make_backend(
            'text', {'backend': 'replay', 'replay_path': ''},
            Environment({}))

        self.assertIsInstance(backend, ReplayBackend)
        self.assertIsNone(backend.source)

    def test_unknown(self):
        """
        Mock backends only exist for their kind.
        """
        with self.assertRaises(UsageError):
            make_backend('text', {'backend': 'mock'}, Environment({}))
        with self.assertRaises(UsageError):
            make_backend('vision', {'backend': 'template'}, Environment({}))


load_tests = inelegant.finder.TestFinder(
    __name__,
    gateway
).load_tests

if __name__ == "__main__":
    unittest.main()
