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
The gateway is the single door to language models. It sends text queries to a
text backend and vision queries to a vision backend, retrying transient
failures with exponential backoff, respecting a rate limit and a deadline, and
recording everything into a transcript.
"""
import logging
import time

from cruzamento.errors import (
    BackendError, RetriesExhausted, TransientBackendError, UsageError)
from cruzamento.gateway.backends import (
    LiveBackend, MockVisionBackend, ReplayBackend, TemplateTextBackend)
from cruzamento.gateway.ratelimit import TokenBucket
from cruzamento.gateway.transcript import TranscriptStore
from cruzamento.interfaces import has_complete_method, has_setter

logger = logging.getLogger(__name__)


class Channel(object):
    """
    One backend plus the policy used to call it.
    """

    def __init__(
            self, backend, retries=3, backoff=1.0, deadline=60.0,
            rate_limiter=None):
        if not has_complete_method(backend):
            raise UsageError('{0!r} is not a model backend'.format(backend))
        self.backend = backend
        self.retries = retries
        self.backoff = backoff
        self.deadline = deadline
        self.rate_limiter = (
            rate_limiter if rate_limiter is not None else TokenBucket(None))


class Gateway(object):
    """
    ``Gateway`` dispatches queries to backends. Mock backends are enough to run
    everything offline::

        >>> from cruzamento.gateway.backends import ScriptedTextBackend
        >>> from cruzamento.gateway.query import TextQuery
        >>> gateway = Gateway(ScriptedTextBackend(['<net/>']))
        >>> gateway.complete_text(TextQuery('system', 'user'))
        '<net/>'
        >>> len(gateway.transcript)
        1

    Transient failures are retried, waiting twice as long each time::

        >>> from cruzamento.errors import TransientBackendError
        >>> class FlakyBackend(object):
        ...     calls = 0
        ...     def complete(self, query):
        ...         self.calls += 1
        ...         if self.calls < 3:
        ...             raise TransientBackendError('busy')
        ...         return 'ok'
        >>> waits = []
        >>> gateway = Gateway(FlakyBackend(), sleep=waits.append)
        >>> gateway.complete_text(TextQuery('system', 'user'))
        'ok'
        >>> waits
        [1.0, 2.0]
    """

    def __init__(
            self, text_backend=None, vision_backend=None, transcript=None,
            retries=3, backoff=1.0, deadline=60.0, rate_limiter=None,
            clock=time.monotonic, sleep=time.sleep):
        self.transcript = (
            transcript if transcript is not None else TranscriptStore())
        self.clock = clock
        self.sleep = sleep
        self.channels = {}
        for kind, backend in (
                ('text', text_backend), ('vision', vision_backend)):
            if backend is None:
                continue
            if isinstance(backend, Channel):
                channel = backend
            else:
                channel = Channel(
                    backend, retries, backoff, deadline, rate_limiter)
            if has_setter(channel.backend, 'transcript'):
                channel.backend.set_transcript(self.transcript)
            self.channels[kind] = channel

    @staticmethod
    def from_config(configuration, environment, transcript=None):
        """
        Builds a gateway from the ``[gateway.text]`` and ``[gateway.vision]``
        configuration sections.
        """
        transcript = (
            transcript if transcript is not None else TranscriptStore())
        channels = {}
        for kind in ('text', 'vision'):
            settings = configuration.get('gateway.' + kind)
            channels[kind] = Channel(
                make_backend(kind, settings, environment),
                settings['retries'], settings['backoff'],
                settings['deadline'],
                TokenBucket(settings['requests_per_minute']))
        return Gateway(channels['text'], channels['vision'], transcript)

    def complete_text(self, query):
        return self._complete('text', query)

    def complete_vision(self, query):
        if query.kind != 'vision':
            raise UsageError('vision backends need a VisionQuery')
        return self._complete('vision', query)

    def _complete(self, kind, query):
        channel = self.channels.get(kind)
        if channel is None:
            raise UsageError('no {0} backend is configured'.format(kind))

        deadline = self.clock() + channel.deadline
        last_error = None
        for attempt in range(channel.retries + 1):
            channel.rate_limiter.acquire(deadline)
            try:
                response = channel.backend.complete(query)
            except TransientBackendError as e:
                last_error = e
                wait = channel.backoff * 2 ** attempt
                logger.warning(
                    '%s backend failed (attempt %d): %s', kind, attempt + 1, e)
                if attempt == channel.retries or \
                        self.clock() + wait > deadline:
                    break
                self.sleep(wait)
                continue
            if not isinstance(response, str):
                raise BackendError(
                    '{0} backend returned {1!r}'.format(kind, response))
            self.transcript.record(query, response)
            return response

        raise RetriesExhausted(attempt + 1, last_error)


def make_backend(kind, settings, environment):
    name = settings['backend']
    if name == 'live':
        return LiveBackend(settings, environment)
    if name == 'replay':
        path = settings.get('replay_path')
        return ReplayBackend(TranscriptStore.load(path) if path else None)
    if kind == 'text' and name == 'template':
        return TemplateTextBackend()
    if kind == 'vision' and name == 'mock':
        return MockVisionBackend()
    raise UsageError('unknown {0} backend {1!r}'.format(kind, name))
