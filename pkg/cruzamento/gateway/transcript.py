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
The transcript keeps every exchange with a model backend, one JSON record per
line. It serves three purposes: it documents how a scenario was generated, it
lets ``ReplayBackend`` answer recorded queries offline and it keeps the rollout
log (goals offered and selected, retries, fallbacks).
"""
import json
import threading
import time


class TranscriptStore(object):
    """
    ``TranscriptStore`` stores and retrieves records. In memory it works like
    this::

        >>> from cruzamento.gateway.query import TextQuery
        >>> store = TranscriptStore(clock=lambda: 0.0)
        >>> query = TextQuery('system', 'user')
        >>> query.query_hash in store
        False
        >>> record = store.record(query, 'answer')
        >>> store[query.query_hash]
        'answer'
        >>> len(store)
        1

    Records know the instant they were made::

        >>> record['timestamp']
        0.0

    If a path is given, every record is also appended to that file, so it can
    be loaded back with ``TranscriptStore.load()``.
    """

    def __init__(self, path=None, clock=time.time):
        self.path = path
        self.clock = clock
        self.records = []
        self.responses = {}
        self.lock = threading.Lock()

    def record(self, query, response):
        record = {
            'type': 'exchange',
            'kind': query.kind,
            'query_hash': query.query_hash,
            'system_prompt': query.system_prompt,
            'user_prompt': query.user_prompt,
            'request_seed': query.request_seed,
            'image_hash': getattr(query, 'image_hash', None),
            'response': response,
            'timestamp': self.clock(),
        }
        self._append(record)
        return record

    def log(self, event, **fields):
        """
        Stores an event that is not a model exchange, for example a rollout
        decision::

            >>> store = TranscriptStore(clock=lambda: 1.5)
            >>> store.log('fallback', vehicle=3)['vehicle']
            3
            >>> store[None]
            Traceback (most recent call last):
              ...
            KeyError: None
        """
        record = dict(fields, type='event', event=event,
                      timestamp=self.clock())
        self._append(record)
        return record

    def events(self, event=None):
        return [
            r for r in self.records
            if r['type'] == 'event' and (event is None or r['event'] == event)
        ]

    def _append(self, record):
        with self.lock:
            self.records.append(record)
            if record['type'] == 'exchange':
                self.responses[record['query_hash']] = record['response']
            if self.path is not None:
                with open(self.path, 'a') as f:
                    f.write(json.dumps(record, sort_keys=True) + '\n')

    def __getitem__(self, query_hash):
        return self.responses[query_hash]

    def __contains__(self, query_hash):
        return query_hash in self.responses

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    @staticmethod
    def load(path):
        """
        Reads a transcript file. The store returned keeps its records in memory
        only; it does not append to the file it was read from.
        """
        store = TranscriptStore()
        with open(path) as f:
            for line in f:
                if line.strip():
                    store._append(json.loads(line))
        return store
