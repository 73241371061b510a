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
import json
import os
import tempfile
import unittest

import inelegant.finder

from cruzamento.gateway import transcript
from cruzamento.gateway.query import TextQuery
from cruzamento.gateway.transcript import TranscriptStore


class TestTranscriptStore(unittest.TestCase):

    def test_file_and_load(self):
        """
        Records written to a file should be loaded back with the same
        responses.
        """
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'transcript.jsonl')
            store = TranscriptStore(path, clock=lambda: 2.0)
            query = TextQuery('system', 'user')
            store.record(query, 'answer')
            store.log('fallback', vehicle='v1', reason='retries')

            loaded = TranscriptStore.load(path)
            with open(path) as f:
                lines = [json.loads(line) for line in f]

        self.assertEqual(2, len(lines))
        self.assertEqual('answer', loaded[query.query_hash])
        self.assertEqual(
            ['v1'], [e['vehicle'] for e in loaded.events('fallback')])
        self.assertIsNone(loaded.path)

    def test_events_filter(self):
        """
        ``events()`` lists only events, optionally of one name.
        """
        store = TranscriptStore(clock=lambda: 0.0)
        store.record(TextQuery('system', 'user'), 'answer')
        store.log('retry', attempt=1)
        store.log('fallback', vehicle='v2')

        self.assertEqual(2, len(store.events()))
        self.assertEqual(
            ['retry'], [e['event'] for e in store.events('retry')])

    def test_last_response_wins(self):
        """
        Recording the same query twice keeps the latest response.
        """
        store = TranscriptStore()
        query = TextQuery('system', 'user')
        store.record(query, 'first')
        store.record(query, 'second')

        self.assertEqual('second', store[query.query_hash])
        self.assertEqual(2, len(store))

    def test_record_fields(self):
        """
        Exchange records keep the prompts and the seed of the query.
        """
        store = TranscriptStore(clock=lambda: 0.0)
        record = store.record(
            TextQuery('system', 'user', request_seed=5), 'answer')

        self.assertEqual('exchange', record['type'])
        self.assertEqual('system', record['system_prompt'])
        self.assertEqual(5, record['request_seed'])
        self.assertIsNone(record['image_hash'])


load_tests = inelegant.finder.TestFinder(
    __name__,
    transcript
).load_tests

if __name__ == "__main__":
    unittest.main()
