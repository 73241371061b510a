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
import base64
import unittest

import inelegant.finder
import requests

from cruzamento.config import Environment
from cruzamento.errors import (
    BackendError, ConfigurationError, ReplayMiss, TransientBackendError)
from cruzamento.gateway import backends
from cruzamento.gateway.backends import (
    LiveBackend, MockVisionBackend, ReplayBackend, TemplateTextBackend,
    template_request)
from cruzamento.gateway.goals import goal_selection_query
from cruzamento.gateway.goals import parse_goal_selection
from cruzamento.gateway.query import TextQuery, VisionQuery
from cruzamento.gateway.transcript import TranscriptStore
from cruzamento.mapsynth import extract_xml
from cruzamento.roadnet.xmlio import parse_network
from cruzamento.rollout.candidates import GoalCandidate

from cruzamento_tests.gateway.query import png
from cruzamento_tests.reference import vehicle

ENVIRONMENT = Environment({'KEY': 'secret'})


def settings(provider):
    return {
        'provider': provider, 'model': 'some-model', 'endpoint': '',
        'api_key_env': 'KEY', 'deadline': 30.0
    }


class FakeResponse(object):

    def __init__(self, status_code, body=None, text=''):
        self.status_code = status_code
        self.body = body
        self.text = text

    def json(self):
        return self.body


class FakeSession(object):
    """
    Records the requests it gets and answers with the given responses.
    """

    def __init__(self, *responses):
        self.responses = list(responses)
        self.requests = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.requests.append({
            'url': url, 'json': json, 'headers': headers,
            'timeout': timeout})
        response = self.responses.pop(0)
        if isinstance(response, Exception):
            raise response
        return response


class TestMockVisionBackend(unittest.TestCase):

    def test_ranks_offered_candidates(self):
        """
        The answer ranks every offered candidate, straight ahead first.
        """
        candidates = [
            GoalCandidate(1, (-30, 0), 3.14, ('west',), 30),
            GoalCandidate(2, (100, 0), 0, ('east',), 100),
            GoalCandidate(3, (100, 40), 0.4, ('north',), 110)]
        query = goal_selection_query(
            vehicle(1, 0, 0, speed=10), candidates, png())

        answer = MockVisionBackend().complete(query)
        ranking = parse_goal_selection(answer, [1, 2, 3]).ranked_goal_ids

        self.assertEqual([1, 2, 3], sorted(ranking))
        self.assertEqual(2, ranking[0])

    def test_other_tasks(self):
        """
        The mock only knows goal selection.
        """
        with self.assertRaises(BackendError):
            MockVisionBackend().complete(VisionQuery('s', 'u', png()))


class TestTemplateRequest(unittest.TestCase):

    def test_keywords(self):
        """
        Every template kind is recognized by some keyword.
        """
        self.assertEqual('t_junction', template_request('A T-junction')[0])
        self.assertEqual(
            'on_ramp_merge', template_request('merging traffic')[0])
        self.assertEqual('highway', template_request('a freeway')[0])
        self.assertEqual(
            'roundabout', template_request('a traffic circle')[0])
        self.assertEqual(
            'intersection', template_request('a 4-way crossing')[0])

    def test_lane_width(self):
        """
        Lane widths are read as ``... m wide``.
        """
        self.assertEqual(
            ('highway', {'lanes': 2, 'lane_width': 3.2}),
            template_request('a highway, 2 lanes, 3.2 m wide'))


class TestTemplateTextBackend(unittest.TestCase):

    def test_description_line(self):
        """
        Without a context the description comes from the prompt.
        """
        query = TextQuery(
            'system', 'Some rules.\nDESCRIPTION: a 2-lane highway\n')

        answer = TemplateTextBackend().complete(query)
        network = parse_network(extract_xml(answer))

        self.assertTrue(network.validate().is_empty)
        self.assertEqual(0, len(network.junctions))
        self.assertEqual(2, len(network.lanes))

    def test_clamps(self):
        """
        Impossible parameters are clamped instead of failing.
        """
        query = TextQuery(
            'system', 'user',
            context={'description': 'a roundabout with radius 5000 m'})

        answer = TemplateTextBackend().complete(query)

        self.assertTrue(
            parse_network(extract_xml(answer)).validate().is_empty)


class TestReplayBackend(unittest.TestCase):

    def test_hit_and_miss(self):
        """
        Recorded queries are answered, others raise ``ReplayMiss``.
        """
        store = TranscriptStore()
        recorded = TextQuery('system', 'recorded')
        store.record(recorded, 'old answer')
        backend = ReplayBackend(store)

        self.assertEqual('old answer', backend.complete(recorded))
        with self.assertRaises(ReplayMiss) as c:
            backend.complete(TextQuery('system', 'new'))
        self.assertEqual(
            TextQuery('system', 'new').query_hash, c.exception.query_hash)

    def test_gateway_transcript(self):
        """
        Without a source the backend reads the transcript it was given.
        """
        store = TranscriptStore()
        query = TextQuery('system', 'user')
        store.record(query, 'answer')
        backend = ReplayBackend()
        backend.set_transcript(store)

        self.assertEqual('answer', backend.complete(query))


class TestLiveBackend(unittest.TestCase):

    def test_openai(self):
        """
        OpenAI requests carry the key as a bearer token and the image as a
        data URL.
        """
        session = FakeSession(FakeResponse(200, {
            'choices': [{'message': {'content': 'RANKING: 1'}}]}))
        backend = LiveBackend(settings('openai'), ENVIRONMENT, session)
        image = png()

        answer = backend.complete(
            VisionQuery('system', 'user', image, request_seed=3))

        request = session.requests[0]
        content = request['json']['messages'][1]['content']
        self.assertEqual('RANKING: 1', answer)
        self.assertEqual(LiveBackend.ENDPOINTS['openai'], request['url'])
        self.assertEqual('Bearer secret', request['headers']['Authorization'])
        self.assertEqual('some-model', request['json']['model'])
        self.assertEqual(3, request['json']['seed'])
        self.assertEqual(30.0, request['timeout'])
        self.assertEqual(
            'data:image/png;base64,' + base64.b64encode(image).decode(),
            content[1]['image_url']['url'])

    def test_anthropic(self):
        """
        Anthropic answers are the concatenation of their text parts.
        """
        session = FakeSession(FakeResponse(200, {
            'content': [
                {'type': 'text', 'text': '<net>'},
                {'type': 'other'},
                {'type': 'text', 'text': '</net>'}]}))
        backend = LiveBackend(
            dict(settings('anthropic'), endpoint='http://localhost/x'),
            ENVIRONMENT, session)

        answer = backend.complete(TextQuery('system', 'user'))

        request = session.requests[0]
        self.assertEqual('<net></net>', answer)
        self.assertEqual('http://localhost/x', request['url'])
        self.assertEqual('secret', request['headers']['x-api-key'])
        self.assertEqual('system', request['json']['system'])
        self.assertEqual(
            [{'type': 'text', 'text': 'user'}],
            request['json']['messages'][0]['content'])

    def test_transient_failures(self):
        """
        Rate limiting, server errors and connection problems are transient.
        """
        session = FakeSession(
            FakeResponse(429), FakeResponse(503),
            requests.ConnectionError('refused'), requests.Timeout('slow'))
        backend = LiveBackend(settings('openai'), ENVIRONMENT, session)

        for i in range(4):
            with self.assertRaises(TransientBackendError):
                backend.complete(TextQuery('system', 'user'))

    def test_client_error(self):
        """
        Other HTTP errors are not retried.
        """
        session = FakeSession(FakeResponse(400, text='bad request'))
        backend = LiveBackend(settings('openai'), ENVIRONMENT, session)

        with self.assertRaises(BackendError) as c:
            backend.complete(TextQuery('system', 'user'))

        self.assertNotIsInstance(c.exception, TransientBackendError)
        self.assertIn('bad request', str(c.exception))

    def test_unexpected_body(self):
        """
        An answer without the expected fields is an error.
        """
        session = FakeSession(FakeResponse(200, {'choices': []}))
        backend = LiveBackend(settings('openai'), ENVIRONMENT, session)

        with self.assertRaises(BackendError):
            backend.complete(TextQuery('system', 'user'))

    def test_unknown_provider(self):
        """
        Only known providers can be used.
        """
        with self.assertRaises(BackendError):
            LiveBackend(settings('nobody'), ENVIRONMENT, FakeSession())

    def test_missing_key(self):
        """
        A missing credential fails before any request.
        """
        session = FakeSession()

        with self.assertRaises(ConfigurationError):
            LiveBackend(settings('openai'), Environment({}), session)
        self.assertEqual([], session.requests)


load_tests = inelegant.finder.TestFinder(
    __name__,
    backends
).load_tests

if __name__ == "__main__":
    unittest.main()
