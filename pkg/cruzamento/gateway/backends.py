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
Model backends answer queries. Any object with a ``complete(query)`` method
returning text is a backend; this module has the ones Cruzamento ships:

``MockVisionBackend``
    Ranks goal candidates with a heuristic, offline.
``TemplateTextBackend``
    Answers map requests with the map template the description names.
``ScriptedTextBackend``
    Replays a fixed list of answers, one per call.
``ReplayBackend``
    Answers queries recorded in a transcript.
``LiveBackend``
    Calls a hosted model over HTTP.
"""
import base64
import logging
import re

import requests

from cruzamento.errors import (
    BackendError, ParameterError, ReplayMiss, TransientBackendError)
from cruzamento.gateway.goals import mock_goal_selector
from cruzamento.interfaces import TranscriptAwareBackend

logger = logging.getLogger(__name__)


class MockVisionBackend(object):
    """
    Answers goal-selection queries from the structured context attached to
    them, with the heuristic of ``mock_goal_selector()``. The answer depends
    only on the query and its seed::

        >>> import collections
        >>> from cruzamento.scenario import VehicleState
        >>> Candidate = collections.namedtuple('Candidate', 'number position')
        >>> class Query(object):
        ...     request_seed = 0
        ...     context = {
        ...         'task': 'goal_selection',
        ...         'state': VehicleState(0, 0, 0, 10),
        ...         'candidates': [Candidate(1, (100, 0))]}
        >>> print(MockVisionBackend().complete(Query()), end='')
        RANKING: 1
        RATIONALE: heading alignment and reachable distance

    Adversarial queries (the ones carrying failure knowledge) are ranked by
    predicted conflict with the target vehicle instead.
    """

    def complete(self, query):
        context = getattr(query, 'context', None) or {}
        task = context.get('task')
        if task == 'goal_selection' and context.get('adversarial'):
            from cruzamento.cornercase.adversarial import adversarial_ranking
            response = adversarial_ranking(
                context['state'], context['candidates'],
                context['adversarial'], query.request_seed)
        elif task == 'goal_selection':
            response = mock_goal_selector(
                context['state'], context['candidates'], query.request_seed)
        else:
            raise BackendError(
                'the mock vision backend only answers goal selection')
        return response.to_text()


TEMPLATE_KEYWORDS = (
    ('roundabout', ('roundabout', 'rotary', 'traffic circle')),
    ('on_ramp_merge', ('on-ramp', 'on ramp', 'ramp', 'merge', 'merging')),
    ('t_junction',
     ('t-junction', 't junction', 't_junction', 't-intersection')),
    ('highway', ('highway', 'motorway', 'freeway', 'straight road')),
    ('intersection', ('intersection', 'crossroad', 'crossing', '4-way')),
)


def template_request(description):
    """
    Recognizes a template kind and its parameters in a free text
    description::

        >>> template_request('A roundabout with radius 25 m')
        ('roundabout', {'radius': 25.0})
        >>> template_request('a 3-lane highway, 400 m long')
        ('highway', {'lanes': 3, 'length': 400.0})
        >>> template_request('an on-ramp that merges at 180 m')
        ('on_ramp_merge', {'merge_at': 180.0})
        >>> template_request('some road')
        ('intersection', {})
    """
    text = description.lower()
    kind = 'intersection'
    for candidate, keywords in TEMPLATE_KEYWORDS:
        if any(k in text for k in keywords):
            kind = candidate
            break

    params = {}
    lanes = re.search(r'(\d+)[\s-]*lanes?', text)
    if lanes:
        params['lanes'] = int(lanes.group(1))
    radius = re.search(r'radius\D{0,10}?(\d+(?:\.\d+)?)', text)
    if radius:
        params['radius'] = float(radius.group(1))
    length = re.search(r'(\d+(?:\.\d+)?)\s*m(?:eters?)?\s+long', text)
    if length:
        params['length'] = float(length.group(1))
    width = re.search(r'(\d+(?:\.\d+)?)\s*m(?:eters?)?\s+wide', text)
    if width:
        params['lane_width'] = float(width.group(1))
    merge = re.search(
        r'merg\w*(?:\s+point)?\s+(?:at|to)\s+(\d+(?:\.\d+)?)', text)
    if merge:
        params['merge_at'] = float(merge.group(1))
    return kind, params


class TemplateTextBackend(object):
    """
    Answers map-synthesis queries by generating the template the description
    asks for. The description is read from the query context or from the
    ``DESCRIPTION:`` line of the prompt. Parameters found in the feedback
    replace the ones in the description, and out-of-range parameters are
    clamped to the closest valid value.
    """

    def complete(self, query):
        from cruzamento.mapsynth import clamp_params, generate_template_map
        from cruzamento.roadnet.xmlio import emit_network

        context = query.context or {}
        description = context.get('description')
        if description is None:
            match = re.search(r'^DESCRIPTION:(.*)$', query.user_prompt, re.M)
            description = match.group(1) if match else query.user_prompt
        kind, params = template_request(description)
        if context.get('feedback'):
            params.update(template_request(context['feedback'])[1])
        try:
            network = generate_template_map(kind, clamp_params(kind, params))
        except ParameterError as e:
            raise BackendError('cannot build {0}: {1}'.format(kind, e))
        return '```xml\n{0}```\n'.format(emit_network(network))


class ScriptedTextBackend(object):
    """
    Returns the given answers in order, one per call::

        >>> backend = ScriptedTextBackend(['first', 'second'])
        >>> backend.complete(None), backend.complete(None)
        ('first', 'second')
        >>> backend.calls
        2
        >>> backend.complete(None)
        Traceback (most recent call last):
          ...
        cruzamento.errors.BackendError: script exhausted after 2 answers
    """

    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = 0

    def complete(self, query):
        if self.calls >= len(self.responses):
            raise BackendError(
                'script exhausted after {0} answers'.format(
                    len(self.responses)))
        response = self.responses[self.calls]
        self.calls += 1
        return response


class ReplayBackend(TranscriptAwareBackend):
    """
    Answers with the response recorded for the same query hash. The records
    come from ``source``, usually a transcript loaded from a file; without one
    the backend reads the transcript the gateway records into.
    """

    def __init__(self, source=None):
        self.source = source

    def complete(self, query):
        transcript = (
            self.source if self.source is not None else self.get_transcript())
        if query.query_hash not in transcript:
            raise ReplayMiss(query.query_hash)
        return transcript[query.query_hash]


class LiveBackend(object):
    """
    Calls a hosted model. ``provider`` is either ``openai`` (chat completions)
    or ``anthropic`` (messages). The credential is read when the backend is
    created, so a missing one fails before any network activity::

        >>> from cruzamento.config import Environment
        >>> LiveBackend(
        ...     {'provider': 'openai', 'model': 'm', 'endpoint': '',
        ...      'api_key_env': 'KEY', 'deadline': 60.0},
        ...     Environment({}))
        Traceback (most recent call last):
          ...
        cruzamento.errors.ConfigurationError: environment variable KEY is \
not set; export it or use a mock backend
    """

    ENDPOINTS = {
        'openai': 'https://api.openai.com/v1/chat/completions',
        'anthropic': 'https://api.anthropic.com/v1/messages',
    }

    def __init__(self, settings, environment, session=None):
        provider = settings.get('provider')
        if provider not in self.ENDPOINTS:
            raise BackendError('unknown provider {0!r}'.format(provider))
        self.api_key = environment.api_key(settings['api_key_env'])
        self.provider = provider
        self.model = settings['model']
        self.endpoint = settings.get('endpoint') or self.ENDPOINTS[provider]
        self.timeout = settings.get('deadline', 60.0)
        self.session = session if session is not None else requests.Session()

    def complete(self, query):
        if self.provider == 'openai':
            headers, payload = self._openai_request(query)
        else:
            headers, payload = self._anthropic_request(query)

        try:
            response = self.session.post(
                self.endpoint, json=payload, headers=headers,
                timeout=self.timeout)
        except (requests.ConnectionError, requests.Timeout) as e:
            raise TransientBackendError(str(e))

        if response.status_code == 429 or response.status_code >= 500:
            raise TransientBackendError(
                'HTTP {0} from {1}'.format(
                    response.status_code, self.provider))
        if response.status_code >= 400:
            raise BackendError(
                'HTTP {0} from {1}: {2}'.format(
                    response.status_code, self.provider, response.text[:200]))

        body = response.json()
        try:
            if self.provider == 'openai':
                return body['choices'][0]['message']['content']
            return ''.join(
                part['text'] for part in body['content']
                if part.get('type') == 'text')
        except (KeyError, IndexError, TypeError):
            raise BackendError(
                'unexpected answer format from {0}'.format(self.provider))

    def _openai_request(self, query):
        content = [{'type': 'text', 'text': query.user_prompt}]
        for image in getattr(query, 'images', ()):
            content.append({
                'type': 'image_url',
                'image_url': {
                    'url': 'data:image/png;base64,' + _base64(image)}
            })
        payload = {
            'model': self.model,
            'messages': [
                {'role': 'system', 'content': query.system_prompt},
                {'role': 'user', 'content': content},
            ],
            'temperature': query.temperature,
            'max_tokens': query.max_tokens,
            'seed': query.request_seed & 0x7FFFFFFFFFFFFFFF,
        }
        headers = {'Authorization': 'Bearer ' + self.api_key}
        return headers, payload

    def _anthropic_request(self, query):
        content = []
        for image in getattr(query, 'images', ()):
            content.append({
                'type': 'image',
                'source': {
                    'type': 'base64', 'media_type': 'image/png',
                    'data': _base64(image)}
            })
        content.append({'type': 'text', 'text': query.user_prompt})
        payload = {
            'model': self.model,
            'system': query.system_prompt,
            'messages': [{'role': 'user', 'content': content}],
            'temperature': query.temperature,
            'max_tokens': query.max_tokens,
        }
        headers = {
            'x-api-key': self.api_key,
            'anthropic-version': '2023-06-01',
        }
        return headers, payload


def _base64(data):
    return base64.b64encode(data).decode('ascii')
