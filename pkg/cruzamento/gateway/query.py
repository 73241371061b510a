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
A query holds everything a language model is asked in one call.

``TextQuery`` is used for map synthesis and ``VisionQuery``, which adds a PNG
image, for goal selection. Queries are identified by a hash of what is actually
sent, so a transcript recorded once can answer the same queries later::

    >>> q = TextQuery('You write road networks.', 'A roundabout.')
    >>> len(q.query_hash)
    64
    >>> q.query_hash == TextQuery('You write road networks.',
    ...                           'A roundabout.').query_hash
    True
    >>> q.query_hash == TextQuery('You write road networks.',
    ...                           'A highway.').query_hash
    False

Queries can also carry a ``context``: structured data offline backends use
instead of reading the prompt. It is not sent anywhere and not hashed.
"""
import hashlib
import json

import cv2
import numpy as np

from cruzamento.errors import ValidationError


class TextQuery(object):
    """
    A prompt for a text model. Prompts must not be empty and the sampling
    parameters must be in range::

        >>> TextQuery('', 'hello')
        Traceback (most recent call last):
          ...
        cruzamento.errors.ValidationError: system_prompt: must not be empty
        >>> TextQuery('system', 'hello', temperature=2)
        Traceback (most recent call last):
          ...
        cruzamento.errors.ValidationError: temperature: must be in [0, 1], \
got 2
    """

    kind = 'text'

    def __init__(
            self, system_prompt, user_prompt, temperature=0.0,
            max_tokens=4096, request_seed=0, context=None):
        if not system_prompt:
            raise ValidationError(
                'must not be empty', field_path='system_prompt')
        if not user_prompt:
            raise ValidationError(
                'must not be empty', field_path='user_prompt')
        if not 0 <= temperature <= 1:
            raise ValidationError(
                'must be in [0, 1], got {0!r}'.format(temperature),
                field_path='temperature')
        if not (isinstance(max_tokens, int) and max_tokens > 0):
            raise ValidationError(
                'must be a positive integer', field_path='max_tokens')

        self.system_prompt = system_prompt
        self.user_prompt = user_prompt
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.request_seed = int(request_seed) & 0xFFFFFFFFFFFFFFFF
        self.context = context if context is not None else {}

    def hashed_fields(self):
        return {
            'kind': self.kind,
            'system_prompt': self.system_prompt,
            'user_prompt': self.user_prompt,
            'temperature': self.temperature,
            'max_tokens': self.max_tokens,
            'request_seed': self.request_seed,
        }

    @property
    def query_hash(self):
        text = json.dumps(self.hashed_fields(), sort_keys=True)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()


class VisionQuery(TextQuery):
    """
    A prompt for a vision model, with a PNG image. The image must decode::

        >>> VisionQuery('system', 'user', b'not a png')
        Traceback (most recent call last):
          ...
        cruzamento.errors.ValidationError: image: cannot be decoded

    ``extra_images`` are sent after the main one, for example snapshots of
    earlier failures.
    """

    kind = 'vision'

    def __init__(
            self, system_prompt, user_prompt, image, temperature=0.0,
            max_tokens=512, request_seed=0, context=None, extra_images=()):
        TextQuery.__init__(
            self, system_prompt, user_prompt, temperature, max_tokens,
            request_seed, context)
        self.image = _check_image(image, 'image')
        self.extra_images = tuple(
            _check_image(extra, 'extra_images.{0}'.format(i))
            for i, extra in enumerate(extra_images))

    @property
    def images(self):
        return (self.image,) + self.extra_images

    @property
    def image_hash(self):
        digest = hashlib.sha256()
        for image in self.images:
            digest.update(hashlib.sha256(image).digest())
        return digest.hexdigest()

    def hashed_fields(self):
        fields = TextQuery.hashed_fields(self)
        fields['image_hash'] = self.image_hash
        return fields


def _check_image(image, field_path):
    buffer = np.frombuffer(image, dtype=np.uint8)
    if not len(buffer) or cv2.imdecode(buffer, cv2.IMREAD_COLOR) is None:
        raise ValidationError('cannot be decoded', field_path=field_path)
    return bytes(image)
