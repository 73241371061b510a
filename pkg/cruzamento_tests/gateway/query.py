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

import cv2
import inelegant.finder
import numpy as np

from cruzamento.errors import ValidationError
from cruzamento.gateway import query
from cruzamento.gateway.query import TextQuery, VisionQuery


def png(value=0):
    ok, buffer = cv2.imencode('.png', np.full((4, 4), value, np.uint8))
    return buffer.tobytes()


class TestTextQuery(unittest.TestCase):

    def test_hash_ignores_context(self):
        """
        The context is for offline backends only, so it does not change the
        hash.
        """
        a = TextQuery('system', 'user', context={'description': 'a'})
        b = TextQuery('system', 'user', context={'description': 'b'})

        self.assertEqual(a.query_hash, b.query_hash)

    def test_hash_depends_on_seed(self):
        """
        Queries asked with different seeds are different queries.
        """
        self.assertNotEqual(
            TextQuery('system', 'user', request_seed=1).query_hash,
            TextQuery('system', 'user', request_seed=2).query_hash)

    def test_empty_user_prompt(self):
        """
        The user prompt must not be empty either.
        """
        with self.assertRaises(ValidationError) as c:
            TextQuery('system', '')

        self.assertEqual('user_prompt', c.exception.field_path)

    def test_max_tokens(self):
        """
        ``max_tokens`` must be a positive integer.
        """
        for value in (0, -5, 2.5):
            with self.assertRaises(ValidationError):
                TextQuery('system', 'user', max_tokens=value)

    def test_seed_fits_64_bits(self):
        """
        Seeds are kept as unsigned 64-bit integers.
        """
        self.assertEqual(
            2 ** 64 - 1, TextQuery('s', 'u', request_seed=-1).request_seed)


class TestVisionQuery(unittest.TestCase):

    def test_image_changes_hash(self):
        """
        Two vision queries with different images have different hashes.
        """
        self.assertNotEqual(
            VisionQuery('system', 'user', png(0)).query_hash,
            VisionQuery('system', 'user', png(255)).query_hash)

    def test_extra_images(self):
        """
        Extra images come after the main one and change the hash.
        """
        plain = VisionQuery('system', 'user', png(0))
        extra = VisionQuery(
            'system', 'user', png(0), extra_images=[png(9)])

        self.assertEqual((png(0), png(9)), extra.images)
        self.assertNotEqual(plain.query_hash, extra.query_hash)

    def test_bad_extra_image(self):
        """
        Extra images must decode as well.
        """
        with self.assertRaises(ValidationError) as c:
            VisionQuery('system', 'user', png(), extra_images=[b''])

        self.assertEqual('extra_images.0', c.exception.field_path)

    def test_kinds(self):
        """
        Queries know their kind, so the gateway can route them.
        """
        self.assertEqual('text', TextQuery('s', 'u').kind)
        self.assertEqual('vision', VisionQuery('s', 'u', png()).kind)


load_tests = inelegant.finder.TestFinder(
    __name__,
    query
).load_tests

if __name__ == "__main__":
    unittest.main()
