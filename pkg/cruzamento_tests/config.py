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
import os
import tempfile
import unittest

import inelegant.finder

from cruzamento import config
from cruzamento.config import Configuration, Environment
from cruzamento.errors import ConfigurationError, UsageError


class TestConfiguration(unittest.TestCase):

    def test_load_none(self):
        """
        Without a file the defaults are used.
        """
        self.assertEqual(Configuration(), Configuration.load(None))

    def test_load_file(self):
        """
        A TOML file should replace the values it names.
        """
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'settings.toml')
            with open(path, 'w') as f:
                f.write('[rollout]\nretries = 2\n\n[gateway.vision]\n'
                        'model = "other"\n')

            c = Configuration.load(path)

        self.assertEqual(2, c.get('rollout.retries'))
        self.assertEqual('other', c.get('gateway.vision.model'))
        self.assertEqual(0.0, c.get('gateway.vision.temperature'))

    def test_load_missing_file(self):
        """
        A missing file is a usage error.
        """
        with self.assertRaises(UsageError):
            Configuration.load('/nonexistent/settings.toml')

    def test_invalid_toml(self):
        """
        Invalid TOML is a usage error.
        """
        with self.assertRaises(UsageError):
            Configuration.from_toml('[rollout\n')

    def test_override_converts(self):
        """
        String overrides should be converted to the type of the default.
        """
        c = Configuration().override({
            'planner.use_map': 'false', 'legality.max_accel': '5',
            'gateway.text.backend': 'live'})

        self.assertIs(False, c.get('planner.use_map'))
        self.assertEqual(5.0, c.get('legality.max_accel'))
        self.assertEqual('live', c.get('gateway.text.backend'))

    def test_override_bad_value(self):
        """
        Values that do not convert should be refused.
        """
        with self.assertRaises(UsageError):
            Configuration().override({'rollout.retries': 'many'})

    def test_override_unknown_key(self):
        """
        Unknown keys should be refused.
        """
        with self.assertRaises(UsageError):
            Configuration().override({'rollout.retrys': '2'})

    def test_override_ignores_none(self):
        """
        ``None`` values leave the setting alone.
        """
        c = Configuration().override({'rollout.retries': None})

        self.assertEqual(Configuration(), c)

    def test_section_must_be_table(self):
        """
        Sections cannot be replaced by plain values.
        """
        with self.assertRaises(UsageError):
            Configuration({'planner': 3})

    def test_get_returns_copy(self):
        """
        Changing what ``get()`` returns should not change the configuration.
        """
        c = Configuration()
        c.get('planner')['dim'] = 1

        self.assertEqual(256, c.get('planner.dim'))


class TestEnvironment(unittest.TestCase):

    def test_empty_key(self):
        """
        An empty credential is as good as a missing one.
        """
        with self.assertRaises(ConfigurationError) as context:
            Environment({'CRUZAMENTO_TEXT_API_KEY': ''}).api_key(
                'CRUZAMENTO_TEXT_API_KEY')
        self.assertEqual(3, context.exception.exit_code)

    def test_slow_tests_default(self):
        """
        Slow tests are off unless asked for.
        """
        self.assertFalse(Environment({}).slow_tests)


load_tests = inelegant.finder.TestFinder(
    __name__,
    config
).load_tests

if __name__ == "__main__":
    unittest.main()
