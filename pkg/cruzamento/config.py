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
Settings come from two places: a TOML configuration file, for everything that
changes how scenarios are generated, and the process environment, for
credentials.

A configuration starts from the defaults...

::

    >>> c = Configuration()
    >>> c.get('planner.diffusion_steps')
    100

...which a file or a mapping may replace, section by section::

    >>> c = Configuration({'planner': {'dim': 8}})
    >>> c.get('planner.dim'), c.get('planner.heads')
    (8, 4)

Unknown keys are refused, since they are most likely typos::

    >>> Configuration({'planner': {'dimm': 8}})
    Traceback (most recent call last):
      ...
    cruzamento.errors.UsageError: unknown configuration key planner.dimm
"""
import copy
import os
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from cruzamento.errors import ConfigurationError, UsageError

DEFAULTS = {
    'planner': {
        'dim': 256,
        'layers': 3,
        'heads': 4,
        'diffusion_steps': 100,
        'beta_start': 1e-3,
        'beta_end': 0.2,
        'raster_size': 256,
        'raster_resolution': 0.78125,
        'use_map': True,
        'smoothing_window': 5,
    },
    'training': {
        'learning_rate': 1e-4,
        'batch_size': 32,
        'epochs': 90,
        'seed': 0,
        'dataset_size': 1000,
    },
    'rollout': {
        'max_candidates': 8,
        'horizon': 10.0,
        'max_accel': 3.0,
        'band_split': 30.0,
        'retries': 5,
        'max_depth': 4,
        'goal_tolerance': 5.0,
    },
    'legality': {
        'max_accel': 8.0,
        'max_lateral_accel': 6.0,
        'on_road_margin': 0.5,
    },
    'assets': {
        'n_vehicles': 8,
        'radius': 50.0,
        'speed_band': 0.2,
        'bumper_gap': 2.0,
        'tries': 100,
    },
    'idm': {
        'time_headway': 1.5,
        'max_accel': 2.0,
        'comfortable_decel': 2.0,
        'min_gap': 2.0,
        'delta': 4.0,
        'lookahead': 100.0,
        'fallback_max_decel': 7.5,
    },
    'gateway': {
        'text': {
            'backend': 'template',
            'provider': 'anthropic',
            'model': 'claude-3-opus-20240229',
            'endpoint': '',
            'api_key_env': 'CRUZAMENTO_TEXT_API_KEY',
            'temperature': 0.0,
            'max_tokens': 4096,
            'retries': 3,
            'backoff': 1.0,
            'deadline': 60.0,
            'requests_per_minute': 30.0,
            'replay_path': '',
        },
        'vision': {
            'backend': 'mock',
            'provider': 'openai',
            'model': 'gpt-4-turbo',
            'endpoint': '',
            'api_key_env': 'CRUZAMENTO_VISION_API_KEY',
            'temperature': 0.0,
            'max_tokens': 512,
            'retries': 3,
            'backoff': 1.0,
            'deadline': 60.0,
            'requests_per_minute': 30.0,
            'replay_path': '',
        },
    },
    'map': {
        'max_repair_rounds': 3,
        'fillet_radius': 15.0,
    },
}


class Configuration(object):
    """
    A read-only view of the settings, with every default filled in. Values are
    reached by dotted keys::

        >>> Configuration().get('gateway.vision.backend')
        'mock'

    ``override()`` returns a new configuration, converting strings given on
    the command line to the type of the default::

        >>> c = Configuration().override({'rollout.retries': '2'})
        >>> c.get('rollout.retries')
        2
        >>> Configuration().get('rollout.retries')
        5
    """

    def __init__(self, values=None):
        self.values = copy.deepcopy(DEFAULTS)
        _merge(self.values, values or {}, ())

    @staticmethod
    def from_toml(text):
        try:
            return Configuration(tomllib.loads(text))
        except tomllib.TOMLDecodeError as e:
            raise UsageError('invalid configuration: {0}'.format(e))

    @staticmethod
    def load(path):
        if path is None:
            return Configuration()
        try:
            with open(path, 'rb') as f:
                values = tomllib.load(f)
        except OSError as e:
            raise UsageError('cannot read configuration: {0}'.format(e))
        except tomllib.TOMLDecodeError as e:
            raise UsageError('invalid configuration {0}: {1}'.format(path, e))
        return Configuration(values)

    def get(self, key):
        value = self.values
        for part in key.split('.'):
            try:
                value = value[part]
            except (KeyError, TypeError):
                raise UsageError('unknown configuration key {0}'.format(key))
        return copy.deepcopy(value)

    def __getitem__(self, section):
        return self.get(section)

    def override(self, overrides):
        """
        Returns a copy with the values of ``overrides`` (a mapping from dotted
        keys to values) replaced. ``None`` values are ignored, so unset
        command-line flags can be passed along.
        """
        values = copy.deepcopy(self.values)
        for key, value in sorted(overrides.items()):
            if value is None:
                continue
            *path, name = key.split('.')
            section = values
            for part in path:
                section = section.get(part)
                if not isinstance(section, dict):
                    raise UsageError(
                        'unknown configuration key {0}'.format(key))
            if name not in section:
                raise UsageError('unknown configuration key {0}'.format(key))
            section[name] = _coerce(key, section[name], value)
        return Configuration(values)

    def as_dict(self):
        return copy.deepcopy(self.values)

    def __eq__(self, other):
        return isinstance(other, Configuration) and self.values == other.values

    def __ne__(self, other):
        return not self == other


def _merge(target, values, path):
    for key, value in values.items():
        dotted = '.'.join(path + (key,))
        if key not in target:
            raise UsageError('unknown configuration key {0}'.format(dotted))
        if isinstance(target[key], dict):
            if not isinstance(value, dict):
                raise UsageError(
                    'configuration key {0} must be a table'.format(dotted))
            _merge(target[key], value, path + (key,))
        else:
            target[key] = _coerce(dotted, target[key], value)


def _coerce(key, default, value):
    kind = type(default)
    if isinstance(value, kind):
        return value
    try:
        if kind is bool and isinstance(value, str):
            if value.lower() in ('true', 'yes', '1'):
                return True
            if value.lower() in ('false', 'no', '0'):
                return False
            raise ValueError(value)
        if kind is float and isinstance(value, int):
            return float(value)
        if isinstance(value, str):
            return kind(value)
    except ValueError:
        pass
    raise UsageError(
        'configuration key {0} expects {1}, got {2!r}'.format(
            key, kind.__name__, value))


class Environment(object):
    """
    ``Environment`` gives access to the credentials in the process
    environment. It reads ``os.environ`` unless given another mapping::

        >>> e = Environment({'CRUZAMENTO_TEXT_API_KEY': 'secret'})
        >>> e.api_key('CRUZAMENTO_TEXT_API_KEY')
        'secret'

    A missing credential is a configuration error, raised before any network
    activity::

        >>> Environment({}).api_key('CRUZAMENTO_VISION_API_KEY')
        Traceback (most recent call last):
          ...
        cruzamento.errors.ConfigurationError: environment variable \
CRUZAMENTO_VISION_API_KEY is not set; export it or use a mock backend

    It also tells whether the slow acceptance runs were asked for::

        >>> Environment({'CRUZAMENTO_SLOW_TESTS': '1'}).slow_tests
        True
    """

    def __init__(self, env_dict=None):
        if env_dict is None:
            env_dict = os.environ
        self.env_dict = env_dict
        self.slow_tests = env_dict.get('CRUZAMENTO_SLOW_TESTS', '') == '1'

    def api_key(self, variable):
        value = self.env_dict.get(variable)
        if not value:
            raise ConfigurationError(
                'environment variable {0} is not set; export it or use a '
                'mock backend'.format(variable))
        return value
