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
Cruzamento does not require its pluggable parts to inherit from any class. A
planner is anything with a ``plan()`` method, a goal selector anything with a
``select()`` method and a model backend anything with ``complete()``. This
module has the functions that recognize them, plus mixins for objects that want
to know about the transcript in use.
"""
import inspect


def _has_method(obj, name):
    attr = getattr(obj, name, None)

    return (
        not inspect.isclass(obj) and
        inspect.ismethod(attr)
    )


def has_plan_method(obj):
    """
    Returns ``True`` if its argument can plan trajectories::

        >>> class StraightPlanner(object):
        ...     def plan(self, network, state, goal, noise_seed):
        ...         pass
        >>> has_plan_method(StraightPlanner())
        True

    Classes themselves do not count, only their instances::

        >>> has_plan_method(StraightPlanner)
        False
    """
    return _has_method(obj, 'plan')


def has_select_method(obj):
    """
    Returns ``True`` if its argument can rank goal candidates::

        >>> class FirstSelector(object):
        ...     def select(self, request):
        ...         return [1]
        >>> has_select_method(FirstSelector())
        True
        >>> has_select_method(object())
        False
    """
    return _has_method(obj, 'select')


def has_complete_method(obj):
    """
    Returns ``True`` if its argument is a model backend::

        >>> class EchoBackend(object):
        ...     def complete(self, query):
        ...         return query.user_prompt
        >>> has_complete_method(EchoBackend())
        True
    """
    return _has_method(obj, 'complete')


def has_setter(obj, attr):
    """
    Returns ``True`` if the object has a setter for the given attribute::

        >>> class Backend(TranscriptAwareBackend):
        ...     pass
        >>> has_setter(Backend(), 'transcript')
        True
        >>> has_setter(Backend(), 'seed')
        False
    """
    return _has_method(obj, 'set_' + attr)


class TranscriptAwareBackend(object):
    """
    Backends extending this class receive the transcript store the gateway
    records into, so they can read earlier exchanges::

        >>> class CountingBackend(TranscriptAwareBackend):
        ...     def complete(self, query):
        ...         return str(len(self.get_transcript()))
        >>> backend = CountingBackend()
        >>> backend.set_transcript([])
        >>> backend.complete(None)
        '0'
    """

    def set_transcript(self, transcript):
        self.__transcript = transcript

    def get_transcript(self):
        return self.__transcript
