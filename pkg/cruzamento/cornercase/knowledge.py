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
Knowledge prompts: what the collisions of a policy have in common, told to
the model that selects goals, with pictures of a few of them.
"""
import collections
import logging
import math

from cruzamento.errors import ValidationError
from cruzamento.prompts import load_prompt

logger = logging.getLogger(__name__)

DEFAULT_IMAGES = 2


class KnowledgeFragment(collections.namedtuple(
        'KnowledgeFragment', ('text', 'images', 'context'))):
    """
    Text added to the goal-selection prompt, exemplar PNG images sent with
    it and the structured summary offline backends rank with.
    """
    __slots__ = ()

    def __new__(cls, text='', images=(), context=None):
        return super(KnowledgeFragment, cls).__new__(
            cls, text, tuple(images), dict(context or {}))

    def __bool__(self):
        return bool(self.text or self.images or self.context)


def describe_cell(stats, cell):
    speed, heading, behavior = cell
    speed_low, speed_high = stats.speed_bounds(speed)
    heading_low, heading_high = stats.heading_bounds(heading)
    return (
        '- {0} of {1} collisions ({2:.0%}) happened with a {3} vehicle, '
        'at a relative speed in [{4:.1f}, {5:.1f}) m/s and a relative '
        'heading in [{6:.3f}, {7:.3f}) rad'.format(
            stats.histogram[cell], stats.total, stats.share(cell),
            behavior.replace('_', ' '), speed_low, speed_high, heading_low,
            heading_high))


def build_knowledge_prompt(stats, records=(), k_images=DEFAULT_IMAGES):
    """
    Builds the ``KnowledgeFragment`` for ``stats``: the most frequent
    feature cell with its share of the collisions, how often each behavior
    was involved, and the snapshots of up to ``k_images`` records, the ones
    in the most frequent cell first::

        >>> from cruzamento.cornercase.failures import (
        ...     CollisionRecord, FailureFeatureStats)
        >>> records = [CollisionRecord('a', 30, 5.0, 1.6, 'crossing')]
        >>> fragment = build_knowledge_prompt(
        ...     FailureFeatureStats.from_records(records), records, 0)
        >>> print(fragment.text.splitlines()[2])
        - 1 of 1 collisions (100%) happened with a crossing vehicle, at a \
relative speed in [4.0, 6.0) m/s and a relative heading in [1.571, 1.963) rad
        >>> fragment.images, fragment.context['behavior']
        ((), 'crossing')

    Without collisions there is nothing to tell::

        >>> build_knowledge_prompt(FailureFeatureStats())
        Traceback (most recent call last):
          ...
        cruzamento.errors.ValidationError: stats: no collision was recorded
    """
    if not stats:
        raise ValidationError(
            'no collision was recorded', field_path='stats')
    cell = stats.argmax()
    lines = [describe_cell(stats, cell)]
    counts = stats.behavior_counts()
    for behavior in sorted(counts, key=lambda b: (-counts[b], b)):
        lines.append('- {0:.0%} of the collisions involved a {1} vehicle'
                     .format(counts[behavior] / stats.total,
                             behavior.replace('_', ' ')))
    text = load_prompt('corner_case').format(summary='\n'.join(lines))

    exemplars = sorted(
        (r for r in records if r.snapshot),
        key=lambda r: (r.cell != cell, r.scenario_id, r.timestep))
    images = [r.snapshot for r in exemplars[:max(k_images, 0)]]

    speed, heading, behavior = cell
    context = {
        'behavior': behavior,
        'speed_bin': list(stats.speed_bounds(speed)),
        'heading_bin': list(stats.heading_bounds(heading)),
        'relative_heading': (
            stats.heading_bounds(heading)[0] + math.pi / 16),
        'share': stats.share(cell),
        'total': stats.total,
    }
    logger.debug('knowledge for %d collisions: %s', stats.total, cell)
    return KnowledgeFragment(text, images, context)
