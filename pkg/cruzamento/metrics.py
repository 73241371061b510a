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
How good generated scenarios are.

Realism
    generated scenarios are compared to a real one vehicle by vehicle, with
    the average and final displacement errors (ADE and FDE), and the best and
    mean errors over several samples are kept.
Diversity
    scenarios of a dataset are paired at random and the squared distances
    between all their (canonicalized) trajectories are summed; the mean over
    pairs is the diversity of the dataset, usually given as a ratio to the
    diversity of a reference dataset.
Driving
    a driving policy controls the target vehicle of every scenario and its
    collision rate, driven distance, comfort and trajectory spread are
    measured.

Trajectories are ``Trajectory`` objects or arrays of positions::

    >>> a = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    >>> ade(a, a + (0, 1)), fde(a, a + (0, 1))
    (1.0, 1.0)
"""
import collections
import json
import math

import numpy as np

from cruzamento.errors import ValidationError
from cruzamento.rollout.legality import first_collision
from cruzamento.scenario import canonicalize

COMFORT_FLOOR = 1e-3
TABLE_COLUMNS = (
    'min-sADE', 'min-sFDE', 'mean-sADE', 'mean-sFDE', 'diversity', 'CR',
    'Dis', 'Comfort', 'Div')


def _positions(trajectory):
    positions = getattr(trajectory, 'positions', trajectory)
    return np.asarray(positions, dtype=np.float64)


def _paired(a, b):
    a, b = _positions(a), _positions(b)
    if a.shape != b.shape:
        raise ValidationError(
            'trajectories of {0} and {1} states cannot be compared'.format(
                len(a), len(b)),
            field_path='trajectories')
    return a, b


def ade(a, b):
    a, b = _paired(a, b)
    return float(np.mean(np.linalg.norm(a - b, axis=1)))


def fde(a, b):
    """
    The distance between the last positions. A straight run compared with
    itself reversed ends as far away as it is long::

        >>> run = np.array([[0.0, 0.0], [5.0, 0.0], [10.0, 0.0]])
        >>> fde(run, run[::-1])
        10.0
    """
    a, b = _paired(a, b)
    return float(np.linalg.norm(a[-1] - b[-1]))


def _check_vehicle_sets(real, sample):
    real_ids = sorted(v.id for v in real.vehicles)
    sample_ids = sorted(v.id for v in sample.vehicles)
    if real_ids != sample_ids:
        raise ValidationError(
            'sample vehicles {0} differ from real vehicles {1}'.format(
                sample_ids, real_ids),
            field_path='vehicles')


def scenario_errors(real, sample):
    """
    The scenario ADE and FDE: per-vehicle errors averaged over vehicles.
    """
    _check_vehicle_sets(real, sample)
    ades, fdes = [], []
    for vehicle in real.vehicles:
        a = real.trajectories[vehicle.id]
        b = sample.trajectories[vehicle.id]
        ades.append(ade(a, b))
        fdes.append(fde(a, b))
    return float(np.mean(ades)), float(np.mean(fdes))


class RealismStats(collections.namedtuple(
        'RealismStats',
        ('min_sade', 'min_sfde', 'mean_sade', 'mean_sfde', 'samples'))):
    """
    Best and mean scenario errors over ``samples`` generated scenarios, in
    meters.
    """
    __slots__ = ()

    @staticmethod
    def combine(stats):
        """
        Averages the stats of several real scenarios.
        """
        stats = list(stats)
        if not stats:
            raise ValidationError(
                'no realism stats to combine', field_path='stats')
        return RealismStats(
            *[float(np.mean([getattr(s, f) for s in stats]))
              for f in RealismStats._fields[:4]],
            samples=sum(s.samples for s in stats))


def realism_stats(real, samples):
    samples = list(samples)
    if not samples:
        raise ValidationError(
            'at least one sample is needed', field_path='samples')
    errors = np.array([scenario_errors(real, s) for s in samples])
    return RealismStats(
        float(errors[:, 0].min()), float(errors[:, 1].min()),
        float(errors[:, 0].mean()), float(errors[:, 1].mean()),
        len(samples))


def representative_samples(references, samples):
    """
    For every real scenario in ``references``, the one of its ``samples``
    (a list per real scenario) with the smallest scenario ADE.
    """
    chosen = []
    for real, candidates in zip(references, samples):
        errors = [scenario_errors(real, s)[0] for s in candidates]
        chosen.append(candidates[int(np.argmin(errors))])
    return chosen


def _canonical_positions(scenario, count):
    return np.stack([
        canonicalize(t).positions
        for t in scenario.ordered_trajectories()[:count]])


def pair_difference(first, second):
    """
    The joint state difference of two scenarios: the squared position
    differences of every vehicle of one against every vehicle of the other,
    summed over timesteps and pairs, after canonicalizing every trajectory.
    With different numbers of vehicles only the first vehicles of the
    larger scenario, in vehicle order, take part.
    """
    count = min(len(first.vehicles), len(second.vehicles))
    a = _canonical_positions(first, count)
    b = _canonical_positions(second, count)
    if a.shape[1] != b.shape[1]:
        raise ValidationError(
            'scenarios of {0} and {1} states cannot be compared'.format(
                a.shape[1], b.shape[1]),
            field_path='trajectories')
    differences = a[:, None] - b[None, :]
    return float(np.sum(differences * differences))


class DiversityResult(collections.namedtuple(
        'DiversityResult',
        ('value', 'baseline', 'ratio', 'relative_error', 'pairs'))):
    """
    The diversity of a dataset in square meters, the diversity of the
    baseline it is compared to, their ratio and the ratio minus one.
    """
    __slots__ = ()


def random_pairs(count, seed=0):
    """
    A seeded random pairing of ``count`` items. With an odd count one item is
    left out::

        >>> len(random_pairs(5, seed=3))
        2
    """
    order = np.random.default_rng(seed).permutation(count)
    return [
        (int(order[i]), int(order[i + 1]))
        for i in range(0, count - 1, 2)]


def _mean_difference(scenarios, pairs):
    if not pairs:
        raise ValidationError(
            'diversity needs at least two scenarios', field_path='scenarios')
    return float(np.mean([
        pair_difference(scenarios[i], scenarios[j]) for i, j in pairs]))


def dataset_diversity(scenarios, seed=0, baseline=None, pairs=None):
    """
    The mean joint state difference over a random pairing of ``scenarios``.
    ``baseline`` is a number or a list of scenarios, paired with the same
    seed; without one the dataset is its own baseline. ``pairs`` replaces
    the random pairing.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ValidationError('empty dataset', field_path='scenarios')
    pairs = pairs if pairs is not None else random_pairs(len(scenarios), seed)
    value = _mean_difference(scenarios, pairs)

    if baseline is None:
        base = value
    elif isinstance(baseline, (int, float)):
        base = float(baseline)
    else:
        baseline = list(baseline)
        base = _mean_difference(
            baseline, random_pairs(len(baseline), seed))

    if base > 0:
        ratio = value / base
    else:
        ratio = 1.0 if value == base else math.inf
    return DiversityResult(value, base, ratio, ratio - 1.0, len(pairs))


class DrivingMetrics(collections.namedtuple(
        'DrivingMetrics', ('cr', 'dis', 'comfort', 'div', 'scenarios'))):
    """
    Collision rate of the target, its mean driven distance in meters, the
    reciprocal of its mean absolute longitudinal acceleration, and the mean
    over timesteps of the spread of its canonicalized positions.
    """
    __slots__ = ()


def target_collides(scenario):
    target = scenario.target
    trajectory = scenario.trajectories[target.id]
    return any(
        first_collision(
            trajectory, target, scenario.trajectories[v.id], v) is not None
        for v in scenario.vehicles if v.id != target.id)


def driving_metrics(scenarios):
    """
    A target driving at constant speed covers speed times duration::

        >>> from cruzamento.scenario import (
        ...     Scenario, Trajectory, VehicleAttributes, VehicleState)
        >>> states = [VehicleState(i, 0, 0, 10) for i in range(101)]
        >>> target = VehicleAttributes(
        ...     0, 'car', 4.5, 1.8, 1.5, states[0], True)
        >>> scenario = Scenario(
        ...     None, [target], {0: Trajectory.from_states(states)})
        >>> metrics = driving_metrics([scenario])
        >>> metrics.cr, metrics.dis, metrics.div
        (0.0, 100.0, 0.0)
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ValidationError('no scenarios', field_path='scenarios')

    collisions, distances, accels, canonical = 0, [], [], []
    for scenario in scenarios:
        trajectory = scenario.trajectories[scenario.target.id]
        collisions += target_collides(scenario)
        steps = np.diff(trajectory.positions, axis=0)
        distances.append(float(np.sum(np.linalg.norm(steps, axis=1))))
        accels.append(np.abs(np.diff(trajectory.speeds)) / trajectory.dt)
        canonical.append(canonicalize(trajectory).positions)

    mean_accel = float(np.mean(np.concatenate(accels))) \
        if any(len(a) for a in accels) else 0.0
    lengths = {len(c) for c in canonical}
    if len(lengths) != 1:
        raise ValidationError(
            'target trajectories differ in length', field_path='scenarios')
    spread = np.std(np.stack(canonical), axis=0).sum(axis=1)

    return DrivingMetrics(
        collisions / len(scenarios), float(np.mean(distances)),
        1.0 / max(mean_accel, COMFORT_FLOOR), float(np.mean(spread)),
        len(scenarios))


class MetricsReport(object):
    """
    The metrics of one evaluation, any of which may be missing::

        >>> report = MetricsReport(driving=DrivingMetrics(0.25, 80, 2, 1, 4))
        >>> print(report.table())
        name      CR      Dis     Comfort Div
        generated 0.250   80.000  2.000   1.000
    """

    def __init__(
            self, realism=None, diversity=None, driving=None, name='generated',
            metadata=None):
        self.realism = realism
        self.diversity = diversity
        self.driving = driving
        self.name = name
        self.metadata = dict(metadata or {})

    def values(self):
        values = collections.OrderedDict()
        if self.realism is not None:
            values['min-sADE'] = self.realism.min_sade
            values['min-sFDE'] = self.realism.min_sfde
            values['mean-sADE'] = self.realism.mean_sade
            values['mean-sFDE'] = self.realism.mean_sfde
        if self.diversity is not None:
            values['diversity'] = self.diversity.ratio
        if self.driving is not None:
            values['CR'] = self.driving.cr
            values['Dis'] = self.driving.dis
            values['Comfort'] = self.driving.comfort
            values['Div'] = self.driving.div
        return values

    def to_dict(self):
        document = {'name': self.name, 'metadata': self.metadata}
        for key in ('realism', 'diversity', 'driving'):
            value = getattr(self, key)
            document[key] = None if value is None else value._asdict()
        return document

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + '\n'

    def table(self, others=()):
        """
        A text table with one row for this report and one for every report
        in ``others``, with the columns this report has.
        """
        reports = [self] + list(others)
        columns = [c for c in TABLE_COLUMNS if c in self.values()]
        width = max([len('name')] + [len(r.name) for r in reports])
        lines = [' '.join(
            ['name'.ljust(width)] + [c.ljust(7) for c in columns]).rstrip()]
        for report in reports:
            values = report.values()
            cells = [
                '{0:.3f}'.format(values[c]).ljust(7) if c in values
                else '-'.ljust(7)
                for c in columns]
            lines.append(' '.join([report.name.ljust(width)] + cells).rstrip())
        return '\n'.join(lines)
