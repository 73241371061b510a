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
Polyline helpers used by lanes, routes and trajectories.

A ``Polyline`` is an immutable sequence of 2-D points. It answers questions
along its arc length: where is the point ``s`` meters from the start, what is
the heading there, and how far along is the projection of some point::

    >>> line = Polyline([(0, 0), (10, 0), (10, 10)])
    >>> line.length
    20.0
    >>> line.point_at(15).tolist()
    [10.0, 5.0]
    >>> round(line.heading_at(15), 6)
    1.570796
    >>> line.project((12, 3))
    13.0
"""
import math

import numpy as np
import shapely.geometry

MIN_SEGMENT = 1e-9


def dedupe(points):
    """
    Removes consecutive repeated points::

        >>> dedupe([(0, 0), (0, 0), (1, 0)]).tolist()
        [[0.0, 0.0], [1.0, 0.0]]
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(points) < 2:
        return points
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    keep = np.concatenate([[True], steps > MIN_SEGMENT])
    return points[keep]


def densify(points, spacing=1.0):
    """
    Inserts points so that no two consecutive points are farther apart than
    ``spacing``::

        >>> densify([(0, 0), (3, 0)], spacing=1.0).tolist()
        [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]
    """
    points = dedupe(points)
    if len(points) < 2:
        return points
    result = [points[:1]]
    for a, b in zip(points[:-1], points[1:]):
        pieces = max(1, int(math.ceil(np.linalg.norm(b - a) / spacing)))
        fractions = np.arange(1, pieces + 1)[:, None] / pieces
        result.append(a + (b - a) * fractions)
    return np.concatenate(result)


def fillet(points, radius, spacing=1.0):
    """
    Rounds the corners of a polyline with circular arcs of at most ``radius``
    meters. An arc never uses more than 45% of either adjacent segment, so the
    end points stay where they are::

        >>> rounded = fillet([(0, 0), (20, 0), (20, 20)], radius=5)
        >>> rounded[0].tolist(), rounded[-1].tolist()
        ([0.0, 0.0], [20.0, 20.0])

    The corner itself is cut::

        >>> corner = np.array([20.0, 0.0])
        >>> bool(np.min(np.linalg.norm(rounded - corner, axis=1)) > 1)
        True
    """
    points = dedupe(points)
    if len(points) < 3:
        return densify(points, spacing)

    result = [points[0]]
    for p0, p1, p2 in zip(points[:-2], points[1:-1], points[2:]):
        d1, d2 = p1 - p0, p2 - p1
        l1, l2 = np.linalg.norm(d1), np.linalg.norm(d2)
        u1, u2 = d1 / l1, d2 / l2
        turn = math.atan2(u1[0] * u2[1] - u1[1] * u2[0], np.dot(u1, u2))
        if abs(turn) < 1e-6 or abs(turn) > math.pi - 1e-6:
            result.append(p1)
            continue

        half = math.tan(abs(turn) / 2)
        tangent = min(radius * half, 0.45 * l1, 0.45 * l2)
        arc_radius = tangent / half
        start = p1 - u1 * tangent
        left = np.array([-u1[1], u1[0]])
        center = start + math.copysign(arc_radius, turn) * left

        start_angle = math.atan2(start[1] - center[1], start[0] - center[0])
        count = max(2, int(math.ceil(arc_radius * abs(turn) / spacing)) + 1)
        angles = start_angle + turn * np.linspace(0, 1, count)
        arc = center + arc_radius * np.column_stack(
            [np.cos(angles), np.sin(angles)])
        result.extend(arc)
    result.append(points[-1])

    return densify(np.array(result), spacing)


class Polyline(object):
    """
    An immutable polyline with arc-length queries. Consecutive duplicate points
    are removed; at least two distinct points must remain::

        >>> Polyline([(1, 1), (1, 1)])
        Traceback (most recent call last):
          ...
        ValueError: a polyline needs at least two distinct points
    """

    def __init__(self, points):
        points = dedupe(points)
        if len(points) < 2:
            raise ValueError('a polyline needs at least two distinct points')
        points.setflags(write=False)
        self.points = points

        steps = np.diff(points, axis=0)
        lengths = np.linalg.norm(steps, axis=1)
        self.cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
        self.cumulative.setflags(write=False)
        self.segment_headings = np.arctan2(steps[:, 1], steps[:, 0])
        self.segment_headings.setflags(write=False)
        self.length = float(self.cumulative[-1])
        self._line = None

    @property
    def line(self):
        if self._line is None:
            self._line = shapely.geometry.LineString(self.points)
        return self._line

    def _segment(self, s):
        index = np.searchsorted(self.cumulative, s, side='right') - 1
        return np.clip(index, 0, len(self.points) - 2)

    def point_at(self, s):
        """
        Returns the point (or points, for an array of arc lengths) at ``s``
        meters from the start. Values outside ``[0, length]`` are clamped.
        """
        s = np.clip(s, 0.0, self.length)
        x = np.interp(s, self.cumulative, self.points[:, 0])
        y = np.interp(s, self.cumulative, self.points[:, 1])
        return np.stack([x, y], axis=-1)

    def heading_at(self, s):
        s = np.clip(s, 0.0, self.length)
        headings = self.segment_headings[self._segment(s)]
        if np.ndim(headings) == 0:
            return float(headings)
        return headings

    def project(self, point):
        """
        Returns the arc length of the point of this polyline closest to
        ``point``.
        """
        return float(self.line.project(shapely.geometry.Point(point)))

    def distance(self, point):
        return float(self.line.distance(shapely.geometry.Point(point)))

    def _closest(self, points):
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        a = self.points[:-1][None, :, :]
        d = np.diff(self.points, axis=0)[None, :, :]
        p = points[:, None, :]
        lengths2 = np.maximum(np.sum(d * d, axis=-1), MIN_SEGMENT)
        t = np.clip(np.sum((p - a) * d, axis=-1) / lengths2, 0.0, 1.0)
        closest = a + d * t[..., None]
        distances = np.linalg.norm(p - closest, axis=-1)
        segment = np.argmin(distances, axis=1)
        rows = np.arange(len(points))
        return distances[rows, segment], segment, t[rows, segment]

    def distances(self, points):
        """
        Vectorized distance from many points to the polyline.
        """
        return self._closest(points)[0]

    def projections(self, points):
        """
        Vectorized ``project()``::

            >>> Polyline([(0, 0), (10, 0), (10, 10)]).projections(
            ...     [(12, 3), (-1, 0)]).tolist()
            [13.0, 0.0]
        """
        _, segment, t = self._closest(points)
        lengths = np.diff(self.cumulative)
        return self.cumulative[segment] + t * lengths[segment]

    def slice(self, start, end=None):
        """
        Returns the part of the polyline between two arc lengths::

            >>> Polyline([(0, 0), (10, 0)]).slice(2, 5).points.tolist()
            [[2.0, 0.0], [5.0, 0.0]]
        """
        end = self.length if end is None else end
        start, end = max(0.0, start), min(self.length, end)
        inner = self.points[
            (self.cumulative > start) & (self.cumulative < end)]
        return Polyline(
            np.concatenate([[self.point_at(start)], inner,
                            [self.point_at(end)]]))

    def densified(self, spacing=1.0):
        return Polyline(densify(self.points, spacing))

    def curvatures(self):
        """
        Unsigned curvature at every point, estimated from the heading change
        between adjacent segments over the mean of their lengths.
        """
        result = np.zeros(len(self.points))
        if len(self.points) > 2:
            turns = np.abs(
                np.angle(np.exp(1j * np.diff(self.segment_headings))))
            lengths = np.diff(self.cumulative)
            spans = (lengths[:-1] + lengths[1:]) / 2
            result[1:-1] = turns / np.maximum(spans, MIN_SEGMENT)
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Polyline) and
            np.array_equal(self.points, other.points)
        )

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Polyline({0})'.format(self.points.tolist())


def box_corners(x, y, heading, length, width):
    """
    The four corners of an oriented rectangle centered at ``(x, y)``, in
    counter-clockwise order. All arguments may be arrays of the same shape, in
    which case the result has shape ``(..., 4, 2)``::

        >>> box_corners(0.0, 0.0, 0.0, 4.0, 2.0).tolist()
        [[2.0, 1.0], [-2.0, 1.0], [-2.0, -1.0], [2.0, -1.0]]
    """
    x, y, heading = np.asarray(x), np.asarray(y), np.asarray(heading)
    cos, sin = np.cos(heading), np.sin(heading)
    half_l, half_w = np.asarray(length) / 2, np.asarray(width) / 2
    signs = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=np.float64)
    dx = signs[:, 0] * half_l[..., None]
    dy = signs[:, 1] * half_w[..., None]
    cx = x[..., None] + dx * cos[..., None] - dy * sin[..., None]
    cy = y[..., None] + dx * sin[..., None] + dy * cos[..., None]
    return np.stack([cx, cy], axis=-1)


def box_polygon(x, y, heading, length, width):
    return shapely.geometry.Polygon(box_corners(x, y, heading, length, width))


def boxes_overlap(corners_a, corners_b):
    """
    Separating-axis test for oriented rectangles given by their corners.
    Inputs of shape ``(..., 4, 2)`` are compared element by element and
    touching boxes do not count as overlapping::

        >>> a = box_corners(0.0, 0.0, 0.0, 4.0, 2.0)
        >>> bool(boxes_overlap(a, box_corners(3.0, 0.0, 0.0, 4.0, 2.0)))
        True
        >>> bool(boxes_overlap(a, box_corners(5.0, 0.0, 0.5, 4.0, 2.0)))
        False
    """
    corners_a = np.asarray(corners_a, dtype=np.float64)
    corners_b = np.asarray(corners_b, dtype=np.float64)
    separated = np.zeros(
        np.broadcast_shapes(corners_a.shape[:-2], corners_b.shape[:-2]),
        dtype=bool)
    for corners in (corners_a, corners_b):
        for i in (0, 1):
            edge = corners[..., i + 1, :] - corners[..., i, :]
            axis = np.stack([-edge[..., 1], edge[..., 0]], axis=-1)
            pa = np.einsum('...kd,...d->...k', corners_a, axis)
            pb = np.einsum('...kd,...d->...k', corners_b, axis)
            gap = np.maximum(
                pb.min(axis=-1) - pa.max(axis=-1),
                pa.min(axis=-1) - pb.max(axis=-1))
            separated |= gap >= -1e-12
    return ~separated
