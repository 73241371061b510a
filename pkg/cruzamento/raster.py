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
Vehicle-centric rasters of a road network.

Rasters are square, ``size`` pixels wide, centered at a vehicle and turned so
that the vehicle heads up. With the default 256 pixels of 0.78125 m they cover
200 m by 200 m. A point 50 m ahead of the vehicle is 64 pixels above the
center::

    >>> from cruzamento.scenario import VehicleState
    >>> frame = EgoFrame(VehicleState(0, 0, math.pi / 2, 10))
    >>> frame.to_pixels([(0, 50)]).tolist()
    [[128.0, 64.0]]

The same frame is used by the planner map encoder and by the images shown to
vision models.
"""
import math
import weakref

import cv2
import numpy as np

RASTER_SIZE = 256
RESOLUTION = 0.78125
SUBPIXEL_BITS = 4

ROAD = 1.0
MARKING = 0.5

_lane_outlines = weakref.WeakKeyDictionary()


class EgoFrame(object):
    """
    The transform from scenario coordinates to pixels (column, row) of a
    raster centered at ``state``.
    """

    def __init__(self, state, size=RASTER_SIZE, resolution=RESOLUTION):
        self.state = state
        self.size = size
        self.resolution = resolution
        self.center = size / 2
        self.cos = math.cos(state.heading)
        self.sin = math.sin(state.heading)

    def to_pixels(self, points):
        points = np.asarray(points, dtype=np.float64)
        dx = points[..., 0] - self.state.x
        dy = points[..., 1] - self.state.y
        forward = dx * self.cos + dy * self.sin
        right = dx * self.sin - dy * self.cos
        return np.stack([
            self.center + right / self.resolution,
            self.center - forward / self.resolution
        ], axis=-1)

    def to_fixed(self, points):
        """
        Pixels as the fixed-point integers OpenCV draws with sub-pixel
        precision.
        """
        pixels = self.to_pixels(points) * (1 << SUBPIXEL_BITS)
        return np.round(pixels).astype(np.int32)

    def contains(self, pixel):
        column, row = pixel
        return 0 <= column < self.size and 0 <= row < self.size

    @property
    def half_extent(self):
        return self.size * self.resolution / 2


def lane_outlines(network):
    """
    The outline of every lane surface, as lists of point arrays. Computed
    once per network.
    """
    try:
        return _lane_outlines[network]
    except KeyError:
        pass
    outlines = {}
    for lane in network.lanes.values():
        surface = lane.polyline.line.buffer(lane.width / 2, cap_style='flat')
        polygons = getattr(surface, 'geoms', [surface])
        outlines[lane.id] = [
            np.asarray(p.exterior.coords) for p in polygons if not p.is_empty]
    _lane_outlines[network] = outlines
    return outlines


def draw_lanes(image, network, frame, road_color, marking_color):
    outlines = lane_outlines(network)
    for lane_id in sorted(outlines):
        polygons = [frame.to_fixed(points) for points in outlines[lane_id]]
        cv2.fillPoly(image, polygons, road_color, shift=SUBPIXEL_BITS)
    for lane_id in sorted(outlines):
        polygons = [frame.to_fixed(points) for points in outlines[lane_id]]
        cv2.polylines(
            image, polygons, True, marking_color, 1, shift=SUBPIXEL_BITS)


def rasterize_map(
        network, state, size=RASTER_SIZE, resolution=RESOLUTION):
    """
    A one-channel ``float32`` raster of the network around ``state``: lane
    surfaces are 1.0, lane borders 0.5 and everything else 0::

        >>> from cruzamento.roadnet.network import Lane, RoadNetwork
        >>> from cruzamento.scenario import VehicleState
        >>> network = RoadNetwork([Lane('a', [(-100, 0), (100, 0)], 3.5, 14)])
        >>> raster = rasterize_map(network, VehicleState(0, 0, 0, 10))
        >>> raster.shape, float(raster[128, 128]), float(raster[10, 10])
        ((256, 256), 1.0, 0.0)
    """
    frame = EgoFrame(state, size, resolution)
    image = np.zeros((size, size), dtype=np.float32)
    draw_lanes(image, network, frame, ROAD, MARKING)
    return image
