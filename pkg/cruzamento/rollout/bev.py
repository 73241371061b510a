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
Bird's-eye images shown to vision models when they select goals.

The image is a 256 by 256 pixels PNG covering 200 m by 200 m around the ego
vehicle, which heads up. The layers, bottom to top, are:

* lane surfaces in gray;
* lane borders in white;
* other vehicles as blue boxes;
* the target vehicle in orange, when it has to be highlighted;
* the ego vehicle as a green box;
* goal candidates as red discs with white numbers.

Colors here are BGR, as OpenCV expects them.
"""
import collections
import logging

import cv2
import numpy as np

from cruzamento.raster import (
    RASTER_SIZE, RESOLUTION, SUBPIXEL_BITS, EgoFrame, draw_lanes)
from cruzamento.roadnet.geometry import box_corners

logger = logging.getLogger(__name__)

BACKGROUND = (0, 0, 0)
LANE = (128, 128, 128)
MARKING = (255, 255, 255)
OTHER = (255, 0, 0)
EGO = (0, 255, 0)
TARGET = (0, 165, 255)
MARKER = (0, 0, 255)
NUMERAL = (255, 255, 255)

MARKER_RADIUS = 7
FONT = cv2.FONT_HERSHEY_SIMPLEX
FONT_SCALE = 0.35


class BevImage(collections.namedtuple(
        'BevImage', ('png', 'legend', 'clamped'))):
    """
    A rendered image: the PNG bytes, the pixel (column, row) of every
    candidate marker by number and the numbers of the markers that fell
    outside the window and were moved to its edge.
    """
    __slots__ = ()

    def decode(self):
        return cv2.imdecode(
            np.frombuffer(self.png, dtype=np.uint8), cv2.IMREAD_COLOR)


def render_bev(
        network, vehicles, ego_id, candidates=(), highlight_target=False,
        states=None, size=RASTER_SIZE, resolution=RESOLUTION):
    """
    Renders the scene around vehicle ``ego_id``. Vehicles are drawn at their
    initial states unless ``states`` maps their ids to other states.

    A candidate 50 m ahead of the ego vehicle is marked 64 pixels above the
    center::

        >>> import math
        >>> from cruzamento.rollout.candidates import GoalCandidate
        >>> from cruzamento.roadnet.network import Lane, RoadNetwork
        >>> from cruzamento.scenario import VehicleAttributes, VehicleState
        >>> network = RoadNetwork([Lane('a', [(0, 0), (0, 200)], 3.5, 14)])
        >>> ego = VehicleAttributes(
        ...     0, 'car', 4.5, 1.8, 1.5, VehicleState(0, 0, math.pi / 2, 10),
        ...     True)
        >>> image = render_bev(
        ...     network, [ego], 0,
        ...     [GoalCandidate(1, (0, 50), math.pi / 2, ('a',), 50)])
        >>> image.legend
        {1: (128, 64)}
        >>> image.decode().shape
        (256, 256, 3)
    """
    states = dict(states or {})
    by_id = {v.id: v for v in vehicles}
    ego = by_id[ego_id]
    frame = EgoFrame(
        states.get(ego_id, ego.initial_state), size, resolution)

    image = np.zeros((size, size, 3), dtype=np.uint8)
    image[:] = BACKGROUND
    draw_lanes(image, network, frame, LANE, MARKING)

    def draw_box(vehicle, color):
        s = states.get(vehicle.id, vehicle.initial_state)
        corners = box_corners(
            s.x, s.y, s.heading, vehicle.length, vehicle.width)
        cv2.fillPoly(
            image, [frame.to_fixed(corners)], color, shift=SUBPIXEL_BITS)

    for vehicle in vehicles:
        if vehicle.id == ego_id:
            continue
        if highlight_target and vehicle.is_target:
            continue
        draw_box(vehicle, OTHER)
    if highlight_target:
        for vehicle in vehicles:
            if vehicle.is_target and vehicle.id != ego_id:
                draw_box(vehicle, TARGET)
    draw_box(ego, EGO)

    legend, clamped = {}, []
    for candidate in candidates:
        column, row = frame.to_pixels(candidate.position)
        column, row = int(round(column)), int(round(row))
        if not frame.contains((column, row)):
            clamped.append(candidate.number)
            column = min(max(column, MARKER_RADIUS), size - 1 - MARKER_RADIUS)
            row = min(max(row, MARKER_RADIUS), size - 1 - MARKER_RADIUS)
        legend[candidate.number] = (column, row)
        _draw_marker(image, candidate.number, (column, row))

    if clamped:
        logger.info(
            'candidates %s are outside the %.0f m window', clamped,
            2 * frame.half_extent)

    ok, buffer = cv2.imencode('.png', image)
    return BevImage(buffer.tobytes(), legend, tuple(clamped))


def _draw_marker(image, number, center):
    cv2.circle(image, center, MARKER_RADIUS, MARKER, -1)
    text = str(number)
    (width, height), _ = cv2.getTextSize(text, FONT, FONT_SCALE, 1)
    origin = (center[0] - width // 2, center[1] + height // 2)
    cv2.putText(image, text, origin, FONT, FONT_SCALE, NUMERAL, 1)
