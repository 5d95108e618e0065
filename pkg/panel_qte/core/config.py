# coding=utf-8
#
# Copyright (c) 2024 The panel-qte developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""Estimation configuration shared by every command."""

import logging
import math

import attr
import numpy as np

LOGGER = logging.getLogger(__name__)

QUAD_SCHEMES = ('auto', 'tensor-gauss', 'halton')
QR_METHODS = ('interior-point', 'highs')

DEFAULT_A_BOUNDS = ((-2.0, 4.0),)
DEFAULT_GRID_POINTS = 201
DEFAULT_REFINE_TOL = 1e-4
DEFAULT_QUAD_NODES = 8
DEFAULT_QR_TOL = 1e-8
DEFAULT_QR_MAX_ITER = 200

# Side of the integration box: v in [-V_HALF_WIDTH, V_HALF_WIDTH]^d.
V_HALF_WIDTH = 0.5


def parse_tau_grid(spec):
    """Parse a quantile grid.

    Accepts a sequence of levels, a comma separated list
    ("0.25,0.5,0.75") or a range "start:stop:step". A range includes
    ``stop`` when ``step`` divides the range exactly.
    """
    if isinstance(spec, (list, tuple, np.ndarray)):
        return tuple(float(v) for v in spec)
    text = str(spec).strip()
    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError(
                "tau range must read start:stop:step, got {!r}".format(text))
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError("invalid tau range {!r}".format(text))
        count = int(math.floor((stop - start) / step + 1e-9))
        values = start + step * np.arange(count + 1)
        return tuple(float(v) for v in np.round(values, 12))
    return tuple(float(v) for v in text.split(',') if v.strip())


def _as_tau_grid(value):
    return parse_tau_grid(value)


def _check_tau_grid(instance, attribute, value):
    # pylint: disable=unused-argument
    if not value:
        raise ValueError("tau_grid must not be empty")
    if any(not 0.0 < tau < 1.0 for tau in value):
        raise ValueError("tau_grid must lie inside (0, 1): {}".format(value))
    if any(b <= a for a, b in zip(value, value[1:])):
        raise ValueError("tau_grid must be strictly increasing")


def _as_bounds(value):
    """Normalize bounds to a tuple of (low, high) pairs."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2) if arr.size == 2 else arr
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("bounds must be (low, high) pairs, got {!r}".format(
            value))
    return tuple((float(lo), float(hi)) for lo, hi in arr)


def _check_bounds(instance, attribute, value):
    # pylint: disable=unused-argument
    if not value:
        raise ValueError("{} must not be empty".format(attribute.name))
    for low, high in value:
        if not (np.isfinite(low) and np.isfinite(high)) or high < low:
            raise ValueError("{} holds an empty or unbounded interval "
                             "[{}, {}]".format(attribute.name, low, high))


def _as_optional_box(value):
    if value is None:
        return None
    low, high = (float(v) for v in value)
    if high < low:
        raise ValueError("b_bounds is empty: [{}, {}]".format(low, high))
    return (low, high)


def _at_least(minimum):
    def check(instance, attribute, value):
        # pylint: disable=unused-argument
        if value < minimum:
            raise ValueError("{} must be >= {}, got {}".format(
                attribute.name, minimum, value))
    return check


def _positive(instance, attribute, value):
    # pylint: disable=unused-argument
    if not value > 0:
        raise ValueError("{} must be positive, got {}".format(
            attribute.name, value))


def _check_seed(instance, attribute, value):
    # pylint: disable=unused-argument
    if not 0 <= value < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")


@attr.s(frozen=True)
class EstimationConfig(object):
    """Settings of the two-step estimator.

    a_bounds holds one (low, high) pair per treatment coordinate; a single
    pair is broadcast to every coordinate. b_bounds is an optional box
    applied to every first-step coefficient; when set, the first step
    is solved as a bounded linear program.
    """

    tau_grid = attr.ib(converter=_as_tau_grid, validator=_check_tau_grid)
    a_bounds = attr.ib(default=DEFAULT_A_BOUNDS, converter=_as_bounds,
                       validator=_check_bounds)
    grid_points = attr.ib(default=DEFAULT_GRID_POINTS, converter=int,
                          validator=_at_least(3))
    refine_tol = attr.ib(default=DEFAULT_REFINE_TOL, converter=float,
                         validator=_positive)
    quad_scheme = attr.ib(default='auto',
                          validator=attr.validators.in_(QUAD_SCHEMES))
    quad_nodes = attr.ib(default=DEFAULT_QUAD_NODES, converter=int,
                         validator=_at_least(1))
    seed = attr.ib(default=0, converter=int, validator=_check_seed)
    b_bounds = attr.ib(default=None, converter=_as_optional_box)
    qr_method = attr.ib(default='interior-point',
                        validator=attr.validators.in_(QR_METHODS))
    qr_tol = attr.ib(default=DEFAULT_QR_TOL, converter=float,
                     validator=_positive)
    qr_max_iter = attr.ib(default=DEFAULT_QR_MAX_ITER, converter=int,
                          validator=_at_least(1))
    threads = attr.ib(default=1, converter=int, validator=_at_least(1))

    def bounds_for(self, d_x):
        """Return the a_bounds pairs for a d_x dimensional treatment."""
        if len(self.a_bounds) == d_x:
            return self.a_bounds
        if len(self.a_bounds) == 1:
            return self.a_bounds * d_x
        raise ValueError("a_bounds has {} pairs but the treatment has {} "
                         "coordinates".format(len(self.a_bounds), d_x))

    def snapshot(self):
        """Return a JSON-serializable copy of the settings."""
        data = attr.asdict(self)
        data['tau_grid'] = list(self.tau_grid)
        data['a_bounds'] = [list(pair) for pair in self.a_bounds]
        if self.b_bounds is not None:
            data['b_bounds'] = list(self.b_bounds)
        return data
