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
"""Empirical distribution functions and their generalized inverses."""

import attr
import numpy as np


def _frozen(value):
    arr = np.array(value, dtype=float, copy=True).ravel()
    arr.setflags(write=False)
    return arr


@attr.s(frozen=True, eq=False)
class Ecdf(object):
    """A right-continuous step distribution function.

    F(y) = steps[k] for support[k] <= y < support[k + 1], 0 below the
    support. The quantile function is the generalized inverse
    inf{y : F(y) >= u}, so that quantile(cdf(y)) <= y with equality on
    the support.

    Attributes:
        support: strictly increasing jump points.
        steps: nondecreasing values in [0, 1], the last one 1.
    """

    support = attr.ib(converter=_frozen)
    steps = attr.ib(converter=_frozen)

    def __attrs_post_init__(self):
        if self.support.size == 0:
            raise ValueError("an empirical distribution needs a sample")
        if self.support.shape != self.steps.shape:
            raise ValueError("support and steps differ in length")
        if np.any(np.diff(self.support) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(np.diff(self.steps) < 0) or self.steps[0] < 0 or \
                self.steps[-1] != 1.0:
            raise ValueError("steps must increase from [0, 1] up to 1")

    @classmethod
    def from_sample(cls, values):
        """Return the empirical distribution of a sample."""
        values = np.asarray(values, dtype=float).ravel()
        support, counts = np.unique(values, return_counts=True)
        steps = np.cumsum(counts) / float(values.size)
        steps[-1] = 1.0
        return cls(support=support, steps=steps)

    def cdf(self, y):
        """Evaluate F at ``y`` (scalar or array)."""
        index = np.searchsorted(self.support, y, side='right')
        values = np.concatenate([[0.0], self.steps])[index]
        return values if np.ndim(values) else float(values)

    def quantile(self, u):
        """Evaluate the generalized inverse inf{y : F(y) >= u}.

        Levels at or below 0 map to the smallest support point and levels
        above 1 to the largest.
        """
        index = np.searchsorted(self.steps, u, side='left')
        index = np.clip(index, 0, self.support.size - 1)
        values = self.support[index]
        return values if np.ndim(values) else float(values)


def mixture(components, weights):
    """Return sum_k weights[k] * components[k] as an Ecdf.

    The weights must be nonnegative and sum to one; the support of the
    mixture is the union of the component supports.
    """
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or not np.isclose(weights.sum(), 1.0):
        raise ValueError("mixture weights must be a probability vector")
    support = np.unique(np.concatenate([c.support for c in components]))
    steps = sum(w * c.cdf(support) for w, c in zip(weights, components))
    steps = np.minimum(np.maximum.accumulate(steps), 1.0)
    steps[-1] = 1.0
    return Ecdf(support=support, steps=steps)
