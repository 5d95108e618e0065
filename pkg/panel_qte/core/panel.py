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
"""This module provides the balanced panel data model.

A PanelDataset holds n units observed over T periods: the outcome
Y_it, the treatment vector X_it and the covariate vector Z_it whose first
component is the intercept. StackedRegressors holds the per-unit
regressors (X_i1, ..., X_iT) and the distinct covariates of (Z_i1, ...,
Z_iT), standardized column by column, which enter the exponential weight
of the second estimation step.

Instances are immutable: arrays are copied on construction and flagged
read-only, so they can be shared across worker processes and threads.
"""

import logging

import attr
import numpy as np

LOGGER = logging.getLogger(__name__)

INTERCEPT_NAME = "(intercept)"


def _frozen_array(value, ndim, name):
    """Return a read-only float copy of ``value`` with ``ndim`` axes."""
    arr = np.array(value, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise ValueError("{} must have {} dimensions, got shape {}".format(
            name, ndim, arr.shape))
    arr.setflags(write=False)
    return arr


def _as_outcome(value):
    return _frozen_array(value, 2, "y")


def _as_treatment(value):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    return _frozen_array(arr, 3, "x")


def _as_covariates(value):
    return _frozen_array(value, 3, "z")


def _as_names(value):
    if value is None:
        return None
    return tuple(str(v) for v in value)


@attr.s(frozen=True, eq=False, repr=False)
class PanelDataset(object):
    """Balanced panel of n units by T periods.

    Args:
        y: outcome matrix of shape (n, T).
        x: treatment array of shape (n, T, d_X); a (n, T) matrix is read
            as a scalar treatment.
        z: covariate array of shape (n, T, d_Z); z[:, :, 0] is the
            intercept column and must be identically one.
        unit_ids: opaque unit labels (defaults to 0..n-1).
        x_names: optional treatment column names.
        z_names: optional covariate column names, intercept included.

    Shapes are checked here. Content invariants (finiteness, intercept,
    rank) are checked by :func:`validate` so that they can be reported
    rather than raised.
    """

    y = attr.ib(converter=_as_outcome)
    x = attr.ib(converter=_as_treatment)
    z = attr.ib(converter=_as_covariates)
    unit_ids = attr.ib(default=None)
    x_names = attr.ib(default=None, converter=_as_names)
    z_names = attr.ib(default=None, converter=_as_names)

    def __attrs_post_init__(self):
        n, periods = self.y.shape
        if n < 2:
            raise ValueError("a panel needs at least 2 units, got {}".format(n))
        if periods < 2:
            raise ValueError(
                "a panel needs at least 2 periods, got {}".format(periods))
        if self.x.shape[:2] != (n, periods):
            raise ValueError("x has shape {}, expected ({}, {}, d_X)".format(
                self.x.shape, n, periods))
        if self.z.shape[:2] != (n, periods):
            raise ValueError("z has shape {}, expected ({}, {}, d_Z)".format(
                self.z.shape, n, periods))
        if self.x.shape[2] < 1:
            raise ValueError("x needs at least one treatment column")
        if self.z.shape[2] < 1:
            raise ValueError("z needs at least the intercept column")

        unit_ids = self.unit_ids
        if unit_ids is None:
            unit_ids = range(n)
        unit_ids = tuple(unit_ids)
        if len(unit_ids) != n:
            raise ValueError("expected {} unit ids, got {}".format(
                n, len(unit_ids)))
        object.__setattr__(self, 'unit_ids', unit_ids)

        if self.x_names is not None and len(self.x_names) != self.d_x:
            raise ValueError("expected {} treatment names".format(self.d_x))
        if self.z_names is not None and len(self.z_names) != self.d_z:
            raise ValueError("expected {} covariate names".format(self.d_z))

    @property
    def n(self):  # pylint: disable=invalid-name
        """Number of units."""
        return self.y.shape[0]

    @property
    def T(self):  # pylint: disable=invalid-name
        """Number of periods."""
        return self.y.shape[1]

    @property
    def d_x(self):
        """Dimension of the treatment vector."""
        return self.x.shape[2]

    @property
    def d_z(self):
        """Dimension of the covariate vector, intercept included."""
        return self.z.shape[2]

    def take(self, indices):
        """Return the panel made of the whole records of ``indices``.

        Every row block of the result is one original unit's full
        T-period record; indices may repeat (bootstrap resampling).
        """
        indices = np.asarray(indices, dtype=np.intp)
        return PanelDataset(
            y=self.y[indices], x=self.x[indices], z=self.z[indices],
            unit_ids=[self.unit_ids[i] for i in indices],
            x_names=self.x_names, z_names=self.z_names)

    def identical_to(self, other):
        """Return True when both panels hold bit-identical data."""
        return (self.unit_ids == other.unit_ids and
                self.x_names == other.x_names and
                self.z_names == other.z_names and
                all(a.shape == b.shape and a.tobytes() == b.tobytes()
                    for a, b in ((self.y, other.y), (self.x, other.x),
                                 (self.z, other.z))))

    def __repr__(self):
        return "PanelDataset(n={}, T={}, d_X={}, d_Z={})".format(
            self.n, self.T, self.d_x, self.d_z)


@attr.s(frozen=True)
class ValidationReport(object):
    """Outcome of :func:`validate`.

    ``failures`` lists the hard problems that make estimation meaningless;
    ``warnings`` lists conditions worth surfacing that do not block it.
    """

    balanced = attr.ib()
    finite = attr.ib()
    intercept = attr.ib()
    n_exceeds_dz = attr.ib()
    z_rank = attr.ib()
    x_variance = attr.ib()
    x_full_rank = attr.ib()
    d_z = attr.ib()

    @property
    def z_full_rank(self):
        """Per-period flag: Z design has full column rank."""
        return tuple(rank == self.d_z for rank in self.z_rank)

    @property
    def x_full_rank_some_period(self):
        """True when the treatment varies across units in some period."""
        return any(self.x_full_rank)

    @property
    def failures(self):
        """Messages for the hard validation failures."""
        messages = []
        if not self.balanced:
            messages.append("panel is not balanced")
        if not self.finite:
            messages.append("non-finite values in y, x or z")
        if not self.intercept:
            messages.append("z[:, :, 0] is not identically 1")
        if not self.n_exceeds_dz:
            messages.append("need more units than covariates")
        for period, full in enumerate(self.z_full_rank, 1):
            if not full:
                messages.append(
                    "covariate design of period {} has rank {} < {}".format(
                        period, self.z_rank[period - 1], self.d_z))
        return messages

    @property
    def warnings(self):
        """Messages for the non-blocking conditions."""
        messages = []
        if not self.x_full_rank_some_period:
            messages.append("treatment has no cross-sectional variation "
                            "in any period")
        return messages

    @property
    def ok(self):  # pylint: disable=invalid-name
        """True when no hard failure was found."""
        return not self.failures


def validate(dataset):
    """Check the content invariants of a panel and report on them.

    Args:
        dataset (PanelDataset): the panel to check.

    Returns:
        ValidationReport: balance, finiteness, intercept presence, the
        per-period rank of the covariate design, and the per-period
        cross-sectional variance and rank of the treatment.
    """
    finite = bool(np.all(np.isfinite(dataset.y)) and
                  np.all(np.isfinite(dataset.x)) and
                  np.all(np.isfinite(dataset.z)))
    intercept = bool(np.all(dataset.z[:, :, 0] == 1.0))

    z_rank = []
    x_variance = []
    x_full_rank = []
    for period in range(dataset.T):
        z_t = dataset.z[:, period, :]
        x_t = dataset.x[:, period, :]
        if finite:
            z_rank.append(int(np.linalg.matrix_rank(z_t)))
            centered = x_t - x_t.mean(axis=0)
            x_variance.append(tuple(float(v) for v in x_t.var(axis=0)))
            x_full_rank.append(
                bool(np.ptp(x_t, axis=0).min() > 0) and
                int(np.linalg.matrix_rank(centered)) == dataset.d_x)
        else:
            z_rank.append(0)
            x_variance.append(tuple(float('nan') for _ in range(dataset.d_x)))
            x_full_rank.append(False)

    report = ValidationReport(
        balanced=True,
        finite=finite,
        intercept=intercept,
        n_exceeds_dz=dataset.n > dataset.d_z,
        z_rank=tuple(z_rank),
        x_variance=tuple(x_variance),
        x_full_rank=tuple(x_full_rank),
        d_z=dataset.d_z)

    for message in report.warnings:
        LOGGER.warning("Panel validation: %s", message)
    return report


@attr.s(frozen=True, eq=False)
class StackedRegressors(object):
    """Standardized per-unit regressors of the weight function.

    Attributes:
        x_stacked: (n, d_X*T) standardized treatments, time-major.
        z_stacked: (n, d_Z*) standardized distinct covariate columns.
        col_means: column means before standardization, x part first.
        col_sds: population standard deviations (denominator n).
        degenerate: per-column flag for constant columns, which are
            mapped to zeros.
        z_sources: (period, covariate) origin of each z_stacked column.
    """

    x_stacked = attr.ib()
    z_stacked = attr.ib()
    col_means = attr.ib()
    col_sds = attr.ib()
    degenerate = attr.ib()
    z_sources = attr.ib()

    @property
    def n(self):  # pylint: disable=invalid-name
        """Number of units."""
        return self.x_stacked.shape[0]

    @property
    def all_columns(self):
        """All standardized columns, treatments first."""
        return np.hstack([self.x_stacked, self.z_stacked])

    @property
    def active(self):
        """Standardized non-degenerate columns, shape (n, dim)."""
        return self.all_columns[:, ~self.degenerate]

    @property
    def dim(self):
        """Number of non-degenerate columns."""
        return int(np.count_nonzero(~self.degenerate))


def _distinct_columns(matrix):
    """Return the bitwise-distinct columns of ``matrix`` and their indices."""
    kept = []
    seen = set()
    for j in range(matrix.shape[1]):
        key = np.ascontiguousarray(matrix[:, j]).tobytes()
        if key in seen:
            continue
        seen.add(key)
        kept.append(j)
    return matrix[:, kept], kept


def standardize(dataset):
    """Stack and standardize the weight-function regressors of a panel.

    Each unit's treatments are flattened time-major into d_X*T columns.
    The covariates of all periods are flattened the same way and columns
    that are bitwise identical to an earlier one (time-invariant
    covariates, the intercept) are kept once. Every column is then
    centered and scaled to unit population standard deviation; constant
    columns are flagged as degenerate and mapped to zeros.

    Args:
        dataset (PanelDataset): a validated panel.

    Returns:
        StackedRegressors
    """
    n = dataset.n
    x_raw = dataset.x.reshape(n, dataset.T * dataset.d_x)
    z_all = dataset.z.reshape(n, dataset.T * dataset.d_z)
    z_raw, kept = _distinct_columns(z_all)
    z_sources = tuple((j // dataset.d_z + 1, j % dataset.d_z) for j in kept)

    raw = np.hstack([x_raw, z_raw])
    means = raw.mean(axis=0)
    sds = raw.std(axis=0)
    degenerate = np.ptp(raw, axis=0) == 0

    scaled = np.zeros_like(raw)
    live = ~degenerate
    scaled[:, live] = (raw[:, live] - means[live]) / sds[live]
    scaled.setflags(write=False)
    for arr in (means, sds, degenerate):
        arr.setflags(write=False)

    LOGGER.debug("Standardized %d columns (%d degenerate, %d covariate "
                 "duplicates dropped)", raw.shape[1],
                 int(degenerate.sum()), z_all.shape[1] - z_raw.shape[1])

    split = x_raw.shape[1]
    return StackedRegressors(
        x_stacked=scaled[:, :split],
        z_stacked=scaled[:, split:],
        col_means=means,
        col_sds=sds,
        degenerate=degenerate,
        z_sources=z_sources)
