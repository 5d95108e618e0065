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


"""This module defines the exceptions used in panel_qte."""


class PanelQteError(Exception):
    """Base class for panel_qte exceptions."""

    exit_code = 1

    def __init__(self, msg=None):
        """Initialize object members."""
        super(PanelQteError, self).__init__()
        self.msg = msg

    def __str__(self):
        """Generate a string representation of the object."""
        classname = self.__class__.__name__
        if self.msg:
            return "%s - %s" % (classname, self.msg)
        return classname


class PanelQteValidationError(PanelQteError):
    """Input data or configuration is unusable (CLI exit code 2)."""

    exit_code = 2


class PanelQteNumericalError(PanelQteError):
    """A numerical routine failed on valid input (CLI exit code 3)."""

    exit_code = 3


class PanelQteSchemaError(PanelQteValidationError):
    """Error raised when the run configuration schema is invalid."""

    def __init__(self, msg):
        """Initialize with schema invalid message."""
        super(PanelQteSchemaError, self).__init__(msg)
        self.msg = 'Schema provided is invalid: ' + msg


class PanelQteConfigValidationError(PanelQteValidationError):
    """Error raised when a run configuration does not match the schema."""

    def __init__(self, msg):
        """Initialize with config does not match schema message."""
        super(PanelQteConfigValidationError, self).__init__(msg)
        self.msg = 'Run configuration provided does not match schema: ' + \
            msg


class PanelQteConfigurationReadError(PanelQteValidationError):
    """Failed to create a configuration object from the run configuration."""


class InvalidDatasetError(PanelQteValidationError):
    """The panel failed one of the hard validation checks."""


class UnbalancedPanelError(PanelQteValidationError):
    """Some units do not have a record for every period."""

    def __init__(self, unit_ids):
        """Initialize with the offending unit identifiers."""
        self.unit_ids = list(unit_ids)
        shown = ", ".join(str(u) for u in self.unit_ids[:10])
        if len(self.unit_ids) > 10:
            shown += ", ..."
        super(UnbalancedPanelError, self).__init__(
            "units with missing periods: {}".format(shown))


class NonNumericCellError(PanelQteValidationError):
    """A cell that must hold a finite number could not be parsed."""

    def __init__(self, row, column, value=None):
        """Initialize with the 1-based data row and the column name."""
        self.row = row
        self.column = column
        super(NonNumericCellError, self).__init__(
            "row {}, column '{}': {!r} is not a finite number".format(
                row, column, value))


class DuplicateCellError(PanelQteValidationError):
    """The same (unit, time) pair appears more than once."""

    def __init__(self, unit, time):
        """Initialize with the duplicated unit and time labels."""
        self.unit = unit
        self.time = time
        super(DuplicateCellError, self).__init__(
            "duplicated record for unit {} at time {}".format(unit, time))


class BudgetExceededError(PanelQteValidationError):
    """A tensor quadrature grid was requested beyond the node cap."""


class MissingMedianError(PanelQteValidationError):
    """The constant-effect null needs 0.5 on the quantile grid."""


class EmptyGroupError(PanelQteValidationError):
    """One of the two comparison groups has no units."""


class NotDidShapeError(PanelQteValidationError):
    """The panel is not a two-period, two-group design."""


class CovarianceNotPSDError(PanelQteValidationError):
    """A simulation covariance matrix is not positive semi-definite."""


class RankDeficientError(PanelQteNumericalError):
    """The quantile regression design does not have full column rank."""

    def __init__(self, msg=None, period=None):
        """Initialize with an optional 1-based period index."""
        super(RankDeficientError, self).__init__(msg)
        self.period = period


class NonConvergenceError(PanelQteNumericalError):
    """An iterative solver hit its iteration cap.

    The best iterate found so far is attached as ``best``.
    """

    def __init__(self, msg=None, best=None, iterations=None, period=None):
        """Initialize with the best iterate and the iteration count."""
        super(NonConvergenceError, self).__init__(msg)
        self.best = best
        self.iterations = iterations
        self.period = period


class NoFiniteObjectiveError(PanelQteNumericalError):
    """Every candidate on the search lattice failed to evaluate."""


class TooManyFailuresError(PanelQteNumericalError):
    """Too many resampled or simulated replicates failed."""

    def __init__(self, failures, total, cap):
        """Initialize with the failure count, total and allowed share."""
        self.failures = failures
        self.total = total
        super(TooManyFailuresError, self).__init__(
            "{} of {} replicates failed (allowed share {:.0%})".format(
                failures, total, cap))
