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
"""Long-format CSV ingestion and emission of panels.

A panel file has a header row and one record per (unit, time) pair:

    unit,time,y,x:d,z:age
    1,2001,0.3,0,41
    1,2002,1.7,1,42

Columns prefixed ``x:`` are treatment components and columns prefixed
``z:`` covariates; the intercept is not part of the file, it is
prepended on ingestion. Time labels are mapped to periods 1..T in
sorted order.
"""

import logging

import attr
import numpy as np
import pandas as pd

import panel_qte.exceptions as qte_exc
from panel_qte.core.panel import INTERCEPT_NAME
from panel_qte.core.panel import PanelDataset

LOGGER = logging.getLogger(__name__)

X_PREFIX = "x:"
Z_PREFIX = "z:"


@attr.s(frozen=True)
class PanelColumns(object):
    """Column mapping of a panel file.

    ``x`` and ``z`` list the treatment and covariate columns; when left
    out they are the columns carrying the ``x:`` and ``z:`` prefixes.
    """

    unit = attr.ib(default='unit')
    time = attr.ib(default='time')
    y = attr.ib(default='y')
    x = attr.ib(default=None)
    z = attr.ib(default=None)

    def resolve(self, header):
        """Return (x columns, z columns) for a file header."""
        x_cols = list(self.x) if self.x is not None else \
            [c for c in header if c.startswith(X_PREFIX)]
        z_cols = list(self.z) if self.z is not None else \
            [c for c in header if c.startswith(Z_PREFIX)]
        return x_cols, z_cols


def _strip(name, prefix):
    return name[len(prefix):] if name.startswith(prefix) else name


def _to_float(text):
    try:
        return float(text)
    except (TypeError, ValueError):
        return np.nan


def _numeric(frame, column):
    """Parse one column; raise on the first cell that is not finite."""
    values = frame[column].map(_to_float).to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        row = int(bad[0])
        LOGGER.error("Cannot parse column '%s' at data row %d", column,
                     row + 1)
        raise qte_exc.NonNumericCellError(row + 1, column,
                                          frame[column].iloc[row])
    return values


def _periods(labels):
    """Map time labels to 0-based periods by sorted order."""
    numeric = labels.map(_to_float)
    if np.all(np.isfinite(numeric.to_numpy(dtype=float))):
        keys = numeric
    else:
        keys = labels
    ordered = sorted(pd.unique(keys))
    index = dict((key, period) for period, key in enumerate(ordered))
    return keys.map(index).to_numpy(dtype=int), len(ordered)


def ingest_csv(path, columns=None):
    """Read a long-format panel file.

    Args:
        path: CSV file (UTF-8, header row required).
        columns (PanelColumns): column mapping (default prefixes).

    Returns:
        PanelDataset with unit ids in order of first appearance.

    Raises:
        NonNumericCellError: a y, x or z cell is not a finite number.
        DuplicateCellError: a (unit, time) pair appears twice.
        UnbalancedPanelError: some unit misses a period.
    """
    columns = columns or PanelColumns()
    frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                        encoding='utf-8')
    header = list(frame.columns)
    x_cols, z_cols = columns.resolve(header)
    missing = [c for c in [columns.unit, columns.time, columns.y] + x_cols +
               z_cols if c not in header]
    if missing or not x_cols:
        msg = "missing columns: {}".format(", ".join(missing) or "x:*")
        LOGGER.error(msg)
        raise qte_exc.InvalidDatasetError(msg)

    y = _numeric(frame, columns.y)
    x = np.column_stack([_numeric(frame, c) for c in x_cols])
    z = np.column_stack([np.ones(len(frame))] +
                        [_numeric(frame, c) for c in z_cols])

    units = pd.unique(frame[columns.unit])
    unit_index = dict((unit, i) for i, unit in enumerate(units))
    rows = frame[columns.unit].map(unit_index).to_numpy(dtype=int)
    periods, n_periods = _periods(frame[columns.time])

    cells = pd.DataFrame({'row': rows, 'period': periods})
    duplicated = np.flatnonzero(cells.duplicated().to_numpy())
    if duplicated.size:
        first = frame.iloc[duplicated[0]]
        LOGGER.error("Duplicated record in %s", path)
        raise qte_exc.DuplicateCellError(first[columns.unit],
                                         first[columns.time])

    counts = np.bincount(rows, minlength=len(units))
    if np.any(counts != n_periods):
        incomplete = [units[i] for i in np.flatnonzero(counts != n_periods)]
        LOGGER.error("Unbalanced panel in %s", path)
        raise qte_exc.UnbalancedPanelError(incomplete)

    shape = (len(units), n_periods)
    y_panel = np.empty(shape)
    x_panel = np.empty(shape + (x.shape[1],))
    z_panel = np.empty(shape + (z.shape[1],))
    y_panel[rows, periods] = y
    x_panel[rows, periods] = x
    z_panel[rows, periods] = z

    try:
        dataset = PanelDataset(
            y=y_panel, x=x_panel, z=z_panel, unit_ids=list(units),
            x_names=[_strip(c, X_PREFIX) for c in x_cols],
            z_names=[INTERCEPT_NAME] + [_strip(c, Z_PREFIX) for c in z_cols])
    except ValueError as error:
        LOGGER.error("Cannot build a panel from %s: %s", path, error)
        raise qte_exc.InvalidDatasetError(str(error))
    LOGGER.info("Read %r from %s", dataset, path)
    return dataset


def write_csv(dataset, path):
    """Write ``dataset`` in the format ingest_csv reads.

    Periods are written as 1..T and numbers with their shortest exact
    representation, so an ingested panel survives the round trip
    bit for bit. The intercept column is left out.
    """
    x_names = dataset.x_names or \
        ["x{}".format(j + 1) for j in range(dataset.d_x)]
    z_names = (dataset.z_names or
               ["z{}".format(j) for j in range(dataset.d_z)])[1:]
    n, periods = dataset.n, dataset.T

    data = {
        'unit': np.repeat([str(u) for u in dataset.unit_ids], periods),
        'time': np.tile(np.arange(1, periods + 1), n),
        'y': [repr(v) for v in dataset.y.ravel().tolist()],
    }
    for j, name in enumerate(x_names):
        data[X_PREFIX + name] = [
            repr(v) for v in dataset.x[:, :, j].ravel().tolist()]
    for j, name in enumerate(z_names):
        data[Z_PREFIX + name] = [
            repr(v) for v in dataset.z[:, :, j + 1].ravel().tolist()]
    frame = pd.DataFrame(data, columns=list(data))
    frame.to_csv(path, index=False, encoding='utf-8')
    LOGGER.debug("Wrote %r to %s", dataset, path)
