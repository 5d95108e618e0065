#!/usr/bin/env python
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

"""Shared builders of small panels for the unit tests."""

import numpy as np

from panel_qte.core.panel import PanelDataset


def make_panel(n=40, periods=2, d_z=2, seed=0, alpha=1.0):
    """Return a random panel with a scalar treatment.

    Y_it = alpha * X_it + Z_it'(t, 1) + e_it with X uniform, the second
    covariate uniform and time invariant, and standard normal errors.
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(size=(n, periods))
    z = np.ones((n, periods, d_z))
    if d_z > 1:
        z[:, :, 1:] = rng.uniform(size=(n, 1, d_z - 1))
    coefs = np.ones((periods, d_z))
    coefs[:, 0] = np.arange(periods)
    y = (alpha * x + np.einsum('itk,tk->it', z, coefs) +
         rng.standard_normal((n, periods)))
    return PanelDataset(y=y, x=x, z=z)


def intercept_only(y, x):
    """Return a panel with an intercept-only covariate design."""
    y = np.asarray(y, dtype=float)
    return PanelDataset(y=y, x=x, z=np.ones(y.shape + (1,)))


def duplicated_periods(n=30, seed=0):
    """Return a T=2 panel whose two periods hold the same data."""
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(n)
    x = rng.uniform(size=n)
    z = np.ones((n, 2, 2))
    z[:, :, 1] = rng.uniform(size=n)[:, np.newaxis]
    return PanelDataset(y=np.column_stack([y, y]),
                        x=np.column_stack([x, x]), z=z)
