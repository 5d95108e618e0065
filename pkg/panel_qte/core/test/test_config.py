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

import pytest

from panel_qte.core.config import EstimationConfig
from panel_qte.core.config import parse_tau_grid


@pytest.mark.parametrize("spec,expected", [
    ("0.1:0.9:0.1", (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)),
    ("0.25:0.75:0.25", (0.25, 0.5, 0.75)),
    ("0.1:0.95:0.1", (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)),
    ("0.25,0.5,0.75", (0.25, 0.5, 0.75)),
    ("0.5", (0.5,)),
    ([0.2, 0.4], (0.2, 0.4)),
])
def test_parse_tau_grid(spec, expected):
    assert parse_tau_grid(spec) == expected


@pytest.mark.parametrize("spec", ["0.1:0.9", "0.9:0.1:0.1", "0.1:0.9:0"])
def test_parse_tau_grid_rejects_bad_ranges(spec):
    with pytest.raises(ValueError):
        parse_tau_grid(spec)


def test_config_defaults():
    config = EstimationConfig(tau_grid="0.25:0.75:0.25")

    assert config.tau_grid == (0.25, 0.5, 0.75)
    assert config.a_bounds == ((-2.0, 4.0),)
    assert config.grid_points == 201
    assert config.refine_tol == 1e-4
    assert config.quad_scheme == 'auto'
    assert config.quad_nodes == 8
    assert config.seed == 0
    assert config.b_bounds is None
    assert config.qr_method == 'interior-point'
    assert config.threads == 1


def test_config_bounds_broadcast():
    config = EstimationConfig(tau_grid=[0.5], a_bounds=(-1, 1))
    assert config.a_bounds == ((-1.0, 1.0),)
    assert config.bounds_for(3) == ((-1.0, 1.0),) * 3

    config = EstimationConfig(tau_grid=[0.5], a_bounds=[[-1, 1], [0, 2]])
    assert config.bounds_for(2) == ((-1.0, 1.0), (0.0, 2.0))
    with pytest.raises(ValueError):
        config.bounds_for(3)


@pytest.mark.parametrize("kwargs", [
    dict(tau_grid=[]),
    dict(tau_grid=[0.0, 0.5]),
    dict(tau_grid=[0.5, 1.0]),
    dict(tau_grid=[0.5, 0.25]),
    dict(tau_grid=[0.5], a_bounds=(1, -1)),
    dict(tau_grid=[0.5], a_bounds=(0, float('inf'))),
    dict(tau_grid=[0.5], a_bounds=(0, 1, 2, 3)),
    dict(tau_grid=[0.5], grid_points=2),
    dict(tau_grid=[0.5], refine_tol=0),
    dict(tau_grid=[0.5], quad_scheme='simpson'),
    dict(tau_grid=[0.5], quad_nodes=0),
    dict(tau_grid=[0.5], seed=-1),
    dict(tau_grid=[0.5], b_bounds=(2, 1)),
    dict(tau_grid=[0.5], qr_method='simplex'),
    dict(tau_grid=[0.5], threads=0),
])
def test_config_rejects_invalid_values(kwargs):
    with pytest.raises(ValueError):
        EstimationConfig(**kwargs)


def test_config_snapshot_is_plain():
    config = EstimationConfig(tau_grid="0.25,0.5", b_bounds=(-10, 10),
                              seed=7)
    snapshot = config.snapshot()

    assert snapshot['tau_grid'] == [0.25, 0.5]
    assert snapshot['a_bounds'] == [[-2.0, 4.0]]
    assert snapshot['b_bounds'] == [-10.0, 10.0]
    assert snapshot['seed'] == 7
