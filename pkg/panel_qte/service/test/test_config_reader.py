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

import os

import pytest
from mock import patch

import panel_qte.exceptions as qte_exc
from panel_qte.service import config_reader
from panel_qte.service.config_reader import RunConfigReader

HERE = os.path.dirname(os.path.abspath(__file__))
RUN_CONFIG = os.path.join(HERE, 'run_config.yml')


class TestRunConfigReader(object):

    def setup_method(self):
        self.reader = RunConfigReader()

    def test_load_file(self):
        run_config = self.reader.load(RUN_CONFIG)
        assert run_config['tau'] == "0.25:0.75:0.25"
        assert run_config['seed'] == 7
        # defaults of the schema
        assert run_config['qr_method'] == 'interior-point'
        assert run_config['level'] == 0.05

    def test_overrides_take_precedence(self):
        run_config = self.reader.load(RUN_CONFIG, {'seed': 11, 'reps': None,
                                                   'level': 0.1})
        assert run_config['seed'] == 11
        assert run_config['reps'] == 20
        assert run_config['level'] == 0.1

    def test_no_file(self):
        run_config = self.reader.load(overrides={'tau': "0.5"})
        assert run_config['tau'] == "0.5"
        assert run_config['grid_points'] == 201

    def test_unreadable_file(self):
        with pytest.raises(qte_exc.PanelQteConfigurationReadError):
            self.reader.load(os.path.join(HERE, 'missing.yml'))
        with pytest.raises(qte_exc.PanelQteConfigurationReadError):
            self.reader.load(os.path.join(HERE, 'bad_decode_schema.json'))

    def test_read_estimation_config(self):
        config = self.reader.read_estimation_config(
            self.reader.load(RUN_CONFIG))
        assert config.tau_grid == (0.25, 0.5, 0.75)
        assert config.a_bounds == ((-1.0, 3.0),)
        assert config.grid_points == 21
        assert config.quad_nodes == 3
        assert config.seed == 7
        assert config.b_bounds is None
        assert config.threads == 1

    def test_per_coordinate_bounds(self):
        run_config = self.reader.load(overrides={
            'tau': [0.5], 'a_min': [-1.0, -2.0], 'a_max': 5.0,
            'b_min': -10.0, 'b_max': 10.0, 'threads': 3})
        config = self.reader.read_estimation_config(run_config)
        assert config.a_bounds == ((-1.0, 5.0), (-2.0, 5.0))
        assert config.b_bounds == (-10.0, 10.0)
        assert config.threads == 3

    @pytest.mark.parametrize("overrides", [
        {'tau': [0.5], 'a_min': [0.0, 1.0], 'a_max': [1.0, 2.0, 3.0]},
        {'tau': [0.5], 'a_min': 3.0, 'a_max': 1.0},
        {'tau': [0.5], 'b_min': 1.0},
        {'tau': [0.75, 0.25]},
        {'tau': "0.5:0.1:0.1"},
    ])
    def test_invalid_settings(self, overrides):
        run_config = self.reader.load(overrides=overrides)
        with patch.object(config_reader, 'LOGGER') as logger:
            with pytest.raises(qte_exc.PanelQteConfigurationReadError):
                self.reader.read_estimation_config(run_config)
        assert logger.error.called
