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
from mock import patch

import panel_qte
from panel_qte import cli


def test_estimate_flags():
    args = cli.build_parser().parse_args(
        ['estimate', '--data', 'panel.csv', '--tau', '0.1:0.9:0.1',
         '--a-min', '-2', '--a-max', '4', '--seed', '7'])
    assert args.command == 'estimate'
    assert args.data == 'panel.csv'
    assert args.tau == '0.1:0.9:0.1'
    assert (args.a_min, args.a_max) == ('-2', '4')
    assert args.seed == 7
    assert args.out == '-'
    assert args.log_level == 'WARNING'
    assert args.threads is None


def test_simulate_flags():
    args = cli.build_parser().parse_args(
        ['simulate', '--dgp', 'sim1', '--n', '2000', '--rho2', '0.9',
         '--reps', '200', '--seed', '1'])
    assert args.dgp == 'sim1'
    assert args.n == 2000
    assert args.rho2 == 0.9
    assert args.reps == 200
    assert args.boot_reps is None
    assert args.estimators is None


def test_test_flags():
    args = cli.build_parser().parse_args(
        ['test', '--bundle', 'bundle.jsonl', '--null', 'constant',
         '--level', '0.05', '--log-level', 'debug'])
    assert args.null == 'constant'
    assert args.level == 0.05
    assert args.log_level == 'DEBUG'


@pytest.mark.parametrize("argv", [
    [],
    ['estimate'],
    ['test', '--bundle', 'b.jsonl', '--null', 'linear'],
    ['simulate', '--dgp', 'sim9', '--n', '10'],
    ['estimate', '--data', 'p.csv', '--quad-scheme', 'simpson'],
])
def test_rejected_command_lines(argv):
    with pytest.raises(SystemExit) as error:
        cli.build_parser().parse_args(argv)
    assert error.value.code == 2


def test_version(capsys):
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(['--version'])
    assert panel_qte.__version__ in capsys.readouterr().out


def test_main_returns_exit_code():
    with patch.object(cli.manager, 'run_command',
                      return_value=3) as run_command:
        assert cli.main(['cic', '--data', 'did.csv']) == 3
    args = run_command.call_args[0][0]
    assert args.command == 'cic'
    assert args.data == 'did.csv'
