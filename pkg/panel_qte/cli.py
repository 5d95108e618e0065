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
"""Command line entry point: ``panel-qte <command> [options]``."""

import argparse
import logging
import sys

import panel_qte
from panel_qte.inference.testing import NULL_KINDS
from panel_qte.montecarlo.dgp import KINDS
from panel_qte.service import manager

LOGGER = logging.getLogger(__name__)

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


def _common(parser):
    parser.add_argument('--config', help="yaml or json run configuration")
    parser.add_argument('--out', default='-',
                        help="result file (default: stdout)")
    parser.add_argument('--threads', type=int,
                        help="worker processes (default: QTE_THREADS or "
                             "the number of cores)")
    parser.add_argument('--log-level', default='WARNING',
                        choices=LOG_LEVELS, type=str.upper)


def _estimation(parser):
    parser.add_argument('--tau', help="levels: 0.25,0.5,0.75 or "
                                      "start:stop:step")
    parser.add_argument('--a-min', dest='a_min',
                        help="lower bound of alpha, scalar or comma list")
    parser.add_argument('--a-max', dest='a_max',
                        help="upper bound of alpha, scalar or comma list")
    parser.add_argument('--b-min', dest='b_min', type=float)
    parser.add_argument('--b-max', dest='b_max', type=float)
    parser.add_argument('--grid-points', dest='grid_points', type=int)
    parser.add_argument('--refine-tol', dest='refine_tol', type=float)
    parser.add_argument('--quad-scheme', dest='quad_scheme',
                        choices=('auto', 'tensor-gauss', 'halton'))
    parser.add_argument('--quad-nodes', dest='quad_nodes', type=int)
    parser.add_argument('--qr-method', dest='qr_method',
                        choices=('interior-point', 'highs'))
    parser.add_argument('--qr-tol', dest='qr_tol', type=float)
    parser.add_argument('--qr-max-iter', dest='qr_max_iter', type=int)
    parser.add_argument('--seed', type=int)


def build_parser():
    """Return the argument parser of the panel-qte command."""
    parser = argparse.ArgumentParser(
        prog='panel-qte',
        description="Quantile treatment effects for panel data.")
    parser.add_argument('--version', action='version',
                        version=panel_qte.__version__)
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    estimate = commands.add_parser(
        'estimate', help="estimate the coefficient path")
    estimate.add_argument('--data', required=True, help="panel CSV file")
    _estimation(estimate)
    _common(estimate)

    boot = commands.add_parser(
        'bootstrap', help="estimate and bootstrap the coefficient path")
    boot.add_argument('--data', required=True, help="panel CSV file")
    boot.add_argument('--reps', type=int, help="bootstrap replicates")
    _estimation(boot)
    _common(boot)

    test = commands.add_parser(
        'test', help="uniform test on a bootstrap bundle")
    test.add_argument('--bundle', required=True,
                      help="result file of the bootstrap command")
    test.add_argument('--null', required=True, choices=NULL_KINDS)
    test.add_argument('--level', type=float)
    test.add_argument('--r', help="known-r null: one value per level, "
                                  "comma separated")
    _common(test)

    simulate = commands.add_parser(
        'simulate', help="run a Monte Carlo experiment")
    simulate.add_argument('--dgp', required=True, choices=KINDS)
    simulate.add_argument('--n', type=int, required=True)
    simulate.add_argument('--rho2', type=float, default=0.5)
    simulate.add_argument('--reps', type=int, help="Monte Carlo replicates")
    simulate.add_argument('--boot-reps', dest='boot_reps', type=int,
                          help="bootstrap replicates for the coverage rows")
    simulate.add_argument('--estimators',
                          help="comma list out of two-step, cic, did")
    _estimation(simulate)
    _common(simulate)

    cic = commands.add_parser(
        'cic', help="changes-in-changes and DID baselines")
    cic.add_argument('--data', required=True, help="panel CSV file")
    cic.add_argument('--tau', help="levels: 0.25,0.5,0.75 or "
                                   "start:stop:step")
    _common(cic)
    return parser


def main(argv=None):
    """Parse the command line, run the command, return the exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    LOGGER.debug("Arguments: %s", args)
    return manager.run_command(args)


if __name__ == '__main__':
    sys.exit(main())
