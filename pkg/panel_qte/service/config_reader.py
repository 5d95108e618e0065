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
"""Build estimator settings from a run configuration."""

import copy
import logging

import simplejson as json
import yaml

import panel_qte.exceptions as qte_exc
from panel_qte.core.config import EstimationConfig
from panel_qte.service.validation import read_yaml_or_json
from panel_qte.service.validation import RunConfigValidator

LOGGER = logging.getLogger(__name__)

# Run configuration keys passed unchanged to EstimationConfig.
_PASSTHROUGH = ('grid_points', 'refine_tol', 'quad_scheme', 'quad_nodes',
                'seed', 'qr_method', 'qr_tol', 'qr_max_iter', 'threads')


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _bounds(low, high):
    """Pair scalar or per-coordinate lower and upper bounds."""
    low = _as_list(low)
    high = _as_list(high)
    if len(low) == 1 and len(high) > 1:
        low = low * len(high)
    if len(high) == 1 and len(low) > 1:
        high = high * len(low)
    if len(low) != len(high):
        raise ValueError("a_min has {} entries but a_max has {}".format(
            len(low), len(high)))
    return list(zip(low, high))


class RunConfigReader(object):
    """Class that loads a run configuration and builds estimator settings.

    Precedence is: schema defaults, then the configuration file, then
    the explicit overrides (command line flags).
    """

    def __init__(self, validator=None):
        """Initializer."""
        self._validator = validator or RunConfigValidator()

    def load(self, path=None, overrides=None):
        """Read, merge and validate a run configuration.

        :param path: optional yaml or json file.
        :param overrides: dict of values that take precedence over the
        file; None values are ignored.
        :returns: the validated configuration dict, defaults filled in.
        :raises: PanelQteConfigurationReadError, PanelQteConfigValidationError
        """
        run_config = {}
        if path is not None:
            try:
                run_config = read_yaml_or_json(path) or {}
            except (IOError, json.JSONDecodeError, yaml.YAMLError) as error:
                msg = "Failed to read configuration {}: {}".format(path, error)
                LOGGER.error(msg)
                raise qte_exc.PanelQteConfigurationReadError(msg)
            if not isinstance(run_config, dict):
                msg = "configuration {} is not a key/value document".format(
                    path)
                LOGGER.error(msg)
                raise qte_exc.PanelQteConfigurationReadError(msg)
        run_config = copy.deepcopy(run_config)
        for key, value in (overrides or {}).items():
            if value is not None:
                run_config[key] = value
        self._validator.validate(run_config)
        return run_config

    def read_estimation_config(self, run_config):
        """Create the EstimationConfig of a validated run configuration.

        :raises: PanelQteConfigurationReadError
        """
        try:
            settings = dict(
                (key, run_config[key]) for key in _PASSTHROUGH
                if run_config.get(key) is not None)
            settings['tau_grid'] = run_config['tau']
            settings['a_bounds'] = _bounds(run_config['a_min'],
                                           run_config['a_max'])
            b_min = run_config.get('b_min')
            b_max = run_config.get('b_max')
            if (b_min is None) != (b_max is None):
                raise ValueError("b_min and b_max must be given together")
            if b_min is not None:
                settings['b_bounds'] = (b_min, b_max)
            config = EstimationConfig(**settings)
        except (KeyError, ValueError, TypeError) as error:
            msg = "Failed to create estimator settings from config: " \
                "error({})".format(error)
            LOGGER.error(msg)
            raise qte_exc.PanelQteConfigurationReadError(msg)
        LOGGER.debug("Estimator settings: %s", config)
        return config
