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
"""Schema validation of panel-qte run configurations.

A run configuration is the flat mapping read from ``--config`` (yaml or
json) and merged with the command line: the quantile grid ``tau``, the
candidate box ``a_min``/``a_max``, the optional coefficient box
``b_min``/``b_max``, the search settings ``grid_points`` and
``refine_tol``, the quadrature ``quad_scheme``, ``quad_nodes`` and
``seed``, the first-step solver ``qr_method``, ``qr_tol`` and
``qr_max_iter``, and the bootstrap ``reps``, ``level`` and ``threads``.
:class:`RunConfigValidator` checks it against
``schemas/panel-qte-config-schema.yml`` and fills in the schema defaults
of missing keys; cross-field checks (a_min < a_max, a well formed grid)
are left to :mod:`panel_qte.core.config`.
"""

import logging
from time import time

import jsonschema
from jsonschema import Draft4Validator
from jsonschema import validators
import pkg_resources
import simplejson as json
import yaml

import panel_qte.exceptions as qte_exc

LOGGER = logging.getLogger(__name__)
DEFAULT_SCHEMA = pkg_resources.resource_filename(
    'panel_qte', 'schemas/panel-qte-config-schema.yml')


def read_yaml(target):
    """Open and read a yaml file."""
    with open(target, 'r') as yaml_file:
        yaml_data = yaml.load(yaml_file, Loader=yaml.FullLoader)
    return yaml_data


def read_json(target):
    """Open and read a json file."""
    with open(target, 'r') as json_file:
        json_data = json.loads(json_file.read())
    return json_data


def read_yaml_or_json(target):
    """Read json or yaml, return a dict."""
    if target.lower().endswith('.json'):
        return read_json(target)
    if target.lower().endswith('.yaml') or target.lower().endswith('.yml'):
        return read_yaml(target)
    raise qte_exc.PanelQteConfigurationReadError(
        'json or yaml file expected, got {}'.format(target))


class RunConfigValidator(object):
    """A schema validator for panel-qte run configurations.

    Accepts a flat run configuration and validates it against the
    packaged schema, filling in the schema defaults of missing keys.

    Optionally accepts an alternate json or yaml schema to validate against.
    """

    def __init__(self, schema=DEFAULT_SCHEMA):
        """Choose schema and initialize extended Draft4Validator.

        Raises:
            PanelQteSchemaError: Failed to read or validate the
            configuration schema file.
        """
        try:
            self.schema = read_yaml_or_json(schema)
        except json.JSONDecodeError as error:
            LOGGER.error("%s", error)
            raise qte_exc.PanelQteSchemaError(
                'configuration schema could not be decoded.')
        except IOError as error:
            LOGGER.error("%s", error)
            raise qte_exc.PanelQteSchemaError(
                'configuration schema could not be read.')

        try:
            Draft4Validator.check_schema(self.schema)
            self.validate_properties = Draft4Validator.VALIDATORS["properties"]
            validator_with_defaults = validators.extend(
                Draft4Validator,
                {"properties": self.__set_defaults})
            self.validator = validator_with_defaults(self.schema)
        except jsonschema.SchemaError as error:
            LOGGER.error("%s", error)
            raise qte_exc.PanelQteSchemaError("Invalid configuration schema")

    def __set_defaults(self, validator, properties, instance, schema):
        """Fill in defaults, then run the stock properties check."""
        if validator.is_type(instance, "object"):
            for item, subschema in list(properties.items()):
                if "default" in subschema:
                    instance.setdefault(item, subschema["default"])

        for error in self.validate_properties(validator, properties, instance,
                                              schema):
            yield error

    def validate(self, cfg):
        """Check a config against the schema, returns `None` at success."""
        LOGGER.debug("Validating run configuration against the schema.")
        start_time = time()

        try:
            self.validator.validate(cfg)
        except jsonschema.exceptions.ValidationError as err:
            raise qte_exc.PanelQteConfigValidationError(str(err))
        finally:
            LOGGER.debug("validate took %.5f seconds.", (time() - start_time))
