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
"""Panel QTE library facade: estimate, bootstrap, test and compare."""

import logging

import pkg_resources

from panel_qte.baseline import cic as qte_cic
from panel_qte.estimation import estimator
from panel_qte.inference import bootstrap as qte_bootstrap
from panel_qte.inference import testing
from panel_qte.montecarlo import dgp
from panel_qte.montecarlo import harness
from panel_qte.service.config_reader import RunConfigReader
from panel_qte.service.validation import RunConfigValidator

resource_package = __name__
config_schema = "schemas/panel-qte-config-schema.yml"

LOGGER = logging.getLogger("panel_qte")


class PanelQteEstimator(object):
    """Two-step quantile treatment effect estimator for panel data.

    An instance holds one validated run configuration: the quantile grid,
    the search box of the treatment coefficient, the quadrature and
    first-step solver settings, the number of bootstrap replicates and the
    test level. Every method runs on a PanelDataset with those settings.
    """

    def __init__(self, run_config=None, config_path=None, schema_path=None):
        """Initialize an estimator from a run configuration.

        :param run_config: dict of run configuration keys, taking
        precedence over the file (default: None)
        :param config_path: yaml or json run configuration file
        (default: None)
        :param schema_path: User defined schema (default: from package)
        """
        LOGGER.debug("PanelQteEstimator initialize")
        if schema_path is None:
            schema_path = pkg_resources.resource_filename(resource_package,
                                                          config_schema)
        reader = RunConfigReader(RunConfigValidator(schema_path))
        self._run_config = reader.load(config_path, run_config)
        self._config = reader.read_estimation_config(self._run_config)

    @property
    def config(self):
        """The EstimationConfig in use."""
        return self._config

    @property
    def run_config(self):
        """The validated run configuration, defaults filled in."""
        return dict(self._run_config)

    def estimate(self, dataset, threads=None):
        """Estimate the coefficient path.

        :return: QtePath
        """
        return estimator.estimate(dataset, self._config, threads=threads)

    def bootstrap(self, dataset, B=None, base=None, threads=None):
        """Draw bootstrap replicates (default: the configured reps).

        :return: BootstrapDraws
        """
        # pylint: disable=invalid-name
        B = B or self._run_config['reps']
        return qte_bootstrap.bootstrap(dataset, self._config, B, base=base,
                                       threads=threads)

    def test(self, draws, null_kind, level=None, r_known=None):
        """Run a uniform test (default level: the configured level).

        :return: TestResult
        """
        level = level or self._run_config['level']
        return testing.uniform_test(draws, null_kind, level,
                                    r_known=r_known)

    def cic(self, dataset):
        """Run the changes-in-changes baseline on the configured grid.

        :return: CicEstimate
        """
        return qte_cic.cic(dataset, self._config.tau_grid)

    @staticmethod
    def did(dataset):
        """Return the mean difference-in-differences estimate."""
        return qte_cic.did(dataset)

    def simulate(self, kind, n, rho2, estimators=('two-step',), R=None,
                 B=None, threads=None):
        """Run a Monte Carlo experiment with the configured settings.

        :return: McReport
        """
        # pylint: disable=invalid-name,too-many-arguments
        spec = dgp.DgpSpec.from_rho2(kind, n, rho2,
                                     seed=self._run_config['seed'])
        return harness.run_mc(spec, estimators,
                              R or self._run_config['reps'], self._config,
                              B=B, threads=threads)
