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
"""Command orchestration behind the panel-qte command line.

Each command reads its inputs, runs the library and writes a result file
(see :mod:`panel_qte.service.manifest`). :func:`run_command` maps library
errors to exit codes and a machine-readable error payload on stderr.
"""

import logging
import sys
from time import time

import simplejson as json

import panel_qte.exceptions as qte_exc
from panel_qte.baseline import cic as qte_cic
from panel_qte.estimation import estimator
from panel_qte.estimation.estimator import QtePath
from panel_qte.inference import bootstrap as qte_bootstrap
from panel_qte.inference import testing
from panel_qte.montecarlo import dgp
from panel_qte.montecarlo import harness
from panel_qte.service import ingest
from panel_qte.service import manifest as qte_manifest
from panel_qte.service.config_reader import RunConfigReader
from panel_qte.utils import parallel

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0

# Run configuration keys that may be given as command line flags.
CONFIG_KEYS = ('tau', 'a_min', 'a_max', 'b_min', 'b_max', 'grid_points',
               'refine_tol', 'quad_scheme', 'quad_nodes', 'seed',
               'qr_method', 'qr_tol', 'qr_max_iter', 'reps', 'level',
               'threads')

CI_LEVELS = (0.90, 0.95)


def _parse_list(text):
    if text is None:
        return None
    return [float(v) for v in str(text).split(',') if v.strip()]


def bundle_records(draws):
    """Return the records of a bootstrap bundle.

    The bundle holds the base path ('base'), every replicate path
    ('replicate'), the dropped replicates ('failure') and the pointwise
    percentile intervals ('ci').
    """
    records = []
    for record in draws.base.records():
        record['kind'] = 'base'
        records.append(record)
    failed = set(index for index, _ in draws.failures)
    kept = [b for b in range(draws.B) if b not in failed]
    for b, path in zip(kept, draws.paths):
        for record in path.records():
            record.update(kind='replicate', replicate=b,
                          seed=draws.replicate_seeds[b])
            records.append(record)
    for index, message in draws.failures:
        records.append({'kind': 'failure', 'replicate': index,
                        'message': message})
    for tau in draws.base.tau_grid:
        for level in CI_LEVELS:
            lower, upper = qte_bootstrap.pointwise_ci(draws, tau, level)
            records.append({'kind': 'ci', 'tau': tau, 'level': level,
                            'lower': lower.tolist(),
                            'upper': upper.tolist()})
    return records


def draws_from_bundle(manifest, records):
    """Rebuild BootstrapDraws from a bootstrap bundle."""
    base = QtePath.from_records(
        [r for r in records if r.get('kind') == 'base'])
    replicates = {}
    seeds = {}
    for record in records:
        if record.get('kind') == 'replicate':
            replicates.setdefault(record['replicate'], []).append(record)
            seeds[record['replicate']] = record['seed']
    failures = [(r['replicate'], r['message']) for r in records
                if r.get('kind') == 'failure']
    order = sorted(replicates)
    return qte_bootstrap.BootstrapDraws(
        B=manifest['config'].get('reps', len(order) + len(failures)),
        paths=[QtePath.from_records(replicates[b]) for b in order],
        replicate_seeds=[seeds[b] for b in order],
        base=base, failures=failures)


class RunManager(object):
    """Runs the panel-qte commands.

    Args:
        reader (RunConfigReader): configuration reader (default: the
            packaged schema).
    """

    def __init__(self, reader=None):
        """Initialize the run manager."""
        self._reader = reader or RunConfigReader()

    def _settings(self, args):
        """Return (run configuration, EstimationConfig) for ``args``."""
        overrides = dict((key, getattr(args, key, None))
                         for key in CONFIG_KEYS)
        for key in ('a_min', 'a_max'):
            values = _parse_list(overrides[key])
            if values is not None:
                overrides[key] = values[0] if len(values) == 1 else values
        run_config = self._reader.load(getattr(args, 'config', None),
                                       overrides)
        run_config['threads'] = parallel.resolve_threads(
            run_config.get('threads'))
        return run_config, self._reader.read_estimation_config(run_config)

    @staticmethod
    def _manifest(command, run_config, inputs, timings):
        digests = dict((path, qte_manifest.file_digest(path))
                       for path in inputs)
        return qte_manifest.RunManifest(command=command, config=run_config,
                                        input_digests=digests,
                                        seed=run_config.get('seed'),
                                        timings=timings)

    def estimate(self, args):
        """Estimate the coefficient path of a panel file."""
        run_config, config = self._settings(args)
        dataset = ingest.ingest_csv(args.data)
        start_time = time()
        path = estimator.estimate(dataset, config)
        timings = {'estimate': time() - start_time}
        manifest = self._manifest('estimate', run_config, [args.data],
                                  timings)
        qte_manifest.write_results(args.out, manifest, path.records())

    def bootstrap(self, args):
        """Estimate and bootstrap; write a bundle the test command reads."""
        run_config, config = self._settings(args)
        dataset = ingest.ingest_csv(args.data)
        start_time = time()
        base = estimator.estimate(dataset, config)
        timings = {'estimate': time() - start_time}
        start_time = time()
        draws = qte_bootstrap.bootstrap(dataset, config, run_config['reps'],
                                        base=base)
        timings['bootstrap'] = time() - start_time
        manifest = self._manifest('bootstrap', run_config, [args.data],
                                  timings)
        qte_manifest.write_results(args.out, manifest,
                                   bundle_records(draws))

    def test(self, args):
        """Run the uniform test on a bootstrap bundle."""
        overrides = {'level': getattr(args, 'level', None)}
        run_config = self._reader.load(getattr(args, 'config', None),
                                       overrides)
        bundle_manifest, records = qte_manifest.read_results(args.bundle)
        draws = draws_from_bundle(bundle_manifest, records)
        r_known = _parse_list(getattr(args, 'r', None))
        result = testing.uniform_test(draws, args.null, run_config['level'],
                                      r_known=r_known)
        manifest = self._manifest('test', run_config, [args.bundle], {})
        qte_manifest.write_results(args.out, manifest, [result.to_record()])
        return result

    def simulate(self, args):
        """Run a Monte Carlo experiment and print its table."""
        run_config, config = self._settings(args)
        spec = dgp.DgpSpec.from_rho2(args.dgp, args.n, args.rho2,
                                     seed=run_config['seed'])
        names = args.estimators
        if names is None:
            names = 'two-step,cic,did' if spec.kind == 'sim2' else \
                'two-step'
        start_time = time()
        report = harness.run_mc(spec, names.split(','), run_config['reps'],
                                config, B=getattr(args, 'boot_reps', None))
        timings = {'simulate': time() - start_time}
        manifest = self._manifest('simulate', run_config, [], timings)
        qte_manifest.write_results(args.out, manifest, report.records())
        if args.out != '-':
            sys.stdout.write(report.table() + "\n")
        return report

    def cic(self, args):
        """Run the changes-in-changes and DID baselines on a panel file."""
        run_config, config = self._settings(args)
        dataset = ingest.ingest_csv(args.data)
        start_time = time()
        estimate = qte_cic.cic(dataset, config.tau_grid)
        did = qte_cic.did(dataset)
        timings = {'cic': time() - start_time}
        records = []
        for record in estimate.records():
            record['kind'] = 'qte'
            records.append(record)
        records.append({'kind': 'did', 'did': did})
        manifest = self._manifest('cic', run_config, [args.data], timings)
        qte_manifest.write_results(args.out, manifest, records)


def error_payload(error, exit_code):
    """Return the stderr payload describing ``error``."""
    return json.dumps({'error': error.__class__.__name__,
                       'message': str(error),
                       'exit_code': exit_code}, sort_keys=True)


def run_command(args, manager=None):
    """Run ``args.command``; return the process exit code.

    0 on success, 2 when the input or configuration is unusable, 3 when
    a numerical routine failed.
    """
    manager = manager or RunManager()
    handler = getattr(manager, args.command.replace('-', '_'))
    LOGGER.info("Running %s", args.command)
    start_time = time()
    try:
        handler(args)
    except qte_exc.PanelQteError as error:
        LOGGER.debug("%s failed: %s", args.command, error)
        sys.stderr.write(error_payload(error, error.exit_code) + "\n")
        return error.exit_code
    except (ValueError, IOError) as error:
        exit_code = qte_exc.PanelQteValidationError.exit_code
        sys.stderr.write(error_payload(error, exit_code) + "\n")
        return exit_code
    LOGGER.info("%s took %.5f seconds", args.command, time() - start_time)
    return EXIT_OK
