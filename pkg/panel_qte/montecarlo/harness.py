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
"""Monte Carlo replication harness.

Replicate r draws its panel from the design with seed
replicate_seed(seed, r), runs each requested estimator on it and records
the estimates of alpha(tau) over the configured grid. The replicates are
then reduced, in replicate order, into bias, standard deviation and
mean squared error rows (standard deviations use the denominator R) and,
when bootstrap draws were requested, percentile interval coverage.
"""

import functools
import logging
import time

import attr
import numpy as np

import panel_qte.exceptions as qte_exc
from panel_qte.baseline import cic as qte_cic
from panel_qte.estimation import estimator
from panel_qte.inference import bootstrap as qte_bootstrap
from panel_qte.montecarlo import dgp
from panel_qte.utils import parallel
from panel_qte.utils import seeding

LOGGER = logging.getLogger(__name__)

ESTIMATORS = ('two-step', 'cic', 'did')
COVERAGE_LEVELS = (0.90, 0.95)

# Largest share of failed replicates tolerated by run_mc().
FAILURE_CAP = 0.05

_TWO_GROUP_ESTIMATORS = ('cic', 'did')


@attr.s(frozen=True)
class McRow(object):
    """Summary of one estimator at one quantile level."""

    tau = attr.ib()
    estimator = attr.ib()
    bias = attr.ib(converter=float)
    std = attr.ib(converter=float)
    mse = attr.ib(converter=float)
    coverage90 = attr.ib(default=None)
    coverage95 = attr.ib(default=None)

    def to_record(self):
        """Return the row as a JSON-serializable dict."""
        return attr.asdict(self)


@attr.s(frozen=True, eq=False)
class McReport(object):
    """Rows of a Monte Carlo experiment and what produced them.

    Attributes:
        rows: McRow objects ordered by tau, then by estimator.
        R: number of replicates requested.
        failures: (replicate index, message) of the dropped replicates.
        dgp: the design as a dict.
        config: snapshot of the estimator configuration.
        B: bootstrap replicates per Monte Carlo replicate, or None.
    """

    rows = attr.ib(converter=tuple)
    R = attr.ib()  # pylint: disable=invalid-name
    failures = attr.ib(default=(), converter=tuple)
    dgp = attr.ib(default=None)
    config = attr.ib(default=None)
    B = attr.ib(default=None)  # pylint: disable=invalid-name

    @property
    def estimators(self):
        """Estimator names in first-seen order."""
        names = []
        for row in self.rows:
            if row.estimator not in names:
                names.append(row.estimator)
        return names

    def row(self, tau, name):
        """Return the row of estimator ``name`` at level ``tau``."""
        for candidate in self.rows:
            if candidate.estimator == name and \
                    abs(candidate.tau - tau) <= 1e-12:
                return candidate
        raise KeyError("no row for {} at tau {}".format(name, tau))

    def records(self):
        """Yield one JSON-serializable dict per row."""
        for row in self.rows:
            yield row.to_record()

    def table(self):
        """Render the rows as a text table.

        One block per level with bias, std and mse lines (and the
        coverage lines when available), one column per estimator.
        """
        names = self.estimators
        stats = ['bias', 'std', 'mse']
        if any(row.coverage90 is not None for row in self.rows):
            stats += ['coverage90', 'coverage95']
        lines = ["{:<6} {:<10}".format('tau', '') +
                 "".join("{:>12}".format(name) for name in names)]
        taus = sorted(set(row.tau for row in self.rows))
        for tau in taus:
            for position, stat in enumerate(stats):
                label = "{:<6.2f}".format(tau) if position == 0 else " " * 6
                cells = []
                for name in names:
                    value = getattr(self.row(tau, name), stat)
                    cells.append("{:>12}".format(
                        "-" if value is None else "{:.4f}".format(value)))
                lines.append("{} {:<10}".format(label, stat) +
                             "".join(cells))
        return "\n".join(lines)


def summarize(values, truth):
    """Return (bias, std, mse) of replicate estimates.

    Args:
        values: (R, K) estimates.
        truth: K true values.
    """
    values = np.asarray(values, dtype=float)
    errors = values - np.asarray(truth, dtype=float)
    bias = errors.mean(axis=0)
    std = values.std(axis=0)
    mse = np.mean(errors ** 2, axis=0)
    return bias, std, mse


def coverage(lower, upper, truth):
    """Return the share of the (R, K) intervals that contain ``truth``."""
    truth = np.asarray(truth, dtype=float)
    inside = (np.asarray(lower) <= truth) & (truth <= np.asarray(upper))
    return inside.mean(axis=0)


def _check_estimators(kind, estimators):
    estimators = tuple(estimators)
    if not estimators:
        raise ValueError("no estimator requested")
    unknown = [name for name in estimators if name not in ESTIMATORS]
    if unknown:
        raise ValueError("unknown estimators: {}".format(", ".join(unknown)))
    two_group = [name for name in estimators
                 if name in _TWO_GROUP_ESTIMATORS]
    if two_group and kind != 'sim2':
        raise qte_exc.NotDidShapeError(
            "{} need the two-group design, not {}".format(
                ", ".join(two_group), kind))
    return tuple(name for name in ESTIMATORS if name in estimators)


def _run_estimators(simulated, estimators, config, B, seed):
    """Return {estimator: K estimates} and the interval bounds."""
    dataset = simulated.dataset
    levels = np.asarray(config.tau_grid)
    estimates = {}
    intervals = {}
    if 'two-step' in estimators:
        path = estimator.estimate(dataset, config, threads=1)
        estimates['two-step'] = path.alpha[:, 0]
        if B:
            draws = qte_bootstrap.bootstrap(
                dataset, attr.evolve(config, seed=seed), B, base=path,
                threads=1)
            intervals['two-step'] = [
                qte_bootstrap.percentile_interval(
                    draws.alpha_draws[:, :, 0], level)
                for level in COVERAGE_LEVELS]
    if 'cic' in estimators:
        estimates['cic'] = qte_cic.cic(dataset, levels).population_qte
    if 'did' in estimators:
        estimates['did'] = np.full(levels.size, qte_cic.did(dataset))
    return estimates, intervals


def _replicate(dgp_spec, estimators, config, B, seed):
    """Run one replicate; return (outcome, None) or (None, message)."""
    simulated = dgp.generate(attr.evolve(dgp_spec, seed=seed))
    try:
        outcome = _run_estimators(simulated, estimators, config, B, seed)
    except qte_exc.PanelQteError as err:
        return None, str(err)
    return outcome, None


def run_mc(dgp_spec, estimators, R, config, B=None, threads=None):
    """Run a Monte Carlo experiment.

    Args:
        dgp_spec (DgpSpec): the design; its seed is the run seed.
        estimators: names out of ``ESTIMATORS``. ``cic`` and ``did``
            need the two-group design; ``cic`` reports its population
            contrast and ``did`` its mean contrast at every level.
        R: number of replicates, at least 2.
        config (EstimationConfig): estimator settings and quantile grid.
        B: bootstrap replicates for the two-step coverage (none when
            omitted).
        threads: worker processes across replicates (default
            ``config.threads``).

    Returns:
        McReport

    Raises:
        TooManyFailuresError: more than 5% of the replicates failed.
    """
    if R < 2:
        raise ValueError("need at least 2 replicates, got {}".format(R))
    if B is not None and B < 2:
        raise ValueError("need at least 2 bootstrap replicates, got "
                         "{}".format(B))
    estimators = _check_estimators(dgp_spec.kind, estimators)

    LOGGER.info("Monte Carlo: %s n=%d rho=%.4f, %d replicates of %s",
                dgp_spec.kind, dgp_spec.n, dgp_spec.rho, R,
                ", ".join(estimators))
    seeds = [seeding.replicate_seed(dgp_spec.seed, r) for r in range(R)]
    start_time = time.time()
    task = functools.partial(_replicate, dgp_spec, estimators, config, B)
    results = parallel.ordered_map(task, seeds, threads or config.threads)
    LOGGER.debug("Ran %d Monte Carlo replicates, took %.5f seconds", R,
                 time.time() - start_time)

    outcomes = []
    failures = []
    for index, (outcome, message) in enumerate(results):
        if outcome is None:
            failures.append((index, message))
        else:
            outcomes.append(outcome)
    if failures:
        LOGGER.warning("Dropped %d of %d Monte Carlo replicates",
                       len(failures), R)
        for index, message in failures:
            LOGGER.debug("Replicate %d failed: %s", index, message)
    if len(failures) > FAILURE_CAP * R:
        raise qte_exc.TooManyFailuresError(len(failures), R, FAILURE_CAP)

    truth = dgp.true_alpha(np.asarray(config.tau_grid))
    summaries = {}
    for name in estimators:
        values = np.vstack([estimates[name] for estimates, _ in outcomes])
        summary = list(summarize(values, truth))
        if B and name == 'two-step':
            for position in range(len(COVERAGE_LEVELS)):
                lower = np.vstack([i[name][position][0]
                                   for _, i in outcomes])
                upper = np.vstack([i[name][position][1]
                                   for _, i in outcomes])
                summary.append(coverage(lower, upper, truth))
        summaries[name] = summary

    rows = []
    for k, tau in enumerate(config.tau_grid):
        for name in estimators:
            stats = [float(s[k]) for s in summaries[name]]
            rows.append(McRow(tau, name, *stats))

    return McReport(rows=rows, R=R, failures=failures,
                    dgp=attr.asdict(dgp_spec), config=config.snapshot(),
                    B=B)
