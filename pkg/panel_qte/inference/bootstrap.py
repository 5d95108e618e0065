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
"""Nonparametric unit-level bootstrap and percentile bands.

Each replicate draws n units with replacement, keeping the whole
T-period record of a unit together, and re-runs the estimator with the
base quantile grid, bounds and quadrature rule. Replicate b draws from
its own random stream seeded by splitmix64 of (seed, b), so results do
not depend on how replicates are scheduled.
"""

import functools
import logging
import time

import attr
import numpy as np

import panel_qte.exceptions as qte_exc
from panel_qte.estimation import estimator
from panel_qte.utils import parallel
from panel_qte.utils import seeding

LOGGER = logging.getLogger(__name__)

# Largest share of failed replicates tolerated by bootstrap().
FAILURE_CAP = 0.10


@attr.s(frozen=True, eq=False)
class BootstrapDraws(object):
    """Replicate coefficient paths.

    Attributes:
        B: number of replicates requested.
        paths: the successful replicate QtePaths, in replicate order.
        replicate_seeds: the seed of every requested replicate.
        base: the QtePath of the original panel.
        failures: (replicate index, message) of the dropped replicates.
    """

    B = attr.ib()  # pylint: disable=invalid-name
    paths = attr.ib(converter=tuple)
    replicate_seeds = attr.ib(converter=tuple)
    base = attr.ib()
    failures = attr.ib(default=(), converter=tuple)

    @property
    def alpha_draws(self):
        """Replicate coefficients, shape (B_ok, K, d_X)."""
        if not self.paths:
            return np.empty((0,) + self.base.alpha.shape)
        return np.stack([p.alpha for p in self.paths])


def _replicate(dataset, config, rule, seed):
    """Run one replicate; return (path, None) or (None, message)."""
    rng = np.random.default_rng(seed)
    indices = rng.integers(0, dataset.n, dataset.n)
    try:
        path = estimator.estimate(dataset.take(indices), config, rule=rule,
                                  threads=1)
    except qte_exc.PanelQteError as err:
        return None, str(err)
    return attr.evolve(path, diagnostics=()), None


def bootstrap(dataset, config, B, base=None, rule=None, threads=None):
    """Draw B bootstrap replicates of the coefficient path.

    Args:
        dataset (PanelDataset): the original panel.
        config (EstimationConfig): estimator settings; ``config.seed``
            drives the resampling.
        B: number of replicates, at least 2.
        base (QtePath): estimate on the original panel (computed when
            omitted).
        rule (QuadratureRule): rule of the base estimate (rebuilt from
            the configuration when omitted).
        threads: worker processes across replicates (default
            ``config.threads``).

    Returns:
        BootstrapDraws

    Raises:
        TooManyFailuresError: more than 10% of the replicates failed.
    """
    if B < 2:
        raise ValueError("need at least 2 bootstrap replicates, got "
                         "{}".format(B))
    if rule is None:
        rule = estimator.build_rule(dataset, config)
    if base is None:
        base = estimator.estimate(dataset, config, rule=rule,
                                  threads=threads)

    seeds = [seeding.replicate_seed(config.seed, b) for b in range(B)]
    start_time = time.time()
    task = functools.partial(_replicate, dataset, config, rule)
    results = parallel.ordered_map(task, seeds, threads or config.threads)
    LOGGER.debug("Ran %d bootstrap replicates, took %.5f seconds", B,
                 time.time() - start_time)

    paths = []
    failures = []
    for index, (path, message) in enumerate(results):
        if path is None:
            failures.append((index, message))
        else:
            paths.append(path)
    if failures:
        LOGGER.warning("Dropped %d of %d bootstrap replicates",
                       len(failures), B)
        for index, message in failures:
            LOGGER.debug("Replicate %d failed: %s", index, message)
    if len(failures) > FAILURE_CAP * B:
        raise qte_exc.TooManyFailuresError(len(failures), B, FAILURE_CAP)

    return BootstrapDraws(B=B, paths=paths, replicate_seeds=seeds,
                          base=base, failures=failures)


def percentile_interval(values, level):
    """Return the percentile interval of ``values`` along axis 0.

    The endpoints are the (1 - level)/2 and (1 + level)/2 quantiles,
    taken as the left-continuous inverse of the empirical distribution.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1), got {}".format(level))
    values = np.asarray(values, dtype=float)
    if values.shape[0] == 0:
        raise ValueError("no values to build an interval from")
    lower, upper = np.quantile(values, [(1.0 - level) / 2.0,
                                        (1.0 + level) / 2.0],
                               axis=0, method='inverted_cdf')
    return lower, upper


def pointwise_ci(draws, tau, level):
    """Return the percentile interval of alpha at ``tau``.

    Returns:
        (lower, upper) d_X-vectors.
    """
    k = draws.base.index_of(tau)
    return percentile_interval(draws.alpha_draws[:, k, :], level)


def uniform_band(draws, level):
    """Return a sup-norm band over the quantile grid.

    The half-width of coordinate l is the ``level`` quantile of
    max_tau |alpha*_l(tau) - alpha_l(tau)| across replicates.

    Returns:
        (lower, upper) arrays of shape (K, d_X).
    """
    deviations = np.abs(draws.alpha_draws - draws.base.alpha)
    if deviations.shape[0] == 0:
        raise ValueError("no replicates to build a band from")
    half_width = np.quantile(deviations.max(axis=1), level, axis=0,
                             method='inverted_cdf')
    return draws.base.alpha - half_width, draws.base.alpha + half_width
