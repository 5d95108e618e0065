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
"""Uniform tests on the whole coefficient path.

The statistic is S_n = n * mean_tau ||alpha(tau) - r(tau)||^2 over the
quantile grid, a Riemann approximation of the integral over the grid's
range. Its null distribution is approximated by the bootstrap
statistics S*_b built from the replicate paths; the critical value is
their (1 - level) quantile.

Null hypotheses:

* ``known-r``: alpha(tau) = r(tau) for a supplied path r;
* ``zero``: alpha(tau) = 0 at every level;
* ``constant``: alpha(tau) does not depend on tau, r being estimated
  by alpha(0.5).
"""

import logging

import attr
import numpy as np

import panel_qte.exceptions as qte_exc

LOGGER = logging.getLogger(__name__)

NULL_KINDS = ('known-r', 'constant', 'zero')


@attr.s(frozen=True)
class TestResult(object):
    """Outcome of :func:`uniform_test`."""

    __test__ = False

    statistic = attr.ib()
    critical_value = attr.ib()
    level = attr.ib()
    reject = attr.ib()
    null_kind = attr.ib()
    replicates = attr.ib(default=0)

    def to_record(self):
        """Return a JSON-serializable dict."""
        return {'statistic': self.statistic,
                'critical_value': self.critical_value,
                'level': self.level,
                'reject': self.reject,
                'null': self.null_kind,
                'replicates': self.replicates}


def path_statistic(n, deviations):
    """Return n * mean over levels of the squared norm of ``deviations``.

    Args:
        n: sample size.
        deviations: (..., K, d_X) array.
    """
    deviations = np.asarray(deviations, dtype=float)
    return n * np.mean(np.sum(deviations ** 2, axis=-1), axis=-1)


def _median_index(tau_grid):
    for k, tau in enumerate(tau_grid):
        if abs(tau - 0.5) <= 1e-12:
            return k
    raise qte_exc.MissingMedianError(
        "the constant-effect null needs 0.5 on the quantile grid {}".format(
            list(tau_grid)))


def _as_path(value, shape):
    path = np.asarray(value, dtype=float)
    if path.shape == shape[:1]:
        path = path[:, np.newaxis]
    if path.shape != shape:
        raise ValueError("r must hold one d_X-vector per level: expected "
                         "shape {}, got {}".format(shape, path.shape))
    return path


def uniform_test(draws, null_kind, level, r_known=None):
    """Test a null hypothesis on the whole coefficient path.

    Args:
        draws (BootstrapDraws): base path and replicates.
        null_kind: 'known-r', 'constant' or 'zero'.
        level: significance level in (0, 1).
        r_known: (K,) or (K, d_X) path under the 'known-r' null.

    Returns:
        TestResult

    Raises:
        MissingMedianError: 'constant' null with 0.5 off the grid.
    """
    if null_kind not in NULL_KINDS:
        raise ValueError("unknown null {!r}, expected one of {}".format(
            null_kind, NULL_KINDS))
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1), got {}".format(level))
    base = draws.base
    if len(base.tau_grid) < 2:
        raise ValueError("a uniform test needs at least 2 quantile levels")

    alpha = base.alpha
    replicates = draws.alpha_draws
    if replicates.shape[0] == 0:
        raise ValueError("no bootstrap replicates to calibrate the test")
    spread = replicates - alpha

    if null_kind == 'constant':
        k = _median_index(base.tau_grid)
        centre = alpha - alpha[k]
        boot = spread - spread[:, k:k + 1, :]
    else:
        if null_kind == 'known-r':
            if r_known is None:
                raise ValueError("the known-r null needs r_known")
            centre = alpha - _as_path(r_known, alpha.shape)
        else:
            centre = alpha
        boot = spread

    statistic = float(path_statistic(base.n, centre))
    boot_statistics = path_statistic(base.n, boot)
    critical_value = float(np.quantile(boot_statistics, 1.0 - level,
                                       method='inverted_cdf'))
    result = TestResult(statistic=statistic,
                        critical_value=critical_value,
                        level=level,
                        reject=bool(statistic > critical_value),
                        null_kind=null_kind,
                        replicates=int(boot_statistics.shape[0]))
    LOGGER.info("Uniform test (%s null): S=%.4f, critical value %.4f at "
                "level %.3f", null_kind, statistic, critical_value, level)
    return result
