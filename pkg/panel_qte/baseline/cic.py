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
"""Changes-in-changes and mean difference-in-differences baselines.

Both work on a two-period panel with a scalar binary treatment that is
off for everybody in period 1 and on in period 2 for the treatment group
G = 1. With F_tg the empirical distribution of Y_t in group g, the
untreated period-2 distribution of the treated group is estimated by

    F_{Y2(0)|G=1}(y) = F_11(F_10^-1(F_20(y)))

and the treated period-2 distribution of the control group by

    F_{Y2(1)|G=0}(y) = F_10(F_11^-1(F_21(y))).

Covariates other than the intercept are ignored.
"""

import logging

import attr
import numpy as np

import panel_qte.exceptions as qte_exc
from panel_qte.baseline.ecdf import Ecdf
from panel_qte.baseline.ecdf import mixture
from panel_qte.core.config import parse_tau_grid

LOGGER = logging.getLogger(__name__)


@attr.s(frozen=True, eq=False)
class CicEstimate(object):
    """Changes-in-changes estimates over a quantile grid.

    Attributes:
        tau_grid: the quantile levels.
        qte: treated-group contrast F_{Y2|G=1}^-1 - F_{Y2(0)|G=1}^-1.
        population_qte: contrast of the population distributions of
            Y2(1) and Y2(0), each mixing the observed group with the
            counterfactual of the other group.
        counterfactual_cdf: Ecdf of Y2(0) in the treatment group.
        groups: (n0, n1) group sizes.
    """

    tau_grid = attr.ib(converter=tuple)
    qte = attr.ib()
    population_qte = attr.ib()
    counterfactual_cdf = attr.ib()
    groups = attr.ib(converter=tuple)

    def records(self):
        """Yield one JSON-serializable dict per level."""
        for k, tau in enumerate(self.tau_grid):
            yield {'tau': tau,
                   'qte': float(self.qte[k]),
                   'population_qte': float(self.population_qte[k]),
                   'n0': self.groups[0],
                   'n1': self.groups[1]}


def _groups(dataset):
    """Return the treatment group indicator of a 2x2 panel.

    Raises:
        NotDidShapeError: the panel is not a two-period design with the
            treatment off in period 1 and binary in period 2.
        EmptyGroupError: one of the groups has no unit.
    """
    if dataset.T != 2 or dataset.d_x != 1:
        raise qte_exc.NotDidShapeError(
            "need T=2 and a scalar treatment, got T={} and d_X={}".format(
                dataset.T, dataset.d_x))
    first = dataset.x[:, 0, 0]
    second = dataset.x[:, 1, 0]
    if np.any(first != 0.0) or np.any((second != 0.0) & (second != 1.0)):
        raise qte_exc.NotDidShapeError(
            "treatment paths must be (0, 0) or (0, 1)")
    treated = second == 1.0
    n1 = int(np.count_nonzero(treated))
    n0 = dataset.n - n1
    if n0 == 0 or n1 == 0:
        raise qte_exc.EmptyGroupError(
            "group sizes are n0={} and n1={}".format(n0, n1))
    if dataset.d_z > 1:
        LOGGER.warning("Changes-in-changes ignores the %d covariates",
                       dataset.d_z - 1)
    return treated


def counterfactual(before_self, before_other, after_other):
    """Return the Ecdf of y -> F_self(F_other^-1(F_other_after(y))).

    The result lives on the support of ``after_other``.
    """
    steps = before_self.cdf(before_other.quantile(after_other.steps))
    steps = np.array(steps, dtype=float)
    steps[-1] = 1.0
    return Ecdf(support=after_other.support, steps=steps)


def cic(dataset, tau_grid):
    """Run the changes-in-changes estimator.

    Args:
        dataset (PanelDataset): two-period panel, X_1 = 0, X_2 binary.
        tau_grid: quantile levels (sequence or grid string).

    Returns:
        CicEstimate
    """
    treated = _groups(dataset)
    tau_grid = parse_tau_grid(tau_grid)
    if not tau_grid or any(not 0.0 < tau < 1.0 for tau in tau_grid):
        raise ValueError("tau_grid must lie inside (0, 1): {}".format(
            tau_grid))
    levels = np.asarray(tau_grid)

    f10 = Ecdf.from_sample(dataset.y[~treated, 0])
    f20 = Ecdf.from_sample(dataset.y[~treated, 1])
    f11 = Ecdf.from_sample(dataset.y[treated, 0])
    f21 = Ecdf.from_sample(dataset.y[treated, 1])

    untreated_of_treated = counterfactual(f11, f10, f20)
    treated_of_untreated = counterfactual(f10, f11, f21)
    qte = f21.quantile(levels) - untreated_of_treated.quantile(levels)

    n1 = int(np.count_nonzero(treated))
    n0 = dataset.n - n1
    share = np.array([n0, n1], dtype=float) / dataset.n
    untreated = mixture([f20, untreated_of_treated], share)
    treated_all = mixture([treated_of_untreated, f21], share)
    population_qte = treated_all.quantile(levels) - \
        untreated.quantile(levels)

    LOGGER.info("Changes-in-changes on n0=%d, n1=%d units", n0, n1)
    return CicEstimate(tau_grid=tau_grid,
                       qte=np.atleast_1d(qte),
                       population_qte=np.atleast_1d(population_qte),
                       counterfactual_cdf=untreated_of_treated,
                       groups=(n0, n1))


def did(dataset):
    """Return the mean difference-in-differences estimate."""
    treated = _groups(dataset)
    change = dataset.y[:, 1] - dataset.y[:, 0]
    return float(np.mean(change[treated]) - np.mean(change[~treated]))
