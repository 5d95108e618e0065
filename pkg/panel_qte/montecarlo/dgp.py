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
"""Synthetic data generating processes.

Three designs are provided:

* ``sim1``: two periods, a continuous endogenous treatment X_it = Phi(X~_it)
  correlated with the unit effect A_i, a time invariant covariate
  Z_i ~ U(0, 1) and rank variables U_it = Phi(A_i + U~_it);
* ``sim2``: a two-group two-period design, the treatment switched on in
  period 2 for the units with X~_i + A_i >= 0;
* ``noiseless-rank-invariant``: U_i1 = U_i2 = Phi(A_i) with an exact
  linear quantile model, normal-score unit effects, a two-level
  treatment and no covariate besides the intercept.

In every design the treatment coefficient is alpha(tau) = 1 + 0.5
Phi^-1(tau).
"""

import logging

import attr
import numpy as np
from scipy import special

import panel_qte.exceptions as qte_exc
from panel_qte.core.panel import INTERCEPT_NAME
from panel_qte.core.panel import PanelDataset

LOGGER = logging.getLogger(__name__)

KINDS = ('sim1', 'sim2', 'noiseless-rank-invariant')

# Period slopes of the unit effect in sim1:
# Y_it(x) = (1 + 0.5 e_it) x + SCALE[t] e_it + ...
_SCALE = (1.0, 1.2)
# Period shifts and the small treatment level of the noiseless design.
_NOISELESS_SHIFT = (0.0, 0.5)
_NOISELESS_SMALL_X = 1e-3


def true_alpha(tau):
    """Return the treatment coefficient 1 + 0.5 Phi^-1(tau)."""
    return 1.0 + 0.5 * special.ndtri(tau)


def _check_rho(instance, attribute, value):
    # pylint: disable=unused-argument
    if not 0.0 <= value <= 1.0:
        raise ValueError("rho must lie in [0, 1], got {}".format(value))


def _check_n(instance, attribute, value):
    # pylint: disable=unused-argument
    if value < 10:
        raise ValueError("n must be at least 10, got {}".format(value))


@attr.s(frozen=True)
class DgpSpec(object):
    """A simulation design and its size, dependence and seed."""

    kind = attr.ib(validator=attr.validators.in_(KINDS))
    n = attr.ib(converter=int, validator=_check_n)
    rho = attr.ib(default=0.0, converter=float, validator=_check_rho)
    seed = attr.ib(default=0, converter=int)

    @classmethod
    def from_rho2(cls, kind, n, rho2, seed=0):
        """Build a design from the squared dependence parameter."""
        if not 0.0 <= rho2 <= 1.0:
            raise ValueError("rho2 must lie in [0, 1], got {}".format(rho2))
        return cls(kind=kind, n=n, rho=float(np.sqrt(rho2)), seed=seed)


@attr.s(frozen=True, eq=False)
class SimulatedPanel(object):
    """A simulated panel and the draws behind it.

    Attributes:
        dataset: the observed PanelDataset.
        spec: the DgpSpec that produced it.
        normal_ranks: (n, T) draws Phi^-1(U_it).
        untreated: (n, T) potential outcomes at x = 0.
        treated: (n, T) potential outcomes at x = 1 (NaN where the
            design leaves them undefined).
        group: treatment group indicator of a two-group design, else None.
    """

    dataset = attr.ib()
    spec = attr.ib()
    normal_ranks = attr.ib()
    untreated = attr.ib()
    treated = attr.ib()
    group = attr.ib(default=None)

    @staticmethod
    def true_alpha(tau):
        """Return the treatment coefficient at level ``tau``."""
        return true_alpha(tau)

    def sample_att(self):
        """Return the simulated average effect on the treated group.

        Raises:
            NotDidShapeError: the design has no treatment group.
        """
        if self.group is None:
            raise qte_exc.NotDidShapeError(
                "design {} has no treatment group".format(self.spec.kind))
        treated = self.group == 1
        if not np.any(treated):
            raise qte_exc.EmptyGroupError("no treated unit was drawn")
        return float(np.mean(self.treated[treated, -1] -
                             self.untreated[treated, -1]))


def sigma_xa(rho):
    """Return the covariance of (X~_1, X~_2, A) in sim1."""
    return np.array([[1.0, 0.5, 0.5 * rho],
                     [0.5, 1.0, 0.5 * rho],
                     [0.5 * rho, 0.5 * rho, rho ** 2]])


def _draw_xa(rng, n, rho):
    """Draw (X~_1, X~_2, A) from N(0, sigma_xa(rho))."""
    sigma = sigma_xa(rho)
    if np.linalg.eigvalsh(sigma).min() < -1e-12:
        raise qte_exc.CovarianceNotPSDError(
            "covariance of (X~, A) is not positive semi-definite for "
            "rho={}".format(rho))
    if rho == 0.0:
        # A has variance 0
        factor = np.linalg.cholesky(sigma[:2, :2])
        draws = rng.standard_normal((n, 2)).dot(factor.T)
        return draws[:, 0], draws[:, 1], np.zeros(n)
    factor = np.linalg.cholesky(sigma)
    draws = rng.standard_normal((n, 3)).dot(factor.T)
    return draws[:, 0], draws[:, 1], draws[:, 2]


def _rank_draws(rng, n, effect, rho):
    """Return Phi^-1(U_it) = A_i + U~_it with U~_it ~ N(0, 1 - rho^2)."""
    noise = np.sqrt(max(0.0, 1.0 - rho ** 2)) * rng.standard_normal((n, 2))
    return effect[:, np.newaxis] + noise


def gen_sim1(spec):
    """Draw a panel from the continuous treatment design."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    x1_latent, x2_latent, effect = _draw_xa(rng, n, spec.rho)
    ranks = _rank_draws(rng, n, effect, spec.rho)
    covariate = rng.uniform(size=n)

    x = special.ndtr(np.column_stack([x1_latent, x2_latent]))
    scale = np.array(_SCALE)
    base = ranks * scale + covariate[:, np.newaxis] * scale
    slope = 1.0 + 0.5 * ranks
    y = slope * x + base

    z = np.ones((n, 2, 2))
    z[:, :, 1] = covariate[:, np.newaxis]
    dataset = PanelDataset(y=y, x=x, z=z, x_names=['x'],
                           z_names=[INTERCEPT_NAME, 'z'])
    return SimulatedPanel(dataset=dataset, spec=spec, normal_ranks=ranks,
                          untreated=base, treated=slope + base)


def gen_sim2(spec):
    """Draw a panel from the two-group design."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    x_latent = rng.standard_normal(n)
    effect = spec.rho * rng.standard_normal(n)
    ranks = _rank_draws(rng, n, effect, spec.rho)
    group = (x_latent + effect >= 0).astype(float)

    untreated = np.column_stack([ranks[:, 0], 0.5 * ranks[:, 1]])
    treated = np.column_stack([np.full(n, np.nan),
                               1.0 + ranks[:, 1]])
    y = np.column_stack([untreated[:, 0],
                         np.where(group == 1, treated[:, 1],
                                  untreated[:, 1])])
    x = np.column_stack([np.zeros(n), group])
    dataset = PanelDataset(y=y, x=x, z=np.ones((n, 2, 1)), x_names=['d'],
                           z_names=[INTERCEPT_NAME])
    return SimulatedPanel(dataset=dataset, spec=spec, normal_ranks=ranks,
                          untreated=untreated, treated=treated, group=group)


def gen_noiseless(spec):
    """Draw a panel from the exact rank-invariant design.

    The unit effects are the normal scores A_(r) = Phi^-1((r + 0.5) / n),
    so every sample quantile of A sits between two neighbouring effects.
    Units alternate in rank order between a small treatment in period 1
    and a unit treatment in period 2 and the reverse. Y_it is
    (1 + 0.5 A_i) X_it + d_t with no error; at a = alpha(tau) the
    residual orderings of both periods agree, and a candidate more than
    half the gap between neighbouring effects away from alpha(tau)
    reorders them. The seed only shuffles the units; ``spec.rho`` is not
    used.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    effect = special.ndtri((np.arange(n) + 0.5) / n)
    small_first = (np.arange(n) % 2 == 0)[:, np.newaxis]
    x = np.where(small_first == np.array([True, False]),
                 _NOISELESS_SMALL_X, 1.0)

    order = rng.permutation(n)
    effect, x = effect[order], x[order]
    ranks = np.column_stack([effect, effect])
    base = np.broadcast_to(np.array(_NOISELESS_SHIFT), (n, 2)).copy()
    slope = 1.0 + 0.5 * ranks
    y = slope * x + base
    dataset = PanelDataset(y=y, x=x, z=np.ones((n, 2, 1)), x_names=['x'],
                           z_names=[INTERCEPT_NAME])
    return SimulatedPanel(dataset=dataset, spec=spec, normal_ranks=ranks,
                          untreated=base, treated=slope + base)


_GENERATORS = {
    'sim1': gen_sim1,
    'sim2': gen_sim2,
    'noiseless-rank-invariant': gen_noiseless,
}


def generate(spec):
    """Draw the panel of ``spec`` (dispatch on ``spec.kind``)."""
    LOGGER.debug("Drawing %s panel: n=%d rho=%.4f seed=%d", spec.kind,
                 spec.n, spec.rho, spec.seed)
    return _GENERATORS[spec.kind](spec)
