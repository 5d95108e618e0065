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
"""Moment functions of the second estimation step.

For a candidate (a, b) the period-t moment of unit i at node v is

    g_t(W_i; a, b, v) = (1{Y_it <= X_it'a + Z_it'b_t}
                         - (1/T) sum_s 1{Y_is <= X_is'a + Z_is'b_s})
                        * omega(X_i, Z_i, v)

with omega(X_i, Z_i, v) = exp(v'W~_i) over the standardized stacked
regressors W~_i. The empirical process D_n^t(v) averages g_t over units
and its squared L2 norm over the box [-0.5, 0.5]^d is approximated by a
quadrature rule.
"""

import logging

import attr
import numpy as np
from numpy.polynomial import legendre
from scipy.stats import qmc

import panel_qte.exceptions as qte_exc
from panel_qte.core.config import QUAD_SCHEMES
from panel_qte.core.config import V_HALF_WIDTH

LOGGER = logging.getLogger(__name__)

# Largest tensor grid (total node count) built on request.
TENSOR_NODE_CAP = 10 ** 5
# Largest dimension for which 'auto' considers a tensor grid.
TENSOR_MAX_DIM = 4
# Relative size of the residuals counted as ties by the indicators.
TIE_TOL = 1e-10


def _frozen(value):
    arr = np.array(value, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@attr.s(frozen=True, eq=False)
class QuadratureRule(object):
    """Nodes and weights over the integration box.

    Attributes:
        nodes: (J, d) array of points of [-0.5, 0.5]^d.
        weights: J positive weights summing to the box volume, 1.
        scheme: 'tensor-gauss' or 'halton'.
        seed: scrambling seed of a Halton rule, None otherwise.
    """

    nodes = attr.ib(converter=_frozen)
    weights = attr.ib(converter=_frozen)
    scheme = attr.ib()
    seed = attr.ib(default=None)

    @property
    def dim(self):
        """Dimension of the integration box."""
        return self.nodes.shape[1]

    @property
    def size(self):
        """Number of nodes."""
        return self.nodes.shape[0]

    def integrate(self, values):
        """Return the weighted sum of integrand ``values`` at the nodes."""
        return float(np.sum(self.weights * np.asarray(values, dtype=float)))


def _tensor_gauss(dim, per_axis):
    points, weights = legendre.leggauss(per_axis)
    points = points * V_HALF_WIDTH
    weights = weights * V_HALF_WIDTH
    grids = np.meshgrid(*([points] * dim), indexing='ij')
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weight_grids = np.meshgrid(*([weights] * dim), indexing='ij')
    node_weights = np.prod([g.ravel() for g in weight_grids], axis=0)
    return nodes, node_weights


def _halton(dim, count, seed):
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    # index 0 of the sequence is skipped
    sampler.fast_forward(1)
    nodes = sampler.random(count) - V_HALF_WIDTH
    return nodes, np.full(count, 1.0 / count)


def make_rule(dim, nodes, scheme='auto', seed=0):
    """Build the quadrature rule of the second-step objective.

    Args:
        dim: dimension of the box (number of active standardized
            regressors); 0 yields the single empty node with weight 1.
        nodes: J. Gauss-Legendre nodes per axis for a tensor rule, total
            point count for a Halton rule.
        scheme: 'auto', 'tensor-gauss' or 'halton'. 'auto' uses a tensor
            rule when dim <= 4 and J**dim <= 1e5, Halton otherwise.
        seed: scrambling seed of the Halton sequence.

    Returns:
        QuadratureRule

    Raises:
        BudgetExceededError: a tensor rule larger than the cap was
            requested explicitly.
    """
    dim = int(dim)
    nodes = int(nodes)
    if dim < 0 or nodes < 1:
        raise ValueError("need dim >= 0 and at least one node")
    if scheme not in QUAD_SCHEMES:
        raise ValueError("unknown quadrature scheme {!r}".format(scheme))
    if dim == 0:
        return QuadratureRule(nodes=np.zeros((1, 0)), weights=[1.0],
                              scheme='tensor-gauss')

    tensor_size = nodes ** dim
    if scheme == 'auto':
        fits = dim <= TENSOR_MAX_DIM and tensor_size <= TENSOR_NODE_CAP
        scheme = 'tensor-gauss' if fits else 'halton'
    if scheme == 'tensor-gauss':
        if tensor_size > TENSOR_NODE_CAP:
            raise qte_exc.BudgetExceededError(
                "tensor rule with {}^{} = {} nodes exceeds the cap of "
                "{}".format(nodes, dim, tensor_size, TENSOR_NODE_CAP))
        points, weights = _tensor_gauss(dim, nodes)
        rule = QuadratureRule(nodes=points, weights=weights,
                              scheme='tensor-gauss')
    else:
        points, weights = _halton(dim, nodes, seed)
        rule = QuadratureRule(nodes=points, weights=weights,
                              scheme='halton', seed=seed)
    LOGGER.debug("Quadrature rule: %s, %d nodes in dimension %d",
                 rule.scheme, rule.size, dim)
    return rule


def weight_omega(x_std, z_std, v):
    """Return omega = exp(v_x'x + v_z'z) for one unit and one node."""
    point = np.concatenate([np.ravel(x_std), np.ravel(z_std)])
    return float(np.exp(np.dot(np.ravel(v), point)))


def weight_matrix(stacked, rule):
    """Return omega for every (node, unit) pair, shape (J, n).

    The rule lives on the active (non-degenerate) standardized columns;
    degenerate columns are identically zero and contribute exp(0) = 1.
    """
    if rule.dim != stacked.dim:
        raise ValueError("rule dimension {} does not match the {} active "
                         "regressors".format(rule.dim, stacked.dim))
    weights = np.exp(rule.nodes.dot(stacked.active.T))
    return np.ascontiguousarray(weights)


@attr.s(frozen=True, eq=False)
class IndicatorMatrix(object):
    """Indicators 1{Y_it <= X_it'a + Z_it'b_t} and their unit means."""

    ind = attr.ib()
    row_means = attr.ib()

    @property
    def centered(self):
        """ind - row_means, shape (n, T); rows sum to zero."""
        return self.ind - self.row_means[:, np.newaxis]


def fitted_values(dataset, a, b):
    """Return X_it'a + Z_it'b_t, shape (n, T)."""
    a = np.asarray(a, dtype=float).reshape(dataset.d_x)
    b = np.asarray(b, dtype=float).reshape(dataset.T, dataset.d_z)
    return (np.einsum('itk,k->it', dataset.x, a) +
            np.einsum('itk,tk->it', dataset.z, b))


def tie_tolerance(dataset):
    """Residuals at most this large count as ties."""
    return TIE_TOL * max(1.0, float(np.max(np.abs(dataset.y))))


def indicators(dataset, a, b):
    """Return the IndicatorMatrix at (a, b).

    Ties count as 1. A residual Y_it - fitted within rounding of zero is a
    tie: the observations a quantile regression interpolates have zero
    residual only up to the rounding of the linear solve.
    """
    residuals = dataset.y - fitted_values(dataset, a, b)
    ind = (residuals <= tie_tolerance(dataset)).astype(float)
    return IndicatorMatrix(ind=ind, row_means=ind.mean(axis=1))


def moment_process(indicator_matrix, weights):
    """Return D_n^t(v_j) for every period and node, shape (T, J).

    Args:
        indicator_matrix (IndicatorMatrix): indicators at (a, b).
        weights: (J, n) matrix from :func:`weight_matrix`.
    """
    centered = indicator_matrix.centered
    n, periods = centered.shape
    out = np.empty((periods, weights.shape[0]))
    for period in range(periods):
        # contiguous reduction over units: numpy sums pairwise
        out[period] = np.sum(weights * centered[:, period], axis=1) / n
    return out


def dhat(dataset, stacked, rule, a, b, t, weights=None):
    """Return D_n^t(v_j; a, b) at every node of ``rule``.

    Args:
        dataset (PanelDataset): the panel.
        stacked (StackedRegressors): its standardized regressors.
        rule (QuadratureRule): the nodes.
        a: treatment coefficient, d_X-vector.
        b: T x d_Z matrix of period coefficients.
        t: 1-based period.
        weights: optional precomputed :func:`weight_matrix`.
    """
    if not 1 <= t <= dataset.T:
        raise ValueError("period must lie in 1..{}, got {}".format(
            dataset.T, t))
    if weights is None:
        weights = weight_matrix(stacked, rule)
    centered = indicators(dataset, a, b).centered[:, t - 1]
    return np.sum(weights * centered, axis=1) / dataset.n
