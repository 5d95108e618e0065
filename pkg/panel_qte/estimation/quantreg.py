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
"""Check-loss (quantile) regression.

The first estimation step runs, for every candidate treatment coefficient
and period, an ordinary quantile regression of Y_it - X_it'a on Z_it.
Two solvers are provided:

* ``interior-point``: the Frisch-Newton primal-dual interior point method
  with a Mehrotra predictor-corrector step, applied to the dual linear
  program of the check-loss problem. Its iterate is rounded to the basic
  solution on the d_Z smallest residuals and finished by exact simplex
  pivots. A fit started from the basis of a previous fit (a neighbouring
  candidate) goes straight to the pivots.
* ``highs``: the primal linear program solved by scipy's HiGHS; used
  when coefficient bounds are requested.

:func:`first_order_gap` certifies optimality of any returned fit.
"""

import logging

import attr
import numpy as np
from scipy import optimize
from scipy import sparse

import panel_qte.exceptions as qte_exc

LOGGER = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200

# Step damping of the interior point iteration.
_STEP_SHRINK = 0.99995
# Residuals this small relative to the response scale count as zero.
_ZERO_RESIDUAL = 1e-9
# Simplex bases worse conditioned than this are abandoned.
_MAX_CONDITION = 1e12


@attr.s(frozen=True, eq=False)
class QrFit(object):
    """Result of a quantile regression.

    Attributes:
        coefficients: fitted coefficient vector b.
        tau: quantile level.
        objective: mean check loss attained by ``coefficients``.
        n_neg: number of strictly negative residuals.
        n_zero: number of residuals that are zero up to rounding.
        converged: True when the solver met its tolerance.
        iterations: solver iterations used.
        basis: indices of the d_Z observations fitted exactly when the
            fit is a vertex, else None.
    """

    coefficients = attr.ib()
    tau = attr.ib()
    objective = attr.ib()
    n_neg = attr.ib()
    n_zero = attr.ib()
    converged = attr.ib(default=True)
    iterations = attr.ib(default=0)
    basis = attr.ib(default=None)


def check_loss(u, tau):
    """Return the check loss (tau - 1{u < 0}) * u, elementwise."""
    u = np.asarray(u, dtype=float)
    return (tau - (u < 0)) * u


def mean_check_loss(residuals, tau):
    """Return the mean check loss of a residual vector."""
    return float(np.mean(check_loss(residuals, tau)))


def _zero_threshold(responses):
    scale = float(np.max(np.abs(responses))) if responses.size else 0.0
    return _ZERO_RESIDUAL * max(1.0, scale)


def _make_fit(coefficients, responses, design, tau, converged, iterations,
              basis=None):
    residuals = responses - design.dot(coefficients)
    zero = np.abs(residuals) <= _zero_threshold(responses)
    return QrFit(coefficients=coefficients,
                 tau=tau,
                 objective=mean_check_loss(residuals, tau),
                 n_neg=int(np.count_nonzero((residuals < 0) & ~zero)),
                 n_zero=int(np.count_nonzero(zero)),
                 converged=converged,
                 iterations=iterations,
                 basis=basis)


def _step_length(value, step):
    """Largest t <= 1e20 keeping value + t * step non-negative."""
    lengths = np.full(value.shape, 1e20)
    falling = step < 0
    lengths[falling] = -value[falling] / step[falling]
    return lengths


def _frisch_newton(design, responses, tau, tol, max_iter):
    """Solve the check-loss problem by the Frisch-Newton method.

    The dual of the quantile regression problem is
    max y'd subject to X'd = (1 - tau) X'1, 0 <= d <= 1 (after the change
    of variable d = x); the primal coefficients are minus the dual
    multipliers of the equality constraints.

    Returns:
        (coefficients, converged, iterations)
    """
    n = design.shape[0]
    a_mat = design.T
    last = None
    cost = -responses
    upper = np.ones(n)
    primal = (1.0 - tau) * upper
    rhs_b = a_mat.dot(primal)

    slack = upper - primal
    dual_y = np.linalg.lstsq(design, cost, rcond=None)[0]
    reduced = cost - design.dot(dual_y)
    reduced = reduced + 0.001 * (reduced == 0)
    dual_z = np.where(reduced > 0, reduced, 0.0)
    dual_w = dual_z - reduced
    gap = cost.dot(primal) - dual_y.dot(rhs_b) + dual_w.dot(upper)

    # the duality gap is a sum over n observations, tol is on the mean
    threshold = tol * n
    iterations = 0
    # degenerate bases drive slacks to zero; non-finite steps are caught below
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        while gap > threshold and iterations < max_iter:
            iterations += 1
            last = (dual_y, gap)

            # affine scaling (predictor) step
            q_diag = 1.0 / (dual_z / primal + dual_w / slack)
            reduced = dual_z - dual_w
            aq_mat = a_mat * q_diag
            normal = aq_mat.dot(a_mat.T)
            rhs = q_diag * reduced
            try:
                d_y = np.linalg.solve(normal, a_mat.dot(rhs))
            except np.linalg.LinAlgError:
                break
            d_x = q_diag * (a_mat.T.dot(d_y) - reduced)
            d_s = -d_x
            d_z = -dual_z * (d_x / primal + 1.0)
            d_w = -dual_w * (d_s / slack + 1.0)

            f_p = min(_STEP_SHRINK * np.min(np.minimum(
                _step_length(primal, d_x), _step_length(slack, d_s))), 1.0)
            f_d = min(_STEP_SHRINK * np.min(np.minimum(
                _step_length(dual_w, d_w), _step_length(dual_z, d_z))), 1.0)

            if min(f_p, f_d) < 1.0:
                # Mehrotra corrector with an updated centering parameter
                mu = dual_z.dot(primal) + dual_w.dot(slack)
                g_val = ((dual_z + f_d * d_z).dot(primal + f_p * d_x) +
                         (dual_w + f_d * d_w).dot(slack + f_p * d_s))
                mu = mu * (g_val / mu) ** 3 / (2.0 * n)

                dxdz = d_x * d_z
                dsdw = d_s * d_w
                x_inv = 1.0 / primal
                s_inv = 1.0 / slack
                centering = mu * (x_inv - s_inv)
                rhs = rhs + q_diag * (dxdz - dsdw - centering)
                try:
                    d_y = np.linalg.solve(normal, a_mat.dot(rhs))
                except np.linalg.LinAlgError:
                    break
                d_x = q_diag * (a_mat.T.dot(d_y) + centering - reduced -
                                dxdz + dsdw)
                d_s = -d_x
                d_z = mu * x_inv - dual_z - x_inv * dual_z * d_x - dxdz
                d_w = mu * s_inv - dual_w - s_inv * dual_w * d_s - dsdw

                f_p = min(_STEP_SHRINK * np.min(np.minimum(
                    _step_length(primal, d_x),
                    _step_length(slack, d_s))), 1.0)
                f_d = min(_STEP_SHRINK * np.min(np.minimum(
                    _step_length(dual_w, d_w),
                    _step_length(dual_z, d_z))), 1.0)

            primal = primal + f_p * d_x
            slack = slack + f_p * d_s
            dual_y = dual_y + f_d * d_y
            dual_w = dual_w + f_d * d_w
            dual_z = dual_z + f_d * d_z
            gap = cost.dot(primal) - dual_y.dot(rhs_b) + dual_w.dot(upper)
            if not np.all(np.isfinite(dual_y)) or not np.isfinite(gap):
                dual_y, gap = last
                break

    return -dual_y, bool(gap <= threshold), iterations


def _vertex_polish(coefficients, responses, design, tau):
    """Return the basic solution through the smallest residuals.

    The d_Z observations with the smallest absolute residuals that form a
    nonsingular subdesign are fitted exactly. Returns (coefficients,
    basis), or None when no such subdesign exists.
    """
    p = design.shape[1]
    residuals = responses - design.dot(coefficients)
    basis = []
    for index in np.argsort(np.abs(residuals), kind='stable'):
        candidate = basis + [int(index)]
        if np.linalg.matrix_rank(design[candidate]) == len(candidate):
            basis = candidate
            if len(basis) == p:
                break
    if len(basis) < p:
        return None
    return np.linalg.solve(design[basis], responses[basis]), tuple(basis)


def _separable(edges, extra):
    """True when every extra zero residual moves with one basic one."""
    rows = np.abs(edges[extra])
    return bool(np.all(np.count_nonzero(
        rows > _ZERO_RESIDUAL * (1.0 + rows.max(axis=1, keepdims=True)),
        axis=1) <= 1))


def _simplex(design, responses, tau, basis, max_pivots):
    """Pivot from a basic solution to an optimal vertex.

    Freeing one basic observation moves the fit along an edge of the
    problem. Each pivot takes the steepest descending edge and stops at
    the breakpoint where the check loss stops falling, which swaps one
    observation into the basis. Zero-cost edges that lower the fit at a
    basic observation are also followed, so that among tied optima the
    lowest vertex is returned; for an intercept-only design this is the
    lower order statistic.

    Returns:
        (coefficients, basis, pivots), or None when the basis is not
        usable, the pivot cap is hit or optimality cannot be certified.
    """
    n, p = design.shape
    basis = [int(index) for index in basis]
    if (len(basis) != p or len(set(basis)) != p or
            min(basis) < 0 or max(basis) >= n):
        return None
    threshold = _zero_threshold(responses)
    lowering = 0
    for pivots in range(max_pivots + 1):
        sub = design[basis]
        if np.linalg.cond(sub) > _MAX_CONDITION:
            return None
        inverse = np.linalg.inv(sub)
        coefficients = np.linalg.solve(sub, responses[basis])
        residuals = responses - design.dot(coefficients)
        residuals[basis] = 0.0
        residuals[np.abs(residuals) <= threshold] = 0.0

        # column j moves the fit by one unit at basis[j]
        edges = design.dot(inverse)
        positive = residuals > 0
        negative = residuals < 0
        zero = ~(positive | negative)
        drift = ((1.0 - tau) * edges[negative].sum(axis=0) -
                 tau * edges[positive].sum(axis=0))
        rising = np.clip(edges[zero], 0.0, None).sum(axis=0)
        falling = np.clip(-edges[zero], 0.0, None).sum(axis=0)
        slopes = np.concatenate([
            drift + (1.0 - tau) * rising + tau * falling,
            -drift + (1.0 - tau) * falling + tau * rising])
        scales = np.tile(_ZERO_RESIDUAL * (1.0 + np.abs(edges).sum(axis=0)),
                         2)

        pick = int(np.argmin(slopes / scales))
        flat_move = slopes[pick] >= -scales[pick]
        if flat_move:
            extra = zero.copy()
            extra[basis] = False
            if extra.any() and not _separable(edges, extra):
                vertex = _make_fit(coefficients, responses, design, tau,
                                   True, pivots)
                if first_order_gap(vertex, responses, design,
                                   tau) > _ZERO_RESIDUAL:
                    return None
            flat = np.flatnonzero(np.abs(slopes[p:]) <= scales[p:])
            if not flat.size or lowering >= 2 * p:
                return coefficients, tuple(basis), pivots
            pick = p + int(flat[0])
            lowering += 1

        column = pick % p
        moves = edges[:, column] if pick < p else -edges[:, column]
        crossing = np.flatnonzero(residuals * moves > 0)
        if not crossing.size:
            # a flat ray stays optimal; a descending one is unbounded
            if flat_move:
                return coefficients, tuple(basis), pivots
            return None
        order = crossing[np.argsort(residuals[crossing] / moves[crossing],
                                    kind='stable')]
        slope = slopes[pick] + np.cumsum(np.abs(moves[order]))
        stop = int(np.searchsorted(slope, 0.0, side='left'))
        if stop == order.size:
            return None
        basis[column] = int(order[stop])
    return None


def _highs(design, responses, tau, bounds):
    """Solve the primal linear program with scipy's HiGHS."""
    n, p = design.shape
    cost = np.concatenate([np.zeros(p), np.full(n, tau),
                           np.full(n, 1.0 - tau)])
    identity = sparse.identity(n, format='csr')
    a_eq = sparse.hstack([sparse.csr_matrix(design), identity, -identity],
                         format='csr')
    coef_bounds = (None, None) if bounds is None else tuple(bounds)
    var_bounds = [coef_bounds] * p + [(0, None)] * (2 * n)
    result = optimize.linprog(cost, A_eq=a_eq, b_eq=responses,
                              bounds=var_bounds, method='highs')
    if result.status != 0:
        return None, False, int(getattr(result, 'nit', 0) or 0)
    return (np.asarray(result.x[:p]), True,
            int(getattr(result, 'nit', 0) or 0))


def fit(responses, design, tau, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
        method='interior-point', bounds=None, basis=None):
    """Fit the tau-th quantile regression of ``responses`` on ``design``.

    Args:
        responses: n-vector.
        design: (n, d_Z) matrix of full column rank, n > d_Z.
        tau: quantile level in (0, 1).
        tol: tolerance on the mean check loss.
        max_iter: iteration cap of the interior point method and of the
            simplex pivots.
        method: 'interior-point' or 'highs'.
        bounds: optional (low, high) box for every coefficient; forces
            the 'highs' solver.
        basis: optional d_Z observation indices of a previous vertex fit
            (``QrFit.basis``) to start the simplex from. The interior
            point method runs only when that start fails.

    Returns:
        QrFit

    Raises:
        RankDeficientError: the design is not of full column rank.
        NonConvergenceError: the solver failed; ``best`` holds the best
            fit found.
    """
    responses = np.asarray(responses, dtype=float)
    design = np.asarray(design, dtype=float)
    if design.ndim == 1:
        design = design[:, np.newaxis]
    n, p = design.shape
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1), got {}".format(tau))
    if responses.shape != (n,):
        raise ValueError("responses must be a vector of length {}".format(n))
    if n <= p or np.linalg.matrix_rank(design) < p:
        raise qte_exc.RankDeficientError(
            "design of shape {} does not have full column rank".format(
                design.shape))

    if bounds is not None or method == 'highs':
        coefficients, converged, iterations = _highs(
            design, responses, tau, bounds)
        if coefficients is None:
            raise qte_exc.NonConvergenceError(
                "HiGHS did not solve the quantile regression",
                best=None, iterations=iterations)
        return _make_fit(coefficients, responses, design, tau, converged,
                         iterations)

    if basis is not None:
        warm = _simplex(design, responses, tau, basis, max_iter)
        if warm is not None:
            return _make_fit(warm[0], responses, design, tau, True, warm[2],
                             basis=warm[1])
        LOGGER.debug("Simplex start from basis %s failed", tuple(basis))

    coefficients, converged, iterations = _frisch_newton(
        design, responses, tau, tol, max_iter)
    best = _make_fit(coefficients, responses, design, tau, converged,
                     iterations)

    vertex = _vertex_polish(coefficients, responses, design, tau)
    if vertex is not None:
        exact = _simplex(design, responses, tau, vertex[1], max_iter)
        if exact is not None:
            return _make_fit(exact[0], responses, design, tau, True,
                             iterations + exact[2], basis=exact[1])
        polished = _make_fit(vertex[0], responses, design, tau, converged,
                             iterations, basis=vertex[1])
        if polished.objective <= best.objective + tol:
            best = polished

    if not converged:
        # a vertex carrying a zero certificate is optimal regardless
        if first_order_gap(best, responses, design, tau) <= tol:
            return attr.evolve(best, converged=True)
        LOGGER.debug("Interior point stopped after %d iterations", iterations)
        raise qte_exc.NonConvergenceError(
            "quantile regression did not converge in {} iterations".format(
                iterations), best=best, iterations=iterations)
    return best


def first_order_gap(qr_fit, responses, design, tau):
    """Return the sup-norm of the smallest subgradient of the mean loss.

    Observations with nonzero residual contribute (tau - 1{r < 0}) z_i;
    observations with zero residual may contribute any lambda_i z_i with
    lambda_i in [tau - 1, tau]. The lambda selection minimizing the
    sup-norm of the averaged sum is found by a small linear program. A
    zero gap certifies optimality.
    """
    responses = np.asarray(responses, dtype=float)
    design = np.asarray(design, dtype=float)
    if design.ndim == 1:
        design = design[:, np.newaxis]
    n, p = design.shape
    residuals = responses - design.dot(qr_fit.coefficients)
    zero = np.abs(residuals) <= _zero_threshold(responses)

    fixed = (tau - (residuals[~zero] < 0)).dot(design[~zero]) / n
    free = design[zero] / n
    k = free.shape[0]
    if k == 0:
        return float(np.max(np.abs(fixed)))

    # minimize t subject to -t <= fixed + free' lambda <= t
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    ones = np.ones((p, 1))
    a_ub = np.vstack([np.hstack([free.T, -ones]),
                      np.hstack([-free.T, -ones])])
    b_ub = np.concatenate([-fixed, fixed])
    var_bounds = [(tau - 1.0, tau)] * k + [(0, None)]
    result = optimize.linprog(cost, A_ub=a_ub, b_ub=b_ub,
                              bounds=var_bounds, method='highs')
    if result.status != 0:
        return float(np.max(np.abs(fixed)))
    return max(0.0, float(result.x[-1]))
