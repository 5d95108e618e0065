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
"""The profiled two-step estimator of the treatment coefficient path.

For every quantile level tau:

1. for a candidate a, each period's coefficient b_t is concentrated out
   by the tau-th quantile regression of Y_it - X_it'a on Z_it;
2. the candidate is scored by (1/T) sum_t ||D_n^t(.; a, b(a))||^2, the
   squared L2 norm over the integration box being approximated by the
   quadrature rule;
3. the score is minimized over the bounded set of candidates by a lattice
   search followed by a derivative-free refinement around the best
   lattice point. The score is piecewise constant in a; for a scalar
   coefficient the refinement ends at the centre of the minimizing
   plateau.
"""

import functools
import itertools
import logging
import math
import time

import attr
import numpy as np
from scipy import optimize

import panel_qte.exceptions as qte_exc
from panel_qte.core import panel as qte_panel
from panel_qte.estimation import moments
from panel_qte.estimation import quantreg
from panel_qte.utils import parallel

LOGGER = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _qr_options(config):
    if config is None:
        return {}
    return {'tol': config.qr_tol,
            'max_iter': config.qr_max_iter,
            'method': config.qr_method,
            'bounds': config.b_bounds}


def profile_fits(dataset, a, tau, config=None, bases=None):
    """Return the per-period QrFit of the profiled first step.

    Args:
        bases: optional per-period ``QrFit.basis`` of a previous
            candidate to warm start each regression from.

    Raises:
        RankDeficientError, NonConvergenceError: tagged with the 1-based
            period whose regression failed.
    """
    a = np.asarray(a, dtype=float).reshape(dataset.d_x)
    options = _qr_options(config)
    fits = []
    for period in range(dataset.T):
        responses = dataset.y[:, period] - dataset.x[:, period, :].dot(a)
        if bases is not None:
            options['basis'] = bases[period]
        try:
            fits.append(quantreg.fit(responses, dataset.z[:, period, :],
                                     tau, **options))
        except qte_exc.RankDeficientError as err:
            raise qte_exc.RankDeficientError(
                "period {}: {}".format(period + 1, err.msg),
                period=period + 1)
        except qte_exc.NonConvergenceError as err:
            raise qte_exc.NonConvergenceError(
                "period {}: {}".format(period + 1, err.msg),
                best=err.best, iterations=err.iterations,
                period=period + 1)
    return fits


def profile_beta(dataset, a, tau, config=None):
    """Return the T x d_Z matrix of profiled coefficients b(a, tau)."""
    fits = profile_fits(dataset, a, tau, config)
    return np.vstack([f.coefficients for f in fits])


class ObjectiveFunction(object):
    """Second-step objective of one quantile level.

    The omega matrix is computed once; every call profiles the first
    step at the candidate and evaluates the quadrature sum. The first
    step of a call starts from the vertices of the previous call, which
    for neighbouring candidates are optimal or a few pivots away.
    """

    def __init__(self, dataset, stacked, rule, tau, config=None):
        """Bind the panel, its regressors and the rule to a level."""
        self.dataset = dataset
        self.tau = tau
        self.config = config
        self.rule = rule
        self.weights = moments.weight_matrix(stacked, rule)
        self._bases = None

    def evaluate(self, a):
        """Return (objective, beta) at candidate ``a``."""
        fits = profile_fits(self.dataset, a, self.tau, self.config,
                            bases=self._bases)
        self._bases = [f.basis for f in fits]
        beta = np.vstack([f.coefficients for f in fits])
        process = moments.moment_process(
            moments.indicators(self.dataset, a, beta), self.weights)
        per_period = np.sum(process ** 2 * self.rule.weights, axis=1)
        return float(np.sum(per_period)) / self.dataset.T, beta

    def __call__(self, a):
        return self.evaluate(a)[0]


def objective(dataset, stacked, rule, a, tau, config=None):
    """Return the second-step objective at candidate ``a``."""
    return ObjectiveFunction(dataset, stacked, rule, tau, config)(a)


@attr.s(frozen=True, eq=False)
class SearchTrace(object):
    """Every candidate evaluated for one level, in evaluation order.

    The first ``lattice_size`` entries are the lattice, in lexicographic
    order of the coordinates; the rest come from the refinement.
    Failed evaluations are recorded as +inf. ``selected`` is the index
    of the centred minimizer when the refinement produced one.
    """

    candidates = attr.ib()
    values = attr.ib()
    lattice_size = attr.ib()
    selected = attr.ib(default=None)

    @property
    def best_index(self):
        """Index of the first evaluation attaining the minimum."""
        return int(np.argmin(self.values))

    @property
    def best_lattice_index(self):
        """Index of the first lattice point attaining the lattice minimum."""
        return int(np.argmin(self.values[:self.lattice_size]))

    @property
    def result_index(self):
        """Index of the evaluation reported as the minimizer."""
        if self.selected is None:
            return self.best_index
        return self.selected


class _Recorder(object):
    """Objective wrapper logging every evaluation."""

    def __init__(self, func):
        self.func = func
        self.candidates = []
        self.values = []

    def __call__(self, a):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        try:
            value = self.func(a)
        except qte_exc.PanelQteNumericalError as err:
            LOGGER.debug("Objective failed at a=%s: %s", a, err)
            value = np.inf
        self.candidates.append(a.copy())
        self.values.append(value)
        return value

    def trace(self, lattice_size, selected=None):
        return SearchTrace(candidates=np.vstack(self.candidates),
                           values=np.asarray(self.values, dtype=float),
                           lattice_size=lattice_size,
                           selected=selected)


def lattice(bounds, points):
    """Return the tensor lattice of ``points`` values per coordinate."""
    axes = [np.linspace(low, high, points) for low, high in bounds]
    return [np.array(p) for p in itertools.product(*axes)]


def _plateau_edge(func, inside, outside, level, tol, value=None):
    """Bisect [inside, outside] to ``tol`` around the end of a plateau.

    ``inside`` lies on the plateau ``func == level``; ``value`` is
    func(outside) when already known. Returns (last point on the plateau,
    first point off it, value there); the value is None when ``outside``
    itself lies on the plateau.
    """
    if value is None:
        value = func(outside)
    if value == level:
        return outside, outside, None
    while abs(outside - inside) > tol:
        middle = 0.5 * (inside + outside)
        f_middle = func(middle)
        if f_middle == level:
            inside = middle
        else:
            outside, value = middle, f_middle
    return inside, outside, value


def _plateau_center(func, point, level, low, high, tol):
    """Return the midpoint of the plateau ``func == level`` at ``point``.

    Each end is found by doubling steps away from ``point`` inside
    [low, high] and then bisected to ``tol``.
    """
    ends = []
    for bound in (low, high):
        inside, step, end = point, tol, bound
        while inside != bound:
            trial = point + step if bound > point else point - step
            trial = min(max(trial, low), high)
            value = func(trial)
            if value != level:
                end = _plateau_edge(func, inside, trial, level, tol,
                                    value)[0]
                break
            inside = trial
            step *= 2.0
        ends.append(end)
    return 0.5 * (ends[0] + ends[1])


def golden_section(func, low, high, tol):
    """Shrink [low, high] around a minimum of ``func`` until narrower
    than ``tol``.

    The objective is piecewise constant, so both inner points can land
    on one plateau. Such a tie is settled at their midpoint: a lower
    value there keeps the bracket between them, an equal one has both
    plateau ends bisected to ``tol`` and the search goes on below the
    lower neighbour. A plateau without a lower neighbour is a minimum and
    its midpoint is returned; otherwise the better final inner point is.
    """
    left = high - _GOLDEN * (high - low)
    right = low + _GOLDEN * (high - low)
    f_left = func(left)
    f_right = func(right)
    while high - low > tol:
        if f_left < f_right:
            high, right, f_right = right, left, f_left
            left = high - _GOLDEN * (high - low)
            f_left = func(left)
            continue
        if f_left > f_right:
            low, left, f_left = left, right, f_right
            right = low + _GOLDEN * (high - low)
            f_right = func(right)
            continue

        level = f_left
        f_middle = func(0.5 * (left + right))
        if f_middle < level:
            low, high = left, right
        elif f_middle > level:
            high = right
        else:
            start, _, f_below = _plateau_edge(func, left, low, level, tol)
            stop, _, f_above = _plateau_edge(func, right, high, level, tol)
            falls_left = f_below is not None and f_below < level
            falls_right = f_above is not None and f_above < level
            if falls_left and (not falls_right or f_below <= f_above):
                high = start
            elif falls_right:
                low = stop
            else:
                return 0.5 * (start + stop)
        left = high - _GOLDEN * (high - low)
        right = low + _GOLDEN * (high - low)
        f_left = func(left)
        f_right = func(right)
    return left if f_left <= f_right else right


def _nelder_mead(func, center, steps, bounds, tol):
    simplex = [center]
    for k, step in enumerate(steps):
        vertex = center.copy()
        vertex[k] = center[k] + step if center[k] + step <= bounds[k][1] \
            else center[k] - step
        simplex.append(vertex)
    result = optimize.minimize(
        func, center, method='Nelder-Mead', bounds=bounds,
        options={'initial_simplex': np.array(simplex), 'xatol': tol,
                 'fatol': 0.0, 'maxfev': 200 * len(center)})
    return result.x


def minimize_objective(func, bounds, grid_points, refine_tol):
    """Minimize ``func`` over the box ``bounds``.

    For a scalar coefficient the golden section refinement is followed by
    a centring step: the plateau holding the best evaluation is measured
    to ``refine_tol`` and its midpoint is selected when it attains the
    same value.

    Args:
        func: callable of a d-vector, may raise PanelQteNumericalError.
        bounds: d (low, high) pairs.
        grid_points: lattice values per coordinate.
        refine_tol: size of the final refinement interval.

    Returns:
        SearchTrace of every evaluation.

    Raises:
        NoFiniteObjectiveError: every lattice point failed.
    """
    recorder = _Recorder(func)
    points = lattice(bounds, grid_points)
    for candidate in points:
        recorder(candidate)
    values = np.asarray(recorder.values)
    if not np.any(np.isfinite(values)):
        raise qte_exc.NoFiniteObjectiveError(
            "the objective failed at all {} lattice points".format(
                len(points)))

    center = points[int(np.argmin(values))]
    steps = np.array([(high - low) / (grid_points - 1)
                      for low, high in bounds])
    selected = None
    if len(bounds) == 1:
        low, high = bounds[0]

        def line(s):
            return recorder([s])

        golden_section(line, max(low, center[0] - steps[0]),
                       min(high, center[0] + steps[0]), refine_tol)
        best = int(np.argmin(recorder.values))
        middle = _plateau_center(line, float(recorder.candidates[best][0]),
                                 recorder.values[best], low, high,
                                 refine_tol)
        if line(middle) <= min(recorder.values):
            selected = len(recorder.values) - 1
    elif np.any(steps > 0):
        _nelder_mead(recorder, center.astype(float), steps, bounds,
                     refine_tol)
    return recorder.trace(len(points), selected)


@attr.s(frozen=True, eq=False)
class QtePath(object):
    """Estimated coefficient path over the quantile grid.

    Attributes:
        tau_grid: the K quantile levels.
        alpha: (K, d_X) treatment coefficients.
        beta: (K, T, d_Z) period coefficients at the returned alpha.
        objective_at_min: K attained objective values.
        diagnostics: K SearchTrace objects (empty when rebuilt from
            records).
        n: sample size of the panel.
    """

    tau_grid = attr.ib(converter=tuple)
    alpha = attr.ib(converter=np.asarray)
    beta = attr.ib(converter=np.asarray)
    objective_at_min = attr.ib(converter=np.asarray)
    n = attr.ib(converter=int)
    diagnostics = attr.ib(default=(), converter=tuple)

    def index_of(self, tau):
        """Position of ``tau`` on the grid."""
        for k, level in enumerate(self.tau_grid):
            if abs(level - tau) <= 1e-12:
                return k
        raise KeyError("tau {} is not on the grid".format(tau))

    def alpha_at(self, tau):
        """Return the d_X-vector alpha at level ``tau``."""
        return self.alpha[self.index_of(tau)]

    def records(self):
        """Yield one JSON-serializable dict per level."""
        for k, tau in enumerate(self.tau_grid):
            record = {'tau': tau,
                      'alpha': self.alpha[k].tolist(),
                      'beta': self.beta[k].tolist(),
                      'objective': float(self.objective_at_min[k]),
                      'n': self.n}
            if self.diagnostics:
                record['evaluations'] = len(self.diagnostics[k].values)
            yield record

    @classmethod
    def from_records(cls, records):
        """Rebuild a path from the output of :meth:`records`."""
        records = sorted(records, key=lambda r: r['tau'])
        if not records:
            raise ValueError("no records to rebuild a path from")
        return cls(tau_grid=[r['tau'] for r in records],
                   alpha=[r['alpha'] for r in records],
                   beta=[r['beta'] for r in records],
                   objective_at_min=[r['objective'] for r in records],
                   n=records[0]['n'])


def _estimate_level(dataset, stacked, rule, config, tau):
    """Estimate (alpha, beta, objective, trace) at one level."""
    start_time = time.time()
    func = ObjectiveFunction(dataset, stacked, rule, tau, config)
    trace = minimize_objective(func, config.bounds_for(dataset.d_x),
                               config.grid_points, config.refine_tol)
    best = trace.result_index
    alpha = trace.candidates[best]
    beta = profile_beta(dataset, alpha, tau, config)
    LOGGER.debug("tau=%.4f: alpha=%s objective=%.6g after %d evaluations, "
                 "took %.5f seconds", tau, alpha, trace.values[best],
                 len(trace.values), time.time() - start_time)
    return alpha, beta, float(trace.values[best]), trace


def estimate(dataset, config, rule=None, threads=None):
    """Run the two-step estimator over the configured quantile grid.

    Args:
        dataset (PanelDataset): the panel.
        config (EstimationConfig): grid, bounds, search and solver
            settings.
        rule (QuadratureRule): optional rule to reuse (bootstrap); built
            from the configuration otherwise.
        threads: worker processes across levels (default
            ``config.threads``).

    Returns:
        QtePath

    Raises:
        InvalidDatasetError: the panel failed validation.
        NoFiniteObjectiveError: the objective failed on a whole lattice.
    """
    report = qte_panel.validate(dataset)
    if not report.ok:
        raise qte_exc.InvalidDatasetError("; ".join(report.failures))

    stacked = qte_panel.standardize(dataset)
    if rule is None:
        rule = moments.make_rule(stacked.dim, config.quad_nodes,
                                 config.quad_scheme, config.seed)
    if rule.dim != stacked.dim:
        raise qte_exc.InvalidDatasetError(
            "rule dimension {} does not match the {} active "
            "regressors".format(rule.dim, stacked.dim))

    start_time = time.time()
    task = functools.partial(_estimate_level, dataset, stacked, rule, config)
    results = parallel.ordered_map(task, config.tau_grid,
                                   threads or config.threads)
    LOGGER.debug("Estimated %d levels on n=%d units, took %.5f seconds",
                 len(results), dataset.n, time.time() - start_time)

    return QtePath(tau_grid=config.tau_grid,
                   alpha=np.vstack([r[0] for r in results]),
                   beta=np.stack([r[1] for r in results]),
                   objective_at_min=[r[2] for r in results],
                   n=dataset.n,
                   diagnostics=[r[3] for r in results])


def build_rule(dataset, config):
    """Return the quadrature rule estimate() builds for ``dataset``."""
    stacked = qte_panel.standardize(dataset)
    return moments.make_rule(stacked.dim, config.quad_nodes,
                             config.quad_scheme, config.seed)
