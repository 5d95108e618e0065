#!/usr/bin/env python
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

import math

import numpy as np
import pytest

import panel_qte.exceptions as qte_exc
from panel_qte.core import panel
from panel_qte.core.panel import PanelDataset
from panel_qte.estimation import moments
from panel_qte.test.conftest import make_panel


def _hand_panel():
    y = [[0.0, 1.0], [2.0, 0.0], [1.0, 1.0]]
    x = [[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]]
    return PanelDataset(y=y, x=x, z=np.ones((3, 2, 1)))


def test_rule_single_node():
    rule = moments.make_rule(1, 1, 'tensor-gauss')
    assert rule.nodes.tolist() == [[0.0]]
    assert rule.weights.tolist() == [1.0]


def test_rule_two_gauss_nodes():
    rule = moments.make_rule(1, 2, 'tensor-gauss')
    assert np.allclose(sorted(rule.nodes[:, 0]),
                       [-0.5 / math.sqrt(3), 0.5 / math.sqrt(3)])
    assert np.allclose(rule.weights, [0.5, 0.5])


def test_rule_halton():
    rule = moments.make_rule(3, 64, 'halton', seed=4)

    assert rule.nodes.shape == (64, 3)
    assert rule.scheme == 'halton'
    assert np.all(np.abs(rule.nodes) <= 0.5)
    assert np.allclose(rule.weights, 1.0 / 64)


def test_rule_halton_is_deterministic():
    first = moments.make_rule(3, 16, 'halton', seed=4)
    second = moments.make_rule(3, 16, 'halton', seed=4)
    other = moments.make_rule(3, 16, 'halton', seed=5)

    assert np.array_equal(first.nodes, second.nodes)
    assert not np.array_equal(first.nodes, other.nodes)


def test_rule_auto_selection():
    assert moments.make_rule(3, 8).scheme == 'tensor-gauss'
    assert moments.make_rule(3, 8).size == 512
    assert moments.make_rule(5, 8).scheme == 'halton'
    assert moments.make_rule(5, 8).size == 8
    assert moments.make_rule(2, 400).scheme == 'halton'


def test_rule_budget():
    assert moments.make_rule(5, 10, 'tensor-gauss').size == 10 ** 5
    with pytest.raises(qte_exc.BudgetExceededError):
        moments.make_rule(6, 10, 'tensor-gauss')


def test_rule_without_dimensions():
    rule = moments.make_rule(0, 8)
    assert rule.nodes.shape == (1, 0)
    assert rule.weights.tolist() == [1.0]


def test_rule_rejects_bad_arguments():
    with pytest.raises(ValueError):
        moments.make_rule(2, 0)
    with pytest.raises(ValueError):
        moments.make_rule(2, 4, 'simpson')


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_tensor_rule_integrates_exponential(dim):
    rule = moments.make_rule(dim, 8, 'tensor-gauss')
    exact = (math.exp(0.5) - math.exp(-0.5)) ** dim
    assert rule.integrate(np.exp(rule.nodes.sum(axis=1))) == \
        pytest.approx(exact, abs=1e-10)
    assert rule.weights.sum() == pytest.approx(1.0)
    assert np.all(rule.weights > 0)


def test_weight_omega():
    assert moments.weight_omega([0.3], [1.0, -2.0], [0, 0, 0]) == 1.0
    assert moments.weight_omega([1.0], [1.0, 1.0], [0.5, 0.5, 0.5]) == \
        pytest.approx(math.exp(1.5))
    forward = moments.weight_omega([0.7], [-0.2], [0.1, 0.4])
    backward = moments.weight_omega([0.7], [-0.2], [-0.1, -0.4])
    assert forward * backward == pytest.approx(1.0)


def test_weight_matrix_matches_weight_omega():
    dataset = make_panel(n=7)
    stacked = panel.standardize(dataset)
    rule = moments.make_rule(stacked.dim, 2)
    weights = moments.weight_matrix(stacked, rule)

    assert weights.shape == (rule.size, 7)
    live = stacked.active
    for j in range(rule.size):
        for i in range(7):
            assert weights[j, i] == pytest.approx(
                moments.weight_omega(live[i], [], rule.nodes[j]))


def test_weight_matrix_dimension_mismatch():
    stacked = panel.standardize(make_panel(n=7))
    with pytest.raises(ValueError):
        moments.weight_matrix(stacked, moments.make_rule(1, 2))


def test_indicators_hand_panel():
    matrix = moments.indicators(_hand_panel(), [1.0], [[0.0], [0.0]])

    assert matrix.ind.tolist() == [[1, 1], [0, 1], [0, 0]]
    assert matrix.row_means.tolist() == [1.0, 0.5, 0.0]


def test_indicators_all_below():
    dataset = _hand_panel()
    matrix = moments.indicators(dataset, [0.0], [[5.0], [5.0]])
    assert np.all(matrix.ind == 1)
    assert np.all(matrix.row_means == 1)


def test_indicators_ties_count():
    dataset = _hand_panel()
    fitted = moments.fitted_values(dataset, [0.0], [[1.0], [1.0]])
    matrix = moments.indicators(dataset, [0.0], [[1.0], [1.0]])
    assert np.all(matrix.ind[dataset.y == fitted] == 1)


def _brute_force_dhat(dataset, stacked, rule, a, b, t):
    live = stacked.active
    values = []
    for node in rule.nodes:
        total = 0.0
        for i in range(dataset.n):
            ind = []
            for s in range(dataset.T):
                fitted = dataset.x[i, s].dot(a) + dataset.z[i, s].dot(b[s])
                ind.append(1.0 if dataset.y[i, s] <= fitted else 0.0)
            centered = ind[t - 1] - sum(ind) / dataset.T
            total += centered * moments.weight_omega(live[i], [], node)
        values.append(total / dataset.n)
    return np.array(values)


def test_dhat_hand_panel():
    dataset = _hand_panel()
    stacked = panel.standardize(dataset)
    rule = moments.make_rule(stacked.dim, 2)
    b = np.array([[0.0], [0.0]])
    for t in (1, 2):
        assert np.allclose(
            moments.dhat(dataset, stacked, rule, [1.0], b, t),
            _brute_force_dhat(dataset, stacked, rule, [1.0], b, t),
            atol=1e-12)


def test_dhat_vanishes_for_constant_indicators():
    dataset = _hand_panel()
    stacked = panel.standardize(dataset)
    rule = moments.make_rule(stacked.dim, 3)
    for t in (1, 2):
        assert np.all(moments.dhat(dataset, stacked, rule, [0.0],
                                   [[5.0], [5.0]], t) == 0.0)


@pytest.mark.parametrize("periods", [2, 4])
def test_moments_sum_to_zero_over_periods(periods):
    dataset = make_panel(n=25, periods=periods, seed=3)
    stacked = panel.standardize(dataset)
    rule = moments.make_rule(stacked.dim, 16, 'halton')
    b = np.zeros((periods, dataset.d_z))
    b[:, 0] = np.arange(periods)
    matrix = moments.indicators(dataset, [1.0], b)

    assert np.all(matrix.centered.sum(axis=1) == 0.0)
    process = moments.moment_process(
        matrix, moments.weight_matrix(stacked, rule))
    assert np.allclose(process.sum(axis=0), 0.0, atol=1e-12)


def test_dhat_is_bounded_by_weights():
    dataset = make_panel(n=30, seed=4)
    stacked = panel.standardize(dataset)
    rule = moments.make_rule(stacked.dim, 4)
    weights = moments.weight_matrix(stacked, rule)
    b = np.array([[0.0, 1.0], [1.0, 1.0]])
    for t in (1, 2):
        values = moments.dhat(dataset, stacked, rule, [1.0], b, t)
        assert np.all(np.abs(values) <= weights.max(axis=1))
        bound = np.exp(0.5 * np.abs(stacked.active).sum(axis=1)).max()
        assert np.all(np.abs(values) <= bound)


def test_dhat_is_permutation_invariant():
    dataset = make_panel(n=30, seed=5)
    order = np.random.default_rng(0).permutation(30)
    shuffled = dataset.take(order)
    b = np.array([[0.0, 1.0], [1.0, 1.0]])
    stacked = panel.standardize(dataset)
    rule = moments.make_rule(stacked.dim, 4)
    for t in (1, 2):
        assert np.allclose(
            moments.dhat(dataset, stacked, rule, [1.0], b, t),
            moments.dhat(shuffled, panel.standardize(shuffled), rule,
                         [1.0], b, t), atol=1e-13)


def test_dhat_rejects_bad_period():
    dataset = _hand_panel()
    stacked = panel.standardize(dataset)
    rule = moments.make_rule(stacked.dim, 2)
    with pytest.raises(ValueError):
        moments.dhat(dataset, stacked, rule, [1.0], [[0.0], [0.0]], 3)
