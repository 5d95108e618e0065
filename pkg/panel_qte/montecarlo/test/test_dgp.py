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

import mock
import numpy as np
import pytest
from scipy import special
from scipy import stats

import panel_qte.exceptions as qte_exc
from panel_qte.core import panel as qte_panel
from panel_qte.montecarlo import dgp

LARGE = 10 ** 4


def _simulate(kind, n=LARGE, rho=0.5, seed=1):
    return dgp.generate(dgp.DgpSpec(kind=kind, n=n, rho=rho, seed=seed))


def test_true_alpha():
    values = dgp.true_alpha(np.array([0.25, 0.5, 0.75]))
    assert np.array_equal(np.round(values, 2), [0.66, 1.0, 1.34])
    assert dgp.SimulatedPanel.true_alpha(0.5) == 1.0


def test_spec_validation():
    with pytest.raises(ValueError):
        dgp.DgpSpec(kind='sim1', n=100, rho=1.5)
    with pytest.raises(ValueError):
        dgp.DgpSpec(kind='sim1', n=5)
    with pytest.raises(ValueError):
        dgp.DgpSpec(kind='sim3', n=100)
    with pytest.raises(ValueError):
        dgp.DgpSpec.from_rho2('sim1', 100, -0.1)
    spec = dgp.DgpSpec.from_rho2('sim1', 100, 0.81, seed=4)
    assert spec.rho == pytest.approx(0.9)
    assert spec.seed == 4


@pytest.mark.parametrize("kind", dgp.KINDS)
def test_determinism(kind):
    first = _simulate(kind, n=200, seed=17)
    second = _simulate(kind, n=200, seed=17)
    third = _simulate(kind, n=200, seed=18)
    assert first.dataset.identical_to(second.dataset)
    assert not first.dataset.identical_to(third.dataset)


@pytest.mark.parametrize("kind", dgp.KINDS)
def test_panels_validate(kind):
    simulated = _simulate(kind, n=100)
    report = qte_panel.validate(simulated.dataset)
    assert report.ok
    assert simulated.dataset.T == 2
    assert simulated.dataset.d_x == 1


def test_sim1_treatment_correlation():
    simulated = _simulate('sim1')
    latent = special.ndtri(simulated.dataset.x[:, :, 0])
    corr = np.corrcoef(latent[:, 0], latent[:, 1])[0, 1]
    assert corr == pytest.approx(0.5, abs=0.05)


def test_sim1_uniform_ranks():
    simulated = _simulate('sim1', rho=np.sqrt(0.5), seed=2)
    ranks = special.ndtr(simulated.normal_ranks[:, 0])
    statistic = stats.kstest(ranks, 'uniform').statistic
    assert statistic < 1.63 / np.sqrt(LARGE)


def test_sim1_rank_dependence():
    independent = _simulate('sim1', rho=0.0).normal_ranks
    corr = np.corrcoef(independent[:, 0], independent[:, 1])[0, 1]
    assert abs(corr) < 0.05

    invariant = _simulate('sim1', n=100, rho=1.0).normal_ranks
    assert np.array_equal(invariant[:, 0], invariant[:, 1])


def test_sim1_outcome_equations():
    simulated = _simulate('sim1', n=50)
    dataset = simulated.dataset
    x = dataset.x[:, :, 0]
    covariate = dataset.z[:, :, 1]
    ranks = simulated.normal_ranks
    expected = (1.0 + 0.5 * ranks) * x + np.array([1.0, 1.2]) * (
        ranks + covariate)
    assert np.allclose(dataset.y, expected, atol=1e-12)
    assert np.all(dataset.z[:, :, 0] == 1.0)
    assert np.array_equal(covariate[:, 0], covariate[:, 1])
    assert dataset.z_names[0] == qte_panel.INTERCEPT_NAME


@pytest.mark.parametrize("rho2", [0.1, 0.5, 0.9])
def test_covariance_of_draws(rho2):
    rho = np.sqrt(rho2)
    rng = np.random.default_rng(8)
    draws = np.column_stack(dgp._draw_xa(rng, LARGE, rho))
    sample = np.cov(draws, rowvar=False)
    assert np.all(np.abs(sample - dgp.sigma_xa(rho)) < 0.05)


def test_zero_rho_draws():
    rng = np.random.default_rng(8)
    _, _, effect = dgp._draw_xa(rng, 100, 0.0)
    assert np.all(effect == 0.0)


def test_covariance_guard():
    with mock.patch.object(dgp, 'sigma_xa',
                           return_value=np.diag([1.0, 1.0, -1.0])):
        with pytest.raises(qte_exc.CovarianceNotPSDError):
            dgp.generate(dgp.DgpSpec(kind='sim1', n=20, rho=0.5))


def test_sim2_shape():
    simulated = _simulate('sim2')
    dataset = simulated.dataset
    assert np.all(dataset.x[:, 0, 0] == 0.0)
    assert set(np.unique(dataset.x[:, 1, 0])) <= {0.0, 1.0}
    assert dataset.x[:, 1, 0].mean() == pytest.approx(0.5, abs=0.05)
    assert np.array_equal(dataset.x[:, 1, 0], simulated.group)
    assert dataset.d_z == 1


def test_sim2_potential_outcomes():
    simulated = _simulate('sim2', rho=0.9)
    ranks = simulated.normal_ranks
    assert np.array_equal(simulated.untreated[:, 0], ranks[:, 0])
    assert np.array_equal(simulated.untreated[:, 1], 0.5 * ranks[:, 1])
    assert np.all(np.isnan(simulated.treated[:, 0]))
    observed = np.where(simulated.group == 1, simulated.treated[:, 1],
                        simulated.untreated[:, 1])
    assert np.array_equal(simulated.dataset.y[:, 1], observed)

    levels = np.array([0.25, 0.5, 0.75])
    contrast = np.quantile(simulated.treated[:, 1], levels) - \
        np.quantile(simulated.untreated[:, 1], levels)
    assert np.allclose(contrast, dgp.true_alpha(levels), atol=0.05)


def test_sim2_rank_invariance_at_rho_one():
    simulated = _simulate('sim2', n=100, rho=1.0)
    ranks = simulated.normal_ranks
    assert np.array_equal(ranks[:, 0], ranks[:, 1])


def test_sample_att():
    simulated = _simulate('sim2', n=200)
    treated = simulated.group == 1
    expected = np.mean(1.0 + 0.5 * simulated.normal_ranks[treated, 1])
    assert simulated.sample_att() == pytest.approx(expected, abs=1e-12)

    with pytest.raises(qte_exc.NotDidShapeError):
        _simulate('sim1', n=20).sample_att()


def test_noiseless_design():
    simulated = _simulate('noiseless-rank-invariant', n=100, rho=0.3)
    dataset = simulated.dataset
    ranks = simulated.normal_ranks
    assert np.array_equal(ranks[:, 0], ranks[:, 1])
    expected = (1.0 + 0.5 * ranks) * dataset.x[:, :, 0] + \
        np.array([0.0, 0.5])
    assert np.allclose(dataset.y, expected, atol=1e-12)
    assert dataset.d_z == 1

    # normal scores, one per unit
    scores = special.ndtri((np.arange(100) + 0.5) / 100)
    assert np.allclose(np.sort(ranks[:, 0]), scores, atol=1e-12)
    # neighbours in rank order take the small treatment in opposite periods
    x = dataset.x[np.argsort(ranks[:, 0]), :, 0]
    assert np.array_equal(x[0::2], np.tile([1e-3, 1.0], (50, 1)))
    assert np.array_equal(x[1::2], np.tile([1.0, 1e-3], (50, 1)))


def test_noiseless_orderings_agree_at_the_truth():
    simulated = _simulate('noiseless-rank-invariant', n=200, seed=5)
    dataset = simulated.dataset
    for tau in (0.25, 0.5, 0.75):
        keys = dataset.y - dgp.true_alpha(tau) * dataset.x[:, :, 0]
        first = set(np.argsort(keys[:, 0])[:int(200 * tau)])
        second = set(np.argsort(keys[:, 1])[:int(200 * tau)])
        assert first == second


def test_noiseless_seed_only_shuffles():
    one = _simulate('noiseless-rank-invariant', n=50, seed=1)
    two = _simulate('noiseless-rank-invariant', n=50, seed=2)
    order_one = np.argsort(one.normal_ranks[:, 0])
    order_two = np.argsort(two.normal_ranks[:, 0])
    assert np.array_equal(one.dataset.y[order_one], two.dataset.y[order_two])
    assert not np.array_equal(one.dataset.y, two.dataset.y)
