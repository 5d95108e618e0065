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

import numpy as np
import pytest

from panel_qte.baseline.ecdf import Ecdf
from panel_qte.baseline.ecdf import mixture


def test_from_sample_steps():
    ecdf = Ecdf.from_sample([3.0, 1.0, 2.0, 1.0])
    assert np.array_equal(ecdf.support, [1.0, 2.0, 3.0])
    assert np.array_equal(ecdf.steps, [0.5, 0.75, 1.0])


def test_cdf_is_right_continuous():
    ecdf = Ecdf.from_sample([1.0, 2.0])
    assert ecdf.cdf(0.999) == 0.0
    assert ecdf.cdf(1.0) == 0.5
    assert ecdf.cdf(1.5) == 0.5
    assert ecdf.cdf(2.0) == 1.0
    assert ecdf.cdf(10.0) == 1.0
    assert np.array_equal(ecdf.cdf(np.array([0.0, 1.0, 2.0])),
                          [0.0, 0.5, 1.0])


def test_quantile_is_generalized_inverse():
    ecdf = Ecdf.from_sample([1.0, 2.0, 3.0, 4.0])
    assert ecdf.quantile(0.25) == 1.0
    assert ecdf.quantile(0.26) == 2.0
    assert ecdf.quantile(0.5) == 2.0
    assert ecdf.quantile(1.0) == 4.0
    # clamped outside (0, 1]
    assert ecdf.quantile(0.0) == 1.0
    assert ecdf.quantile(1.5) == 4.0


def test_quantile_of_cdf():
    rng = np.random.default_rng(4)
    sample = rng.standard_normal(50)
    ecdf = Ecdf.from_sample(sample)
    assert np.array_equal(ecdf.quantile(ecdf.cdf(sample)), sample)
    points = rng.standard_normal(200)
    inside = points >= sample.min()
    assert np.all(ecdf.quantile(ecdf.cdf(points[inside])) <= points[inside])


@pytest.mark.parametrize("support,steps", [
    ([], []),
    ([1.0, 2.0], [1.0]),
    ([2.0, 1.0], [0.5, 1.0]),
    ([1.0, 2.0], [0.6, 0.5]),
    ([1.0, 2.0], [0.5, 0.9]),
])
def test_invalid_ecdf(support, steps):
    with pytest.raises(ValueError):
        Ecdf(support=support, steps=steps)


def test_mixture():
    first = Ecdf.from_sample([1.0, 3.0])
    second = Ecdf.from_sample([2.0])
    mixed = mixture([first, second], [0.5, 0.5])
    assert np.array_equal(mixed.support, [1.0, 2.0, 3.0])
    assert np.allclose(mixed.steps, [0.25, 0.75, 1.0])


def test_mixture_weights():
    ecdf = Ecdf.from_sample([1.0])
    with pytest.raises(ValueError):
        mixture([ecdf, ecdf], [0.7, 0.7])
    with pytest.raises(ValueError):
        mixture([ecdf, ecdf], [1.5, -0.5])
