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
"""Panel-data quantile treatment effects.

This package implements a two-step estimator of quantile treatment effects
for panel data: a profiled quantile regression first step and a minimum
distance second step, together with bootstrap inference, the
changes-in-changes baseline and a Monte Carlo harness.
"""

__version__ = '0.1.0'
