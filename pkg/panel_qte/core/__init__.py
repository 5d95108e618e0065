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
"""Panel data model, run configuration and standardization."""

from panel_qte.core.config import EstimationConfig
from panel_qte.core.config import parse_tau_grid
from panel_qte.core.panel import PanelDataset
from panel_qte.core.panel import StackedRegressors
from panel_qte.core.panel import ValidationReport
from panel_qte.core.panel import standardize
from panel_qte.core.panel import validate

__all__ = [
    'EstimationConfig', 'PanelDataset', 'StackedRegressors',
    'ValidationReport', 'parse_tau_grid', 'standardize', 'validate',
]
