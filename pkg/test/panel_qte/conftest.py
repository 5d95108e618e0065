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

"""Replication checks of the simulation studies.

They run for minutes to hours and are skipped unless
PANEL_QTE_REPLICATION=1 is set in the environment.
"""

import os

import pytest

from panel_qte.utils import parallel

HERE = os.path.dirname(os.path.abspath(__file__))
REPLICATION_ENV = 'PANEL_QTE_REPLICATION'


def pytest_collection_modifyitems(config, items):
    # pylint: disable=unused-argument
    if os.environ.get(REPLICATION_ENV) == '1':
        return
    skip = pytest.mark.skip(
        reason="set {}=1 to run the replication checks".format(
            REPLICATION_ENV))
    for item in items:
        if str(item.fspath).startswith(HERE):
            item.add_marker(skip)


@pytest.fixture(scope="session")
def threads():
    return parallel.resolve_threads()
