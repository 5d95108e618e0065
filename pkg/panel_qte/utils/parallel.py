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
"""Order-preserving parallel map over worker processes."""

import logging
import os

from concurrent.futures import ProcessPoolExecutor

LOGGER = logging.getLogger(__name__)

THREADS_ENV = "QTE_THREADS"


def resolve_threads(threads=None, default=None):
    """Return the worker count to use.

    Precedence: explicit value, then the QTE_THREADS environment variable,
    then ``default`` (available cores when ``default`` is None).
    """
    if threads is None:
        env_value = os.environ.get(THREADS_ENV)
        if env_value:
            try:
                threads = int(env_value)
            except ValueError:
                LOGGER.warning("Ignoring non-integer %s=%r",
                               THREADS_ENV, env_value)
    if threads is None:
        threads = default if default is not None else (os.cpu_count() or 1)
    return max(1, int(threads))


def ordered_map(func, items, threads=1):
    """Apply ``func`` to every item and return the results in item order.

    With one worker the map runs in-process. Otherwise a process pool is
    used; ``func`` and the items must be picklable. Results come back in
    submission order whatever the completion order was, so any reduction
    over them is deterministic.
    """
    items = list(items)
    workers = min(max(1, int(threads or 1)), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]

    LOGGER.debug("Dispatching %d tasks to %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
