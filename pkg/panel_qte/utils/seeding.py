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
"""Deterministic seed derivation for replicate streams.

Replicates (bootstrap draws, Monte Carlo repetitions) each own a random
stream. The stream seed is derived from the run seed and the replicate
index with the splitmix64 finalizer, so a replicate's draws do not depend
on how replicates are scheduled across workers.
"""

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value):
    """Return the splitmix64 mix of a 64-bit integer."""
    z = (int(value) + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def replicate_seed(seed, index):
    """Return the seed of replicate ``index`` under run seed ``seed``.

    The map index -> seed is injective for a fixed run seed: the argument
    of the (bijective) mixer advances by an odd constant per index.
    """
    if index < 0:
        raise ValueError("replicate index must be non-negative")
    return splitmix64((int(seed) + (int(index) + 1) * GOLDEN_GAMMA) & MASK64)


def replicate_rng(seed, index):
    """Return a numpy Generator for replicate ``index``."""
    return np.random.default_rng(replicate_seed(seed, index))
