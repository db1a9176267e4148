# Copyright 2026 The Fidelity Forge Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Process fidelity hierarchy, importance-sampled estimators and gate optimization."""

from ._core import (
    Channel,
    Error,
    estimate,
    fidelity_profile,
    hierarchy_coefficient,
    k_fidelity,
    order_coefficient,
    process_fidelity,
    run_cli,
    variance_bounds,
    zero_fidelity,
)

__all__ = [
    "Channel",
    "Error",
    "estimate",
    "fidelity_profile",
    "hierarchy_coefficient",
    "k_fidelity",
    "order_coefficient",
    "process_fidelity",
    "run_cli",
    "variance_bounds",
    "zero_fidelity",
]
