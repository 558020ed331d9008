# Copyright 2026 The GME Activation Authors
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

"""Python access to the GME activation simulator."""

import json

from ._core import (
    InvariantViolation,
    analytic_Pn,
    build_prop1_example,
    build_prop2_state,
    build_prop3_state,
    build_sigma,
    certify,
    distill,
    is_gme_pure,
    recurrence_fidelity,
    run_cli,
    sigma_scan,
    svetlichny,
)

__version__ = "1.0.0"


def run_json(*args):
    """Run a subcommand with JSON output and return the parsed document."""
    code, out, err = run_cli(list(args))
    if code != 0:
        raise RuntimeError(f"gme {' '.join(args)} exited with {code}: {err.strip()}")
    return json.loads(out)


__all__ = [
    "InvariantViolation",
    "analytic_Pn",
    "build_prop1_example",
    "build_prop2_state",
    "build_prop3_state",
    "build_sigma",
    "certify",
    "distill",
    "is_gme_pure",
    "recurrence_fidelity",
    "run_cli",
    "run_json",
    "sigma_scan",
    "svetlichny",
]
