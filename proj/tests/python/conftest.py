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

import json
import os
import pathlib
import shutil

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def schema():
    return json.loads((ROOT / "schemas" / "report.schema.json").read_text())


@pytest.fixture(scope="session")
def gme_binary():
    path = os.environ.get("GME_BINARY") or shutil.which("gme")
    if not path:
        pytest.skip("gme binary not available")
    return path
