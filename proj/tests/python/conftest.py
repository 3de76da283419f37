import os
import shutil

import pytest


@pytest.fixture(scope="session")
def saw_cli():
    path = os.environ.get("SAW_CLI") or shutil.which("saw")
    if not path or not os.path.exists(path):
        pytest.skip("saw executable not available")
    return path
