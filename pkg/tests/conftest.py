import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from qksvm import _pure


def _backends():
    backends = [pytest.param(_pure, id="pure")]
    try:
        from qksvm import _core

        backends.append(pytest.param(_core, id="compiled"))
    except ImportError:
        pass
    return backends


@pytest.fixture(params=_backends())
def gate_backend(request):
    """Run a test against every available gate-kernel backend."""
    return request.param
