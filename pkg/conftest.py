"""Root pytest config: tier the suite so the default run stays fast.

Marks the full-size Monte Carlo acceptance tests as ``slow`` by name so
`addopts` (see pytest.ini) can deselect them by default. Opt in with
`pytest -m slow`.
"""

import pytest

_SLOW_PARTS = ("test_acceptance", "::TestAcceptance")


def pytest_collection_modifyitems(config, items):
    for item in items:
        nodeid = item.nodeid.replace("\\", "/")
        if any(part in nodeid for part in _SLOW_PARTS):
            item.add_marker(pytest.mark.slow)
