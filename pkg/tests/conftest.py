import os

import pytest

from powerlawst import cascade


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    """One fresh sweep cache shared by the whole session (library + CLI)."""
    return tmp_path_factory.mktemp("sweep-cache")


@pytest.fixture(scope="session")
def fit32(cache_dir):
    """The alpha=3, d=2 reference fit; built cold exactly once per session.

    ``fit32.build_seconds`` is the honest cold-sweep wall time, used by the
    runtime-budget assertions.
    """
    return cascade.build_fit(3.0, 2, cache_dir=cache_dir)


@pytest.fixture()
def cli_env(cache_dir, fit32):
    """Environment for CLI subprocesses, pointed at the warmed session cache."""
    env = os.environ.copy()
    env["POWERLAWST_CACHE"] = str(cache_dir)
    env.setdefault("MPLBACKEND", "Agg")
    return env
