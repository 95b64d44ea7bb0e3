import pytest

from dyadsim import SweepConfig, analyze, run_sweep

DEFAULT_MASTER_SEED = 42


@pytest.fixture(scope="session")
def default_config():
    return SweepConfig(master_seed=DEFAULT_MASTER_SEED)


@pytest.fixture(scope="session")
def default_table(default_config):
    """The full default sweep (81 contexts x 100 runs), shared by the suite."""
    return run_sweep(default_config)


@pytest.fixture(scope="session")
def default_report(default_table):
    return analyze(default_table)
