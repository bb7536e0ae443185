import os
import sys
from pathlib import Path

import pytest

from src.balance_extract import derive_system
from src.riccati_calculus import FkdvParams


ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def sk():
    return FkdvParams.from_preset('sk')


@pytest.fixture
def kk():
    return FkdvParams.from_preset('kk')


@pytest.fixture
def ito():
    return FkdvParams.from_preset('ito')


@pytest.fixture(scope='session')
def symbolic_system():
    return derive_system(None)


@pytest.fixture
def run_cli(tmp_path):
    """Run `python -m src.cli` from the repo root with output going to tmp_path"""
    import subprocess

    def run(*args, env=None):
        environment = dict(os.environ)
        environment['FKDV_OUTPUT_DIR'] = str(tmp_path)
        environment.update(env or {})
        return subprocess.run([sys.executable, '-m', 'src.cli', *args], cwd=ROOT,
                              env=environment, capture_output=True, text=True, timeout=600)

    return run
