from importlib import resources
from pathlib import Path

import pytest

from intelgame.game import atlantic

DATA = Path(str(resources.files("intelgame") / "data"))


@pytest.fixture
def game():
    return atlantic()


@pytest.fixture
def data_dir():
    return DATA
