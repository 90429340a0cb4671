import pytest

from nvpump.core import cache
from nvpump.core.settings import settings
from nvpump.experiment.config import ExperimentConfig, config_from_dict
from nvpump.spin.system import SpinSystem


@pytest.fixture(autouse=True)
def restore_settings():
    """Undo any settings change a test (or a CLI option) makes."""
    snapshot = settings.model_dump()
    yield
    for key, value in snapshot.items():
        setattr(settings, key, value)


@pytest.fixture(autouse=True)
def fresh_cache(monkeypatch):
    """Give every test an empty tool result cache."""
    monkeypatch.setattr(cache, "_global_cache", cache.ResultCache())


@pytest.fixture
def system_30mt() -> SpinSystem:
    return SpinSystem(b_field=30.0)


@pytest.fixture
def pt_config() -> ExperimentConfig:
    """PT at 30.2 mT with p_b = 0.2 and no readout."""
    return config_from_dict(
        {
            "name": "pt-test",
            "system": {"b_field": 30.2},
            "optics": {"flip_probability": 0.2},
            "protocol": {"kind": "pt"},
            "readout": {"kind": "none"},
        }
    )

