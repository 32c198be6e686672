import inspect
import os
from unittest import mock

from sftkit.config import AppConfig


def test_default_config():
    """Test that the default configuration loads correctly."""
    with mock.patch.dict(os.environ, {}, clear=True):
        config = AppConfig()

    # Check that all sections exist
    assert hasattr(config, "limits")
    assert hasattr(config, "complex")
    assert hasattr(config, "selftest")
    assert hasattr(config, "output")
    assert hasattr(config, "logging")

    # Check some default values
    assert config.limits.max_simplex_dim == 6
    assert config.limits.brute_force_max_vertices == 7
    assert config.complex.default_word_length == 3
    assert config.selftest.trials == 50
    assert config.output.format == "json"
    assert config.logging.level == "WARNING"
    assert config.logging.log_to_file is False


def test_environment_variables():
    """Test that environment variables override default configuration."""
    with mock.patch.dict(os.environ, {
        "SFT_MAX_SIMPLEX_DIM": "4",
        "SFT_DEFAULT_WORD_LENGTH": "5",
        "SFT_SELFTEST_SEED": "42",
        "SFT_OUTPUT_FORMAT": "TABLE",
        "LOG_LEVEL": "INFO",
    }):
        config = AppConfig()

        # Check that environment variables were applied
        assert config.limits.max_simplex_dim == 4
        assert config.complex.default_word_length == 5
        assert config.selftest.seed == 42
        assert config.output.format == "table"
        assert config.logging.level == "INFO"


def test_bad_integer_falls_back_to_default():
    """Test that an unparsable integer keeps the default."""
    with mock.patch.dict(os.environ, {"SFT_MAX_CONE_RANK": "ten"}):
        config = AppConfig()

        assert config.limits.max_cone_rank == 10


def test_boolean_parsing():
    """Test that boolean values are parsed correctly."""
    with mock.patch.dict(os.environ, {
        "LOG_USE_COLOR": "false",
        "LOG_TO_FILE": "true",
    }):
        config = AppConfig()

        assert config.logging.use_color is False
        assert config.logging.log_to_file is True


def test_every_env_helper_is_used():
    """Test that each environment reader backs at least one default factory."""
    from sftkit import config as config_module

    helpers = [name for name in vars(config_module) if name.startswith("get_") and name.endswith("_env")]
    factories = "".join(
        inspect.getsource(obj) for name, obj in vars(config_module).items() if name.startswith("default_")
    )

    assert sorted(helpers) == ["get_bool_env", "get_int_env", "get_str_env"]
    assert all(f"{name}(" in factories for name in helpers)
