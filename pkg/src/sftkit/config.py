import os

from pydantic import BaseModel, Field


# Helper functions for parsing environment variables
def get_str_env(key: str, default: str = "") -> str:
    return os.environ.get(key, default)


def get_int_env(key: str, default: int) -> int:
    try:
        return int(os.environ.get(key, str(default)))
    except ValueError:
        return default


def get_bool_env(key: str, default: bool) -> bool:
    value = os.environ.get(key, str(default)).lower()
    return value == "true"


# Default factory functions
def default_max_simplex_dim() -> int:
    return get_int_env("SFT_MAX_SIMPLEX_DIM", 6)


def default_brute_force_max_vertices() -> int:
    return get_int_env("SFT_BRUTE_FORCE_MAX_VERTICES", 7)


def default_max_cone_rank() -> int:
    return get_int_env("SFT_MAX_CONE_RANK", 10)


def default_max_automorphism_vertices() -> int:
    return get_int_env("SFT_MAX_AUTOMORPHISM_VERTICES", 30)


def default_word_length() -> int:
    return get_int_env("SFT_DEFAULT_WORD_LENGTH", 3)


def default_max_sequence_length() -> int:
    return get_int_env("SFT_DEFAULT_MAX_SEQUENCE_LENGTH", 3)


def default_selftest_seed() -> int:
    return get_int_env("SFT_SELFTEST_SEED", 0)


def default_selftest_trials() -> int:
    return get_int_env("SFT_SELFTEST_TRIALS", 50)


def default_output_format() -> str:
    return get_str_env("SFT_OUTPUT_FORMAT", "json").lower()


def default_json_indent() -> int:
    return get_int_env("SFT_JSON_INDENT", 2)


def default_log_level() -> str:
    return get_str_env("LOG_LEVEL", "WARNING")


def default_log_dir() -> str:
    return get_str_env("LOG_DIR", "logs")


def default_max_size_mb() -> int:
    return get_int_env("LOG_MAX_SIZE_MB", 10)


def default_backup_count() -> int:
    return get_int_env("LOG_BACKUP_COUNT", 5)


def default_use_color() -> bool:
    return get_bool_env("LOG_USE_COLOR", True)


def default_log_to_file() -> bool:
    return get_bool_env("LOG_TO_FILE", False)


class LimitsConfig(BaseModel):
    """Guards against combinatorial explosion."""
    max_simplex_dim: int = Field(default_factory=default_max_simplex_dim)
    brute_force_max_vertices: int = Field(default_factory=default_brute_force_max_vertices)
    max_cone_rank: int = Field(default_factory=default_max_cone_rank)
    max_automorphism_vertices: int = Field(default_factory=default_max_automorphism_vertices)


class ComplexConfig(BaseModel):
    """Chain complex and flow category defaults."""
    default_word_length: int = Field(default_factory=default_word_length)
    max_sequence_length: int = Field(default_factory=default_max_sequence_length)


class SelftestConfig(BaseModel):
    """Randomized self-test configuration."""
    seed: int = Field(default_factory=default_selftest_seed)
    trials: int = Field(default_factory=default_selftest_trials)


class OutputConfig(BaseModel):
    """Report output configuration."""
    format: str = Field(default_factory=default_output_format)
    json_indent: int = Field(default_factory=default_json_indent)


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = Field(default_factory=default_log_level)
    log_dir: str = Field(default_factory=default_log_dir)
    max_size_mb: int = Field(default_factory=default_max_size_mb)
    backup_count: int = Field(default_factory=default_backup_count)
    use_color: bool = Field(default_factory=default_use_color)
    log_to_file: bool = Field(default_factory=default_log_to_file)


class AppConfig(BaseModel):
    """Application configuration."""
    limits: LimitsConfig = Field(default_factory=LimitsConfig)
    complex: ComplexConfig = Field(default_factory=ComplexConfig)
    selftest: SelftestConfig = Field(default_factory=SelftestConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


# Create a singleton config instance
config = AppConfig()
