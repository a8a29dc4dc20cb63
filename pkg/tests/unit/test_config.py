"""Unit tests for configuration loading and validation."""

from pathlib import Path

import pytest

from theta_quant.config import (
    get_default_threads,
    get_log_level,
    load_config,
    parse_complex,
    resolve_output,
)
from theta_quant.errors import ConfigError


@pytest.fixture
def write_ini(tmp_path):
    """Write an INI file into a temporary directory and return its path."""
    def _write(text: str) -> Path:
        path = tmp_path / "run.ini"
        path.write_text(text, encoding="utf-8")
        return path
    return _write


class TestParseComplex:
    """Tests for complex literals with i or j."""

    @pytest.mark.parametrize("text,expected", [
        ("i", 1j), ("-i", -1j), ("0.5+2i", 0.5 + 2j), ("1+i", 1 + 1j),
        ("3", 3 + 0j), ("-1.5j", -1.5j), (" 0.25 - 1i ", 0.25 - 1j),
    ])
    def test_literals(self, text, expected):
        assert parse_complex(text) == expected

    def test_garbage(self):
        with pytest.raises(ValueError):
            parse_complex("tau")


class TestLoadConfig:
    """Tests for load_config precedence and errors."""

    def test_defaults_without_file(self):
        config = load_config(None, 'invariants')
        assert config.tau == 1j
        assert config.tol == 1e-10

    def test_flag_overrides_file(self, write_ini):
        """File value 51 is replaced by the flag value 101."""
        path = write_ini("[defaults]\ntol = 1e-8\n\n[mathieu-bands]\na-steps = 51\nout = chart.csv\n")
        assert load_config(path, 'mathieu-bands').a_steps == 51
        config = load_config(path, 'mathieu-bands', {'a_steps': 101, 'e_max': None})
        assert config.a_steps == 101
        assert config.tol == 1e-8
        assert config.e_max == 25.0
        assert config.out == Path('chart.csv')

    def test_command_section_overrides_defaults(self, write_ini):
        path = write_ini("[defaults]\nk = 0.3\n\n[invariants]\nk = 0.7\n\n[integrate]\nk = 0.9\n")
        assert load_config(path, 'invariants').k == 0.7
        assert load_config(path, 'legendre-check').k == 0.3

    def test_complex_values(self, write_ini):
        path = write_ini("[defaults]\ntau = 0.5+1.5i\nalpha = 2i\n")
        config = load_config(path, 'theta-eval')
        assert config.tau == 0.5 + 1.5j
        assert config.alpha == 2j

    def test_empty_file(self, write_ini):
        config = load_config(write_ini(""), 'bracket-check')
        assert config.samples == 100

    def test_missing_output(self):
        with pytest.raises(ConfigError) as excinfo:
            load_config(None, 'mathieu-bands')
        assert excinfo.value.field == 'out'

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.ini", 'invariants')

    def test_parse_error_has_line_number(self, write_ini):
        path = write_ini("[defaults]\ntol = 1e-9\nthis line is not an option\n")
        with pytest.raises(ConfigError) as excinfo:
            load_config(path, 'invariants')
        assert excinfo.value.line == 3
        assert "line 3" in str(excinfo.value)

    def test_missing_section_header(self, write_ini):
        with pytest.raises(ConfigError) as excinfo:
            load_config(write_ini("tol = 1e-9\n"), 'invariants')
        assert excinfo.value.line == 1

    def test_unknown_option(self, write_ini):
        with pytest.raises(ConfigError) as excinfo:
            load_config(write_ini("[defaults]\nfrobnicate = 3\n"), 'invariants')
        assert excinfo.value.field == 'frobnicate'

    def test_invalid_value(self, write_ini):
        with pytest.raises(ConfigError) as excinfo:
            load_config(write_ini("[defaults]\ntol = small\n"), 'invariants')
        assert excinfo.value.field == 'tol'

    @pytest.mark.parametrize("overrides,field", [
        ({'tau': 0.5}, 'tau'),
        ({'tol': -1.0}, 'tol'),
        ({'modes': 4}, 'modes'),
        ({'a_min': 2.0, 'a_max': 1.0}, 'a_max'),
        ({'system': 'pendulum'}, 'system'),
        ({'truncation': 2}, 'truncation'),
        ({'format': 'xml'}, 'format'),
    ])
    def test_validation_names_field(self, overrides, field):
        with pytest.raises(ConfigError) as excinfo:
            load_config(None, 'integrate', {'out': 'run.csv', **overrides})
        assert excinfo.value.field == field

    def test_format_is_case_insensitive(self):
        assert load_config(None, 'integrate', {'out': 'run.csv', 'format': 'JSON'}).format == 'json'

    def test_values_follow_field_types(self, write_ini):
        """Each option is converted by the annotated type of its RunConfig field."""
        path = write_ini("[defaults]\na-steps = 7\nt0 = 1\ntau = 2i\nout = run.csv\nsystem = euler\n")
        config = load_config(path, 'integrate')
        assert config.a_steps == 7 and isinstance(config.a_steps, int)
        assert config.t0 == 1.0 and isinstance(config.t0, float)
        assert config.tau == 2j
        assert config.out == Path('run.csv')
        assert config.system == 'euler'

    def test_fractional_integer_rejected(self):
        with pytest.raises(ConfigError) as excinfo:
            load_config(None, 'integrate', {'out': 'run.csv', 'samples': 2.5})
        assert excinfo.value.field == 'samples'

    def test_unknown_command(self):
        with pytest.raises(ConfigError):
            load_config(None, 'frobnicate')


class TestEnvironment:
    """Tests for environment-variable defaults."""

    def test_threads_from_environment(self, monkeypatch):
        monkeypatch.setenv("THETA_QUANT_THREADS", "2")
        assert get_default_threads() == 2
        assert load_config(None, 'invariants').threads == 2
        assert load_config(None, 'invariants', {'threads': 6}).threads == 6

    @pytest.mark.parametrize("raw", ["0", "many"])
    def test_invalid_threads(self, monkeypatch, raw):
        monkeypatch.setenv("THETA_QUANT_THREADS", raw)
        with pytest.raises(ConfigError):
            get_default_threads()

    def test_log_level(self, monkeypatch):
        monkeypatch.setenv("THETA_QUANT_LOG_LEVEL", "debug")
        assert get_log_level() == "DEBUG"
        monkeypatch.setenv("THETA_QUANT_LOG_LEVEL", "chatty")
        with pytest.raises(ConfigError):
            get_log_level()

    def test_resolve_output(self, monkeypatch, tmp_path):
        monkeypatch.setenv("THETA_QUANT_OUTPUT_DIR", str(tmp_path))
        assert resolve_output(Path("chart.csv")) == tmp_path / "chart.csv"
        absolute = tmp_path / "abs.csv"
        assert resolve_output(absolute) == absolute
        assert resolve_output(None) is None
