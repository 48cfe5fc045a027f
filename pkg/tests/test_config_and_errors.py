import logging

import pytest

from tritforge.config.environment import EnvironmentConfig, config
from tritforge.models.pydantic_models import EquivalenceReport, ErrorModel, RunConfig, TauReport
from tritforge.utils.cache_utils import clear_caches, get_cache_key, get_cache_stats, get_entry_cached
from tritforge.utils.error_handlers import (
    EXIT_CHECK_FAILED,
    EXIT_INTEGRITY,
    EXIT_IO,
    EXIT_USAGE,
    CatalogError,
    ConstructionIntegrityError,
    ExportError,
    NormalizationError,
    TauNotApplicableError,
    exit_code_for,
    handle_command_error,
)
from tritforge.utils.logging_config import PerformanceLogger, get_logger, setup_logging


class TestConfig:
    def test_defaults_validate(self):
        is_valid, errors = config.validate()
        assert is_valid, errors

    def test_tolerance_record(self):
        tolerances = config.tolerances()
        assert tolerances["equivalence"] == 1e-10
        assert tolerances["normalization"] == 1e-12
        assert set(tolerances) == {"unitarity", "equivalence", "normalization", "hermitian", "psd", "basis", "fidelity"}

    def test_invalid_tolerance_is_reported(self, monkeypatch):
        monkeypatch.setattr(EnvironmentConfig, "TOL_EQUIVALENCE", 2.0)
        is_valid, errors = EnvironmentConfig.validate()
        assert not is_valid
        assert any("equivalence" in e for e in errors)

    def test_unknown_environment_is_rejected(self, monkeypatch):
        monkeypatch.setattr(EnvironmentConfig, "ENVIRONMENT", "staging")
        is_valid, errors = EnvironmentConfig.validate()
        assert not is_valid
        assert any("ENVIRONMENT" in e for e in errors)

    def test_production_needs_a_log_file(self, monkeypatch):
        monkeypatch.setattr(EnvironmentConfig, "ENVIRONMENT", "production")
        monkeypatch.setattr(EnvironmentConfig, "LOG_FILE", None)
        monkeypatch.setattr(EnvironmentConfig, "LOG_LEVEL", "DEBUG")
        is_valid, errors = EnvironmentConfig.validate()
        assert not is_valid
        assert any("LOG_FILE" in e for e in errors)
        assert any("DEBUG" in e for e in errors)

    def test_production_with_log_file_is_valid(self, monkeypatch, tmp_path):
        monkeypatch.setattr(EnvironmentConfig, "ENVIRONMENT", "production")
        monkeypatch.setattr(EnvironmentConfig, "LOG_FILE", str(tmp_path / "tritforge.log"))
        monkeypatch.setattr(EnvironmentConfig, "LOG_LEVEL", "INFO")
        assert EnvironmentConfig.validate() == (True, [])

    def test_summary_is_flat(self):
        summary = config.get_config_summary()
        assert summary["tol_fidelity"] == 1e-9
        assert summary["workers"] >= 1


class TestExitCodes:
    @pytest.mark.parametrize("exc,code", [
        (CatalogError("nope"), EXIT_USAGE),
        (TauNotApplicableError("ISWAP"), EXIT_USAGE),
        (ConstructionIntegrityError("B1", "bad"), EXIT_INTEGRITY),
        (ExportError("/x", "denied"), EXIT_IO),
        (PermissionError("denied"), EXIT_IO),
        (NormalizationError(2.0), EXIT_CHECK_FAILED),
    ])
    def test_mapping(self, exc, code):
        assert exit_code_for(exc) == code

    def test_error_record(self):
        record = handle_command_error(CatalogError("Unknown decomposition 'Z9'"))
        assert record == {
            "error": "Unknown decomposition 'Z9'",
            "status": "error",
            "exit_code": EXIT_USAGE,
            "details": {"type": "CatalogError"},
        }


class TestModels:
    def test_equivalent_needs_small_deviation(self):
        with pytest.raises(ValueError):
            EquivalenceReport(equivalent=True, global_phase=0.0, max_deviation=0.1, leakage_norm=0.0, tolerance=1e-10)

    def test_tau_max_must_match(self):
        with pytest.raises(ValueError):
            TauReport(entry_id="B1", per_input={"00": 0.0, "11": 2.0}, tau_max=1.0)

    def test_error_model_angles_must_be_finite(self):
        with pytest.raises(ValueError):
            ErrorModel(angles=(float("nan"), 0.0, 0.0))

    def test_error_model_seed_range(self):
        with pytest.raises(ValueError):
            ErrorModel(seed=-1)

    def test_models_are_frozen(self):
        model = ErrorModel()
        with pytest.raises(ValueError):
            model.p_error = 0.5

    def test_run_config_normalizes_psi(self):
        psi = RunConfig(subcommand="qec", psi=(3.0, 4.0)).psi
        assert psi == pytest.approx((0.6, 0.8))

    @pytest.mark.parametrize("psi", [(0.0, 0.0), (float("inf"), 1.0)])
    def test_run_config_rejects_degenerate_psi(self, psi):
        with pytest.raises(ValueError):
            RunConfig(subcommand="qec", psi=psi)

    def test_run_config_rejects_unknown_ids(self):
        with pytest.raises(ValueError):
            RunConfig(subcommand="verify", ids=["B3", "Z9"])
        with pytest.raises(ValueError):
            RunConfig(subcommand="qec", decomposition="Z9")


class TestCache:
    def test_entries_are_built_once(self):
        clear_caches()
        calls = []

        def build():
            calls.append(1)
            return object()

        first = get_entry_cached("test:once", build)
        assert get_entry_cached("test:once", build) is first
        assert len(calls) == 1
        assert get_cache_stats()["catalog_cache"]["size"] >= 1
        clear_caches()
        assert get_cache_stats()["catalog_cache"]["size"] == 0

    def test_key_format(self):
        assert get_cache_key("catalog", "build:B1") == "catalog:build:B1"


class TestLogging:
    def test_file_handlers(self, tmp_path):
        log_file = tmp_path / "logs" / "tritforge.log"
        logger = setup_logging("DEBUG", str(log_file))
        logger.error("boom")
        for handler in logger.handlers:
            handler.flush()
        assert "boom" in log_file.read_text()
        assert "boom" in (tmp_path / "logs" / "tritforge_errors.log").read_text()
        setup_logging("INFO")

    def test_slow_check_warning(self, caplog):
        caplog.set_level(logging.INFO)
        perf = PerformanceLogger(get_logger("tritforge.test"))
        perf.log_slow_check("toffoli_equivalence", "NC5", 1500.0)
        perf.log_slow_check("toffoli_equivalence", "B1", 2.0)
        assert "NC5" in caplog.text
        assert "B1" not in caplog.text
