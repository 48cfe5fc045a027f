"""
Environment Configuration
Provides centralized environment variable management and the tolerance record
"""
import os
from typing import Optional, Dict, Any
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
env_path = Path(__file__).parent.parent.parent / ".env"
if env_path.exists():
    load_dotenv(env_path)

ENVIRONMENTS = ("development", "testing", "production")


class EnvironmentConfig:
    """
    Environment configuration manager.
    Centralizes all environment variable access with defaults.
    """

    # Application
    ENVIRONMENT: str = os.getenv("ENVIRONMENT", "development")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE: Optional[str] = os.getenv("LOG_FILE", None)

    # Monte Carlo
    _seed = os.getenv("TRITFORGE_SEED", "0").strip()
    SEED: int = int(_seed) if _seed.lstrip("-").isdigit() else 0

    # Tolerances
    TOL_UNITARITY: float = float(os.getenv("TRITFORGE_TOL_UNITARITY", "1e-10"))
    TOL_EQUIVALENCE: float = float(os.getenv("TRITFORGE_TOL_EQUIVALENCE", "1e-10"))
    TOL_NORMALIZATION: float = float(os.getenv("TRITFORGE_TOL_NORMALIZATION", "1e-12"))
    TOL_HERMITIAN: float = float(os.getenv("TRITFORGE_TOL_HERMITIAN", "1e-12"))
    TOL_PSD: float = float(os.getenv("TRITFORGE_TOL_PSD", "1e-10"))
    TOL_BASIS: float = float(os.getenv("TRITFORGE_TOL_BASIS", "1e-10"))
    TOL_FIDELITY: float = float(os.getenv("TRITFORGE_TOL_FIDELITY", "1e-9"))

    # Verifier
    TAU_THRESHOLD: float = float(os.getenv("TRITFORGE_TAU_THRESHOLD", "0.5"))
    RANDOM_TARGETS: int = int(os.getenv("TRITFORGE_RANDOM_TARGETS", "20"))
    MAX_SITES: int = int(os.getenv("TRITFORGE_MAX_SITES", "8"))
    WORKERS: int = int(os.getenv("TRITFORGE_WORKERS", "4"))

    @classmethod
    def is_production(cls) -> bool:
        """Check if running in production environment."""
        return cls.ENVIRONMENT.lower() == "production"

    @classmethod
    def tolerances(cls) -> Dict[str, float]:
        """The tolerance record shared by every checker."""
        return {
            "unitarity": cls.TOL_UNITARITY,
            "equivalence": cls.TOL_EQUIVALENCE,
            "normalization": cls.TOL_NORMALIZATION,
            "hermitian": cls.TOL_HERMITIAN,
            "psd": cls.TOL_PSD,
            "basis": cls.TOL_BASIS,
            "fidelity": cls.TOL_FIDELITY,
        }

    @classmethod
    def validate(cls):
        """
        Validate environment configuration.
        Returns (is_valid, errors).
        """
        errors = []

        if cls.ENVIRONMENT.lower() not in ENVIRONMENTS:
            errors.append(f"ENVIRONMENT must be one of {ENVIRONMENTS}, got '{cls.ENVIRONMENT}'")

        # Required in production
        if cls.is_production():
            if not cls.LOG_FILE:
                errors.append("LOG_FILE is required in production")

            if cls.LOG_LEVEL.upper() == "DEBUG":
                errors.append("LOG_LEVEL should not be DEBUG in production")

        for name, value in cls.tolerances().items():
            if not 0 < value < 1:
                errors.append(f"tolerance '{name}' must lie in (0, 1), got {value}")

        if not 0 < cls.TAU_THRESHOLD < 1:
            errors.append("TRITFORGE_TAU_THRESHOLD must lie in (0, 1)")

        if cls.RANDOM_TARGETS < 1:
            errors.append("TRITFORGE_RANDOM_TARGETS must be positive")

        if cls.SEED < 0:
            errors.append("TRITFORGE_SEED must be non-negative")

        if cls.WORKERS < 1:
            errors.append("TRITFORGE_WORKERS must be positive")

        return len(errors) == 0, errors

    @classmethod
    def get_config_summary(cls) -> Dict[str, Any]:
        """Get configuration summary (safe for logging)."""
        return {
            "environment": cls.ENVIRONMENT,
            "log_level": cls.LOG_LEVEL,
            "log_file": cls.LOG_FILE,
            "seed": cls.SEED,
            "tau_threshold": cls.TAU_THRESHOLD,
            "random_targets": cls.RANDOM_TARGETS,
            "max_sites": cls.MAX_SITES,
            "workers": cls.WORKERS,
            **{f"tol_{name}": value for name, value in cls.tolerances().items()},
        }


# Global config instance
config = EnvironmentConfig()
