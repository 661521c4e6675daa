"""
Environment configuration for the regularized-integral engine
Handles numerical defaults, tolerances and logging settings
"""

import os
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from dotenv import load_dotenv

load_dotenv()


class AutomorphicError(Exception):
    """Base class for all engine errors"""


class ConfigError(AutomorphicError):
    """Raised for invalid run configuration (CLI exit code 2)"""


class EngineConfig:
    """Manages environment configuration for jets, quadrature and tolerances"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def get_jet_config(self) -> dict:
        """Get Cauchy-contour settings for Laurent jets"""
        return {
            "radius": float(os.getenv("AUTOMORPHIC_JET_RADIUS", "0.05")),
            "points": int(os.getenv("AUTOMORPHIC_JET_POINTS", "64")),
        }

    def get_quadrature_config(self) -> dict:
        """Get fundamental-domain quadrature settings"""
        return {
            "x_points": int(os.getenv("AUTOMORPHIC_X_POINTS", "64")),
            "panel_width": float(os.getenv("AUTOMORPHIC_PANEL_WIDTH", "0.5")),
            "panel_nodes": int(os.getenv("AUTOMORPHIC_PANEL_NODES", "16")),
            "strip_height": float(os.getenv("AUTOMORPHIC_STRIP_HEIGHT", "8.0")),
            "lower_nodes": int(os.getenv("AUTOMORPHIC_LOWER_NODES", "24")),
            "t_min": float(os.getenv("AUTOMORPHIC_T_MIN", "0.01")),
            "t_max": float(os.getenv("AUTOMORPHIC_T_MAX", "16.0")),
        }

    def get_tolerance_config(self) -> dict:
        """Get tolerances used by the engine and the verification suites"""
        return {
            "profile_mismatch": float(os.getenv("AUTOMORPHIC_PROFILE_TOL", "1e-6")),
            "pole_guard": float(os.getenv("AUTOMORPHIC_POLE_GUARD", "1e-3")),
            "identity": float(os.getenv("AUTOMORPHIC_IDENTITY_TOL", "1e-5")),
            "t_independence": float(os.getenv("AUTOMORPHIC_T_TOL", "1e-6")),
            "products": float(os.getenv("AUTOMORPHIC_PRODUCTS_TOL", "1e-3")),
        }

    def get_system_config(self) -> dict:
        """Get system configuration"""
        return {
            "log_level": os.getenv("LOG_LEVEL", "INFO"),
            "log_file": os.getenv("LOG_FILE", "automorphic.log"),
            "report_dir": os.getenv("AUTOMORPHIC_REPORT_DIR", "reports"),
            "max_workers": int(os.getenv("AUTOMORPHIC_MAX_WORKERS", "4")),
        }

    def validate_config(self) -> dict:
        """Validate configuration and return status"""
        validation_result = {
            "valid": True,
            "errors": [],
            "warnings": []
        }

        try:
            jet_config = self.get_jet_config()
            quad_config = self.get_quadrature_config()
            tol_config = self.get_tolerance_config()
            system_config = self.get_system_config()
        except ValueError as e:
            validation_result["valid"] = False
            validation_result["errors"].append(f"Configuration error: {e}")
            return validation_result

        if not 0 < jet_config["radius"] < 0.25:
            validation_result["valid"] = False
            validation_result["errors"].append("Jet radius must lie in (0, 0.25)")
        if jet_config["points"] < 16:
            validation_result["warnings"].append("Fewer than 16 contour points limits jet accuracy")
        if quad_config["x_points"] < 16:
            validation_result["warnings"].append("x_points below 16 gives a coarse kernel average")
        if not quad_config["t_min"] < 1 < quad_config["t_max"]:
            validation_result["valid"] = False
            validation_result["errors"].append("t_min < 1 < t_max is required")
        for name, value in tol_config.items():
            if value <= 0:
                validation_result["valid"] = False
                validation_result["errors"].append(f"Tolerance {name} must be positive")
        if system_config["log_level"].upper() not in ("DEBUG", "INFO", "WARNING", "ERROR"):
            validation_result["warnings"].append(f"Unknown log level {system_config['log_level']}")

        self.logger.info("Configuration validation completed")
        return validation_result


# Global configuration instance
config = EngineConfig()

SUITES = ("constants", "eisenstein", "hecke", "regint", "products", "coset", "padic", "mellin", "lattice")
SUITE_TOLERANCES = ("identity", "t_independence", "products")


@dataclass
class RunConfig:
    """Settings for one verification run"""
    suites: Optional[List[str]] = None
    tol: Optional[float] = None
    seed: int = 20240601
    out: Optional[str] = None
    jobs: Optional[int] = None
    T_list: Optional[List[float]] = None
    tolerances: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.suites:
            self.suites = list(SUITES)
        unknown = [name for name in self.suites if name not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suites {unknown}; available: {list(SUITES)}")
        if self.out is None:
            self.out = os.path.join(config.get_system_config()["report_dir"], "report.json")
        if self.jobs is None:
            self.jobs = 1
        if self.T_list is None:
            self.T_list = [2.0, 4.0]
        self.tolerances = {**config.get_tolerance_config(), **self.tolerances}
        if self.tol is not None:
            if self.tol <= 0:
                raise ConfigError(f"tolerance must be positive, got {self.tol}")
            self.tolerances = {name: (self.tol if name in SUITE_TOLERANCES else value)
                               for name, value in self.tolerances.items()}
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ConfigError(f"tolerance {name} must be positive, got {value}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be at least 1, got {self.jobs}")
        if any(T < 1 for T in self.T_list):
            raise ConfigError(f"truncation heights must be >= 1, got {self.T_list}")
