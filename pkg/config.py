"""
Configuration management for the AxFi feature-importance toolkit
"""

import os
from fractions import Fraction
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

WEIGHT_MODES = ('count', 'ratio', 'sampled', 'unweighted')


class Config:
    """
    Central configuration class for the application
    Every value can be overridden from the environment or a .env file
    """

    # Enumeration caps
    CAP_SUBSETS = int(os.getenv('AXFI_CAP_SUBSETS', 22))
    CAP_SPACE = int(os.getenv('AXFI_CAP_SPACE', 10_000_000))
    CAP_EXHAUSTIVE = int(os.getenv('AXFI_CAP_EXHAUSTIVE', 16))

    # Weights
    WEIGHT_MODE = os.getenv('AXFI_WEIGHT_MODE', 'count')
    SAMPLES = int(os.getenv('AXFI_SAMPLES', 5000))
    SEED = int(os.getenv('AXFI_SEED', 0))

    # Ranking comparison
    RBO_PERSISTENCE = Fraction(os.getenv('AXFI_RBO_PERSISTENCE', '1/2'))
    RBO_DEPTH = int(os.getenv('AXFI_RBO_DEPTH', 5))

    # Output
    DECIMAL_PLACES = int(os.getenv('AXFI_DECIMAL_PLACES', 6))
    LOG_LEVEL = os.getenv('AXFI_LOG_LEVEL', 'INFO')

    def validate(self):
        """
        Validate that all configuration values are usable
        """
        errors = []

        for name in ('CAP_SUBSETS', 'CAP_SPACE', 'CAP_EXHAUSTIVE'):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be >= 1")

        if self.WEIGHT_MODE not in WEIGHT_MODES:
            errors.append(f"WEIGHT_MODE must be one of {', '.join(WEIGHT_MODES)}")

        if self.SAMPLES < 1:
            errors.append("SAMPLES must be >= 1")

        if not 0 < self.RBO_PERSISTENCE < 1:
            errors.append("RBO_PERSISTENCE must lie strictly between 0 and 1")

        if self.RBO_DEPTH < 1:
            errors.append("RBO_DEPTH must be >= 1")

        if self.DECIMAL_PLACES < 0:
            errors.append("DECIMAL_PLACES must be >= 0")

        if errors:
            raise ValueError(f"Configuration errors:\n" + "\n".join(f"  - {e}" for e in errors))

        return True


# Create global config instance
config = Config()
