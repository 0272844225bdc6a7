"""
Run Configuration

This module provides the RunConfig dataclass shared by the library entry points
and the command-line front end: precision, caps, seed, cache location and
worker budget.
"""

import os
import logging
from dataclasses import asdict, dataclass, field

from arithmetic_core.charsums import DEFAULT_BITS, FFT_THRESHOLD, get_gauss_table
from arithmetic_core.errors import UsageError
from arithmetic_core.ffield import FIELD_CAP, TABLE_CAP, build_field

logger = logging.getLogger(__name__)

WORK_CAP = 10 ** 9
CACHE_ENV = "DWORK_CACHE_DIR"
PROFILES = ("quick", "full")


def default_cache_dir():
    """$DWORK_CACHE_DIR, else output/cache at the repository root."""
    env = os.environ.get(CACHE_ENV)
    if env:
        return env
    return os.path.join(os.path.dirname(__file__), "..", "output", "cache")


@dataclass
class RunConfig:
    precision_bits: int = DEFAULT_BITS
    field_cap: int = FIELD_CAP
    table_cap: int = TABLE_CAP
    work_cap: int = WORK_CAP
    seed: int = 0
    fft_threshold: int = FFT_THRESHOLD
    cache_dir: str = field(default_factory=default_cache_dir)
    output: str = None
    workers: int = 1
    profile: str = "quick"
    force: bool = False

    @classmethod
    def from_args(cls, args):
        """Build a config from an argparse namespace, ignoring absent flags."""
        config = cls()
        mapping = {
            "precision_bits": "precision_bits",
            "field_cap": "field_cap",
            "table_cap": "table_cap",
            "work_cap": "work_cap",
            "seed": "seed",
            "fft_threshold": "fft_threshold",
            "cache_dir": "cache_dir",
            "out": "output",
            "workers": "workers",
            "profile": "profile",
            "force": "force",
        }
        for flag, attr in mapping.items():
            value = getattr(args, flag, None)
            if value is not None:
                setattr(config, attr, value)
        if getattr(args, "no_cache", False):
            config.cache_dir = None
        config.validate()
        return config

    def validate(self):
        """
        Check caps and precision.

        Raises:
            UsageError: A cap is not positive, bits below 64, or unknown profile
        """
        for name in ("field_cap", "table_cap", "work_cap", "fft_threshold", "workers"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")
        if self.precision_bits < 64:
            raise UsageError("precision_bits must be at least 64")
        if self.profile not in PROFILES:
            raise UsageError(f"unknown profile {self.profile!r}")
        return self

    def field(self, p, m):
        return build_field(p, m, self.seed, field_cap=self.field_cap,
                           table_cap=self.table_cap, cache_dir=self.cache_dir)

    def gauss_table(self, ctx):
        return get_gauss_table(ctx, self.precision_bits, self.fft_threshold, self.cache_dir)

    def provenance(self):
        return {
            "seed": self.seed,
            "precision_bits": self.precision_bits,
            "field_cap": self.field_cap,
            "work_cap": self.work_cap,
        }

    def to_dict(self):
        return asdict(self)
