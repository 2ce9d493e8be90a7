"""Run configuration."""

import os
from dataclasses import dataclass, field, replace
from fractions import Fraction

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

OUTPUT_FORMATS = ("json", "csv", "table")


@dataclass(frozen=True)
class Budgets:
    """Per-module resource limits."""
    count_ksets: int = 10**8
    matching_nodes: int = 2 * 10**6
    convolution_support: int = 10**7
    ank_sets: int = 60
    ank_upsets: int = 200_000
    baranyai_sets: int = 10**5
    erdos_exhaustive_sets: int = 21
    samuels_points: int = 10**6


@dataclass(frozen=True)
class Thresholds:
    """Constants C in the "n >= C k^2" hypotheses of the checked bounds."""
    hilton_milner_ratio: Fraction = Fraction(500)
    moderate_ratio: Fraction = Fraction(500)
    quadratic_ratio: Fraction = Fraction(33)
    cubic_factor: int = 2


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run besides its inputs."""
    seed: int = 0
    threads: int = 1
    output_format: str = "json"
    budget_ms: int = 0
    budgets: Budgets = field(default_factory=Budgets)
    thresholds: Thresholds = field(default_factory=Thresholds)

    def with_overrides(self, **kwargs) -> "RunConfig":
        """Return a copy with the non-None keyword arguments applied."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


def _env_fraction(name: str, default: Fraction) -> Fraction:
    value = os.getenv(name)
    return Fraction(value) if value not in (None, "") else default


def load_config() -> RunConfig:
    """
    Build a RunConfig from MMS_* environment variables.

    Returns:
        RunConfig with defaults for every unset variable
    """
    budgets = Budgets(
        count_ksets=_env_int("MMS_COUNT_BUDGET", Budgets.count_ksets),
        matching_nodes=_env_int("MMS_MATCHING_NODE_BUDGET", Budgets.matching_nodes),
        convolution_support=_env_int("MMS_CONVOLUTION_BUDGET", Budgets.convolution_support),
        ank_sets=_env_int("MMS_ANK_SET_BUDGET", Budgets.ank_sets),
        ank_upsets=_env_int("MMS_ANK_UPSET_BUDGET", Budgets.ank_upsets),
        baranyai_sets=_env_int("MMS_BARANYAI_BUDGET", Budgets.baranyai_sets),
        erdos_exhaustive_sets=_env_int("MMS_ERDOS_EXHAUSTIVE", Budgets.erdos_exhaustive_sets),
        samuels_points=_env_int("MMS_SAMUELS_BUDGET", Budgets.samuels_points),
    )
    thresholds = Thresholds(
        hilton_milner_ratio=_env_fraction("MMS_HM_RATIO", Thresholds.hilton_milner_ratio),
        moderate_ratio=_env_fraction("MMS_MODERATE_RATIO", Thresholds.moderate_ratio),
        quadratic_ratio=_env_fraction("MMS_QUADRATIC_RATIO", Thresholds.quadratic_ratio),
        cubic_factor=_env_int("MMS_CUBIC_FACTOR", Thresholds.cubic_factor),
    )
    output_format = os.getenv("MMS_FORMAT", "json")
    if output_format not in OUTPUT_FORMATS:
        output_format = "json"
    return RunConfig(
        seed=_env_int("MMS_SEED", 0),
        threads=max(1, _env_int("MMS_THREADS", 1)),
        output_format=output_format,
        budget_ms=_env_int("MMS_BUDGET_MS", 0),
        budgets=budgets,
        thresholds=thresholds,
    )
