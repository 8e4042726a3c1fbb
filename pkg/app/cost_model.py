"""
Cost-based engine dispatch.

The rule picks the holistic engine for highly selective queries, binary
joins when the core alone is unselective, and the combined engine in
between. Selectivities come from a statistics provider: `exact` runs the
binary-join plans, `heuristic` estimates from inverted-list sizes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Protocol

from app.engine_config import EngineConfig, get_config
from app.errors import ConfigurationError
from app.executor import compute_selectivity, execute
from app.ingest import InvertedIndex
from app.model import TwigQuery, decompose
from app.planner import Engine, build_plan

logger = logging.getLogger("tpq.planner")


@dataclass(frozen=True)
class CostInputs:
    sigma: float
    sigma_core: float
    threshold: float = 0.001
    core_threshold: float = 0.1
    rho: float = 1.0

    def __post_init__(self):
        for name in ("sigma", "sigma_core", "threshold", "core_threshold", "rho"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


def select_engine_cbj(c: CostInputs) -> Engine:
    """HJ below the selectivity threshold, else BJ above the core threshold, else CJ."""
    if c.sigma < c.threshold:
        return Engine.HJ
    if c.sigma_core > c.core_threshold:
        return Engine.BJ
    return Engine.CJ


# ============================================================================
# Statistics providers
# ============================================================================

class StatisticsProvider(Protocol):
    def selectivities(self, query: TwigQuery, idx: InvertedIndex) -> tuple[float, float]:
        """(sigma, sigma_core) of `query` over `idx`."""
        ...


class ExactStatistics:
    """Measures both selectivities by running binary-join plans."""

    def selectivities(self, query: TwigQuery, idx: InvertedIndex) -> tuple[float, float]:
        result = execute(build_plan(query, Engine.BJ), idx, debug_asserts=False)
        sigma = compute_selectivity(query, result.rows, idx)

        core = decompose(query).core
        if core.n == query.n:
            return sigma, sigma
        core_result = execute(build_plan(core, Engine.BJ), idx, debug_asserts=False)
        return sigma, compute_selectivity(core, core_result.rows, idx)


class HeuristicStatistics:
    """Smallest list over the sum of lists, for output nodes and for core nodes."""

    @staticmethod
    def _ratio(sizes: list[int]) -> float:
        total = sum(sizes)
        return min(sizes) / total if total else 0.0

    def selectivities(self, query: TwigQuery, idx: InvertedIndex) -> tuple[float, float]:
        sigma = self._ratio([idx.size(query.tag(i)) for i in query.output_ids])
        core_ids = decompose(query).core_ids
        sigma_core = self._ratio([idx.size(query.tag(i)) for i in sorted(core_ids)])
        return sigma, sigma_core


_PROVIDERS: dict[str, type] = {
    "exact": ExactStatistics,
    "heuristic": HeuristicStatistics,
}


def get_provider(name: str) -> StatisticsProvider:
    try:
        return _PROVIDERS[name]()
    except KeyError:
        raise ConfigurationError(
            message=f"Unknown statistics provider: {name}",
            suggestion=f"Use one of: {', '.join(_PROVIDERS)}",
        ) from None


def cost_inputs(
    query: TwigQuery,
    idx: InvertedIndex,
    config: EngineConfig | None = None,
) -> CostInputs:
    """Selectivities from the configured provider plus the configured thresholds."""
    config = config or get_config()
    sigma, sigma_core = get_provider(config.statistics_provider).selectivities(query, idx)
    return CostInputs(
        sigma=sigma,
        sigma_core=sigma_core,
        threshold=config.selectivity_threshold,
        core_threshold=config.core_selectivity_threshold,
        rho=query.n_o / query.n,
    )


def resolve_engine(
    query: TwigQuery,
    idx: InvertedIndex,
    config: EngineConfig | None = None,
) -> Engine:
    """Concrete engine chosen by the cost-based rule for `query`."""
    inputs = cost_inputs(query, idx, config)
    engine = select_engine_cbj(inputs)
    logger.info(
        "cbj resolved to %s (sigma=%.6f, sigma_core=%.6f)",
        engine.value, inputs.sigma, inputs.sigma_core,
    )
    return engine
