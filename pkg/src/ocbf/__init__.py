"""Outage-constrained weighted-sum-rate beamforming for the MISO interference channel."""

from .baselines import BeamformerSolution, InfeasibleStrategyError, evaluate_rates, mrt, tdma, zf
from .oracle import OracleConfig, OracleResult, exhaustive_search
from .outage import LinkPowers, epsilon_rate, instantaneous_rate, mc_outage, outage_probability
from .sca import ScaConfig, ScaResult, run
from .scenario import Scenario, generate_scenario, load_scenario, sample_channels, save_scenario

__all__ = [
    "BeamformerSolution", "InfeasibleStrategyError", "evaluate_rates", "mrt", "tdma", "zf",
    "OracleConfig", "OracleResult", "exhaustive_search",
    "LinkPowers", "epsilon_rate", "instantaneous_rate", "mc_outage", "outage_probability",
    "ScaConfig", "ScaResult", "run",
    "Scenario", "generate_scenario", "load_scenario", "sample_channels", "save_scenario",
]

__version__ = "0.1.0"
