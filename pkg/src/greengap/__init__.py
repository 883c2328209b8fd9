"""
greengap: green-technology adoption by heterogeneous firms.

Seeded Monte Carlo over calibrated firm parameters, evaluated under
engineering, optimizing, satisficing and behavioural decision protocols and
their ensemble, plus tax, subsidy and level-shifting policy analysis.
"""

__version__ = "0.1.0"

from .config import CalibrationConfig, load_config, save_config
from .decision import (
    BehaviouralConstants,
    EnsembleWeights,
    FirmDraw,
    decide,
    npb_level2,
    npb_level3,
    npv_level0,
    npv_level1,
)
from .distributions import EmpiricalDiscrete, PointMass, TruncatedNormal, Weibull
from .engine import Level, SimulationResult, draw_population, histogram, simulate_all, simulate_level
from .policy import PolicySpec, apply_policy, equivalent_subsidy_for_tax, policy_impact, policy_sweep, shift_sweep
from .sensitivity import SweepSpec, implicit_parameter, run_sweep
