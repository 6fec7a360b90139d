"""Classical sub-quantum simulation of n-slit interference.

Densities, currents and averaged trajectories are built from Gaussian
channels undergoing ballistic diffusion, then checked against the
standard quantum-mechanical probability current.
"""

from .model import GridSpec, PhysicalParams, ScenarioConfig, SlitSpec, derive_params, validate_scenario

__all__ = [
    "GridSpec",
    "PhysicalParams",
    "ScenarioConfig",
    "SlitSpec",
    "derive_params",
    "validate_scenario",
]

__version__ = "0.1.0"
