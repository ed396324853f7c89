"""Joint 1-bit precoding and discrete beyond-diagonal IRS phase design
for line-of-sight terahertz MISO downlinks."""

from bdirs.errors import (
    ConfigError,
    ContractError,
    DegenerateChannelError,
    DomainError,
    SolverError,
)
from bdirs.channel import ChannelPair, ChannelParams, make_channels, sample_geometry
from bdirs.quantizer import QuantSpec, ScaledCodeword
from bdirs.objective import LinkObjective
from bdirs.precoder import SolverConfig, solve_p1
from bdirs.phase_design import DesignerConfig, PhaseDesigner, dirs_baseline
from bdirs.optimizer import OptimizerConfig, RunRecord, run_joint

__version__ = "0.1.0"

__all__ = [
    "ChannelPair",
    "ChannelParams",
    "ConfigError",
    "ContractError",
    "DegenerateChannelError",
    "DesignerConfig",
    "DomainError",
    "LinkObjective",
    "OptimizerConfig",
    "PhaseDesigner",
    "QuantSpec",
    "RunRecord",
    "ScaledCodeword",
    "SolverConfig",
    "SolverError",
    "dirs_baseline",
    "make_channels",
    "run_joint",
    "sample_geometry",
    "solve_p1",
]
